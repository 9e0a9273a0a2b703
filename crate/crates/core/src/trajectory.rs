//! Quantum-jump simulation of the driven emitter and click-level transport
//! through beamsplitter and Mach-Zehnder topologies.
//!
//! Between jumps the unnormalised amplitudes (c_g, c_e) evolve under
//! H_eff = (Ω/2)σ_x − i(γ₀/2)|e⟩⟨e| with a fixed-step fourth-order scheme.
//! A radiative jump happens when ‖ψ‖² drops below a uniform threshold; the
//! crossing is refined by bisection. Pure dephasing is a σ_z jump whose
//! rate 1/(2T2*) is state independent, so it runs as its own Poisson clock
//! and leaves no timestamp. Its σ_z flips damp the coherence at 1/T2*,
//! giving 1/T2 = 1/(2T1) + 1/T2* overall.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{check_positive, check_unit_interval, ClickStream, DriveParams, EmitterParams, InterferometerParams};

/// Steps per shortest time scale.
pub const STEPS_PER_SCALE: f64 = 50.0;
/// Bisection stops once the jump time is known to this fraction of a step.
pub const JUMP_RESOLUTION: f64 = 1e-3;
pub const DEFAULT_BATCH_LENGTH: f64 = 2e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub emitter: EmitterParams,
    pub drive: DriveParams,
    /// ps
    pub duration: f64,
    pub seed: u64,
    /// Integrator step, ps.
    pub time_step: f64,
    /// Length of the independently seeded segments, ps. Each segment
    /// starts in the ground state.
    pub batch_length: f64,
}

impl TrajectoryConfig {
    /// Config with the largest admissible step.
    pub fn new(emitter: EmitterParams, drive: DriveParams, duration: f64, seed: u64) -> Self {
        TrajectoryConfig {
            emitter,
            drive,
            duration,
            seed,
            time_step: max_time_step(&emitter, &drive),
            batch_length: DEFAULT_BATCH_LENGTH,
        }
    }

    pub fn with_time_step(mut self, time_step: f64) -> Self {
        self.time_step = time_step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("duration", self.duration)?;
        check_positive("time_step", self.time_step)?;
        check_positive("batch_length", self.batch_length)?;
        let limit = max_time_step(&self.emitter, &self.drive);
        if self.time_step > limit * (1.0 + 1e-12) {
            return Err(Error::param(
                "time_step",
                format!(
                    "{} ps exceeds min(T1, T2, 2π/Ω)/{STEPS_PER_SCALE} = {limit} ps",
                    self.time_step
                ),
            ));
        }
        if self.batch_length < self.time_step {
            return Err(Error::param("batch_length", "shorter than one time step"));
        }
        Ok(())
    }
}

/// min(T1, T2, 2π/Ω) / 50.
pub fn max_time_step(emitter: &EmitterParams, drive: &DriveParams) -> f64 {
    let omega = drive.rabi_angular();
    let period = if omega > 0.0 { TAU / omega } else { f64::INFINITY };
    emitter.t1().min(emitter.t2()).min(period) / STEPS_PER_SCALE
}

/// 2×2 complex matrix, row major.
#[derive(Debug, Clone, Copy)]
struct Mat2([Complex64; 4]);

impl Mat2 {
    const IDENTITY: Mat2 = Mat2([
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]);

    fn mul(&self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    fn add_scaled(&self, o: &Mat2, s: f64) -> Mat2 {
        let mut out = self.0;
        for (x, y) in out.iter_mut().zip(o.0) {
            *x += y * s;
        }
        Mat2(out)
    }

    fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let [a, b, c, d] = self.0;
        [a * v[0] + b * v[1], c * v[0] + d * v[1]]
    }
}

/// One classical RK4 step of ψ' = Aψ, which for constant A is the
/// fourth-order Taylor polynomial of exp(hA).
struct Propagator {
    generator: Mat2,
}

impl Propagator {
    fn new(rabi: f64, gamma0: f64) -> Self {
        let off = Complex64::new(0.0, -0.5 * rabi);
        Propagator {
            generator: Mat2([Complex64::new(0.0, 0.0), off, off, Complex64::new(-0.5 * gamma0, 0.0)]),
        }
    }

    fn step(&self, h: f64) -> Mat2 {
        let a = Mat2(self.generator.0.map(|z| z * h));
        let a2 = a.mul(&a);
        let a3 = a2.mul(&a);
        let a4 = a3.mul(&a);
        Mat2::IDENTITY
            .add_scaled(&a, 1.0)
            .add_scaled(&a2, 0.5)
            .add_scaled(&a3, 1.0 / 6.0)
            .add_scaled(&a4, 1.0 / 24.0)
    }
}

fn norm2(v: &[Complex64; 2]) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

const GROUND: [Complex64; 2] = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];

/// Uniform in (0, 1].
fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    if rate > 0.0 {
        -unit_open(rng).ln() / rate
    } else {
        f64::INFINITY
    }
}

/// Emission times (ps, relative to the segment start) over one segment.
fn simulate_segment(cfg: &TrajectoryConfig, length: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let prop = Propagator::new(cfg.drive.rabi_angular(), cfg.emitter.gamma0());
    let dt = cfg.time_step;
    let full = prop.step(dt);
    let flip_rate = 0.5 * cfg.emitter.t2_star().rate();

    let mut emissions = Vec::new();
    let mut psi = GROUND;
    let mut t = 0.0;
    let mut threshold = unit_open(rng);
    let mut next_flip = exponential(rng, flip_rate);

    while t < length {
        let mut h = dt.min(length - t);
        let flip_due = next_flip - t <= h;
        if flip_due {
            h = next_flip - t;
        }
        let m = if h == dt { full } else { prop.step(h) };
        let next = m.apply(psi);
        if norm2(&next) < threshold {
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > JUMP_RESOLUTION * dt {
                let mid = 0.5 * (lo + hi);
                if norm2(&prop.step(mid).apply(psi)) < threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            t += 0.5 * (lo + hi);
            emissions.push(t);
            psi = GROUND;
            threshold = unit_open(rng);
            continue;
        }
        psi = next;
        if flip_due {
            t = next_flip;
            psi[1] = -psi[1];
            next_flip += exponential(rng, flip_rate);
        } else {
            t += h;
        }
    }
    emissions
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Round continuous times to integer picoseconds, keeping them strictly
/// increasing (a tie is pushed 1 ps later) and inside the duration.
fn to_timestamps(times: impl IntoIterator<Item = f64>, duration: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for t in times {
        let mut ts = t.round().max(0.0) as u64;
        if let Some(&last) = out.last() {
            if ts <= last {
                ts = last + 1;
            }
        }
        if ts > duration {
            break;
        }
        out.push(ts);
    }
    out
}

/// Photon emissions of the driven emitter as a click stream on channel 0.
///
/// Segments of `batch_length` run in parallel with per-segment random
/// streams derived from the seed and are concatenated in order, so the
/// result depends only on the config.
pub fn simulate_clicks(cfg: &TrajectoryConfig) -> Result<ClickStream> {
    cfg.validate()?;
    let batches = (cfg.duration / cfg.batch_length).ceil().max(1.0) as u64;
    let segments: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let start = b as f64 * cfg.batch_length;
            let length = cfg.batch_length.min(cfg.duration - start);
            let mut rng = batch_rng(cfg.seed, b);
            simulate_segment(cfg, length, &mut rng)
                .into_iter()
                .map(|t| start + t)
                .collect()
        })
        .collect();
    let duration = cfg.duration.round() as u64;
    let timestamps = to_timestamps(segments.into_iter().flatten(), duration);
    ClickStream::new(0, timestamps, duration)
}

/// Route each click independently: to the first output (channel 1) with
/// probability `ratio`, else to the second (channel 2).
pub fn split_stream(s: &ClickStream, ratio: f64, seed: u64) -> Result<(ClickStream, ClickStream)> {
    check_unit_interval("ratio", ratio)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for &t in s.timestamps() {
        if rng.random::<f64>() < ratio {
            a.push(t);
        } else {
            b.push(t);
        }
    }
    Ok((
        ClickStream::new(1, a, s.duration())?,
        ClickStream::new(2, b, s.duration())?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MzMode {
    /// Distinguishable arms: purely stochastic routing.
    Orthogonal,
    /// Indistinguishable arms. Coincidence pairs at separation δt survive
    /// with probability 1 − V e^{−2|δt|/T2}. This thinning is a heuristic
    /// that reproduces the shape of the analytic parallel curve, not an
    /// amplitude-level simulation.
    Parallel { t2: f64 },
}

/// Send clicks through the fiber Mach-Zehnder.
///
/// The first coupler sends a click into the delayed arm with probability
/// R₁. At the second coupler a short-arm click reaches output A with
/// probability T₂ and a long-arm click with probability R₂. Outputs are
/// channels 1 (A) and 2 (B); their duration is the input duration plus
/// the delay. Coinciding arrivals in one output are separated by 1 ps.
pub fn simulate_mz(
    s: &ClickStream,
    ifo: &InterferometerParams,
    mode: MzMode,
    seed: u64,
) -> Result<(ClickStream, ClickStream)> {
    ifo.validate()?;
    let delay = ifo.delay.round() as u64;
    let duration = s.duration() + delay;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut a, mut b) = (Vec::with_capacity(s.len() / 2), Vec::with_capacity(s.len() / 2));
    for &t in s.timestamps() {
        let long = rng.random::<f64>() < ifo.r1;
        let to_a = rng.random::<f64>() < if long { ifo.r2 } else { ifo.t2c };
        let arrival = if long { t + delay } else { t };
        if to_a {
            a.push(arrival);
        } else {
            b.push(arrival);
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    let mut a = separate_ties(a);
    let mut b = separate_ties(b);

    if let MzMode::Parallel { t2 } = mode {
        check_positive("t2", t2)?;
        if ifo.overlap > 0.0 {
            (a, b) = coalesce(&a, &b, ifo.overlap, 2.0 / t2, &mut rng);
        }
    }
    let duration = duration.max(a.last().copied().unwrap_or(0)).max(b.last().copied().unwrap_or(0));
    Ok((ClickStream::new(1, a, duration)?, ClickStream::new(2, b, duration)?))
}

fn separate_ties(mut v: Vec<u64>) -> Vec<u64> {
    for i in 1..v.len() {
        if v[i] <= v[i - 1] {
            v[i] = v[i - 1] + 1;
        }
    }
    v
}

/// Walk both outputs in time order; each click is tested against earlier
/// surviving clicks of the other output and removed with probability
/// V e^{−γ δt} at the first success.
fn coalesce(a: &[u64], b: &[u64], overlap: f64, gamma: f64, rng: &mut ChaCha8Rng) -> (Vec<u64>, Vec<u64>) {
    // Beyond this separation V e^{−γ δt} < 1e-12.
    let cutoff = ((overlap * 1e12).ln() / gamma).max(0.0);
    let mut merged: Vec<(u64, bool)> = a
        .iter()
        .map(|&t| (t, true))
        .chain(b.iter().map(|&t| (t, false)))
        .collect();
    merged.sort_unstable();
    let mut alive = vec![true; merged.len()];
    for i in 0..merged.len() {
        let (tc, on_a) = merged[i];
        for j in (0..i).rev() {
            let (td, other_a) = merged[j];
            let sep = (tc - td) as f64;
            if sep > cutoff {
                break;
            }
            if other_a == on_a || !alive[j] {
                continue;
            }
            if rng.random::<f64>() < overlap * (-gamma * sep).exp() {
                alive[i] = false;
                break;
            }
        }
    }
    let (mut out_a, mut out_b) = (Vec::new(), Vec::new());
    for ((t, on_a), keep) in merged.into_iter().zip(alive) {
        if keep {
            if on_a {
                out_a.push(t);
            } else {
                out_b.push(t);
            }
        }
    }
    (out_a, out_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tls::emission_rate;

    fn cfg(t1: f64, t2: f64, rabi: f64, duration: f64, seed: u64) -> TrajectoryConfig {
        TrajectoryConfig::new(
            EmitterParams::new(t1, t2).unwrap(),
            DriveParams::new(rabi).unwrap(),
            duration,
            seed,
        )
    }

    #[test]
    fn undriven_emitter_stays_dark() {
        let s = simulate_clicks(&cfg(560.0, 360.0, 0.0, 1e7, 1)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn step_size_is_checked() {
        let c = cfg(560.0, 360.0, 0.9, 1e6, 1);
        assert!(c.validate().is_ok());
        let bad = c.with_time_step(c.time_step * 1.01);
        assert!(simulate_clicks(&bad).is_err());
    }

    #[test]
    fn propagator_matches_matrix_exponential() {
        // Independent reference: nalgebra's Padé exponential.
        use nalgebra::Matrix2;
        let (rabi, g0, h) = (3e-3, 1.0 / 560.0, 7.0);
        let p = Propagator::new(rabi, g0).step(h);
        let a = Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -0.5 * rabi),
            Complex64::new(0.0, -0.5 * rabi),
            Complex64::new(-0.5 * g0, 0.0),
        ) * Complex64::new(h, 0.0);
        let e = a.exp();
        for (k, z) in p.0.iter().enumerate() {
            assert!((z - e[(k / 2, k % 2)]).norm() < 1e-10);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let c = cfg(560.0, 360.0, 0.9, 5e7, 42);
        let a = simulate_clicks(&c).unwrap();
        let b = simulate_clicks(&c).unwrap();
        assert_eq!(a, b);
        let other = simulate_clicks(&TrajectoryConfig { seed: 43, ..c }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn click_rate_matches_steady_state() {
        let c = cfg(560.0, 360.0, 0.9, 2e8, 3);
        let s = simulate_clicks(&c).unwrap();
        let expected = emission_rate(&c.emitter, &c.drive) * c.duration;
        // Emissions are antibunched, so Poisson σ overstates the spread.
        let sigma = expected.sqrt();
        assert!((s.len() as f64 - expected).abs() < 3.0 * sigma, "{} vs {expected}", s.len());
    }

    #[test]
    fn saturated_rate_is_half_gamma0() {
        let c = cfg(200.0, 400.0, 50.0, 1e8, 5);
        let s = simulate_clicks(&c).unwrap();
        let expected = 0.5 / 200.0 * c.duration;
        assert!((s.len() as f64 - expected).abs() < 3.0 * expected.sqrt());
    }

    #[test]
    fn split_routing() {
        let s = simulate_clicks(&cfg(560.0, 360.0, 2.0, 1e8, 9)).unwrap();
        let (a, b) = split_stream(&s, 0.0, 1).unwrap();
        assert!(a.is_empty());
        assert_eq!(b.timestamps(), s.timestamps());
        let (a, b) = split_stream(&s, 0.5, 1).unwrap();
        assert_eq!(a.len() + b.len(), s.len());
        let n = s.len() as f64;
        assert!((a.len() as f64 - n / 2.0).abs() < 3.0 * (n / 4.0).sqrt());
        let mut union: Vec<u64> = a.timestamps().iter().chain(b.timestamps()).copied().collect();
        union.sort_unstable();
        assert_eq!(union, s.timestamps());
        assert_eq!(split_stream(&s, 0.5, 1).unwrap(), (a, b));
        assert!(split_stream(&s, 1.5, 1).is_err());
    }

    #[test]
    fn mz_conserves_clicks_orthogonal() {
        let s = simulate_clicks(&cfg(560.0, 360.0, 0.9, 5e7, 11)).unwrap();
        let ifo = InterferometerParams::balanced(13_000.0, 0.9).unwrap();
        let (a, b) = simulate_mz(&s, &ifo, MzMode::Orthogonal, 4).unwrap();
        assert_eq!(a.len() + b.len(), s.len());
        let zero_v = InterferometerParams::balanced(13_000.0, 0.0).unwrap();
        let par = simulate_mz(&s, &zero_v, MzMode::Parallel { t2: 360.0 }, 4).unwrap();
        let orth = simulate_mz(&s, &zero_v, MzMode::Orthogonal, 4).unwrap();
        assert_eq!(par, orth);
    }

    #[test]
    fn tie_separation() {
        assert_eq!(separate_ties(vec![1, 1, 1, 5]), vec![1, 2, 3, 5]);
        assert_eq!(to_timestamps([0.2, 0.4, 3.0, 99.9], 50), vec![0, 1, 3]);
    }
}
