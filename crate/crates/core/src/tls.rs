//! Closed-form physics of the resonantly driven two-level emitter.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{
    check_positive, CorrelationCurve, DriveParams, EmitterParams, Grid, Spectrum, HBAR_UEV_PS,
};

/// Below this |q| (ps⁻¹) the critically damped closed form is used.
pub const DEGENERATE_Q: f64 = 1e-9;

/// Decay constants of the intensity correlation.
///
/// λ± = −(γ₀ + γ/2)/2 ± q, q = √((γ₀ − γ/2)²/4 − Ω²). `q` is real for an
/// overdamped emitter and imaginary when the drive produces Rabi
/// oscillations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Coefficients {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub q: Complex64,
    pub mean_lambda: f64,
}

/// Which closed form applies for a given q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Overdamped,
    Degenerate,
    Oscillatory,
}

impl G2Coefficients {
    pub fn new(emitter: &EmitterParams, drive: &DriveParams) -> Self {
        Self::from_rates(emitter.gamma0(), emitter.gamma(), drive.rabi_angular())
    }

    /// `gamma0`, `gamma` and `rabi` all in ps⁻¹.
    pub fn from_rates(gamma0: f64, gamma: f64, rabi: f64) -> Self {
        let mean_lambda = -0.5 * (gamma0 + 0.5 * gamma);
        let d = gamma0 - 0.5 * gamma;
        let q = Complex64::new(0.25 * d * d - rabi * rabi, 0.0).sqrt();
        G2Coefficients {
            lambda_plus: mean_lambda + q,
            lambda_minus: mean_lambda - q,
            q,
            mean_lambda,
        }
    }

    pub fn regime(&self) -> Regime {
        if self.q.norm() < DEGENERATE_Q {
            Regime::Degenerate
        } else if self.q.im.abs() > self.q.re.abs() {
            Regime::Oscillatory
        } else {
            Regime::Overdamped
        }
    }

    /// g²(τ); depends on |τ| only.
    pub fn g2(&self, tau: f64) -> f64 {
        let t = tau.abs();
        if self.q.norm() < DEGENERATE_Q {
            let x = self.mean_lambda * t;
            return 1.0 + x.exp() * (x - 1.0);
        }
        let two_q = 2.0 * self.q;
        let value = 1.0 + self.lambda_minus / two_q * (t * self.lambda_plus).exp()
            - self.lambda_plus / two_q * (t * self.lambda_minus).exp();
        value.re
    }

    /// Same as [`g2`](Self::g2) but keeps the imaginary residue of the
    /// complex evaluation; it should vanish to rounding.
    pub fn g2_complex(&self, tau: f64) -> Complex64 {
        let t = tau.abs();
        let two_q = 2.0 * self.q;
        1.0 + self.lambda_minus / two_q * (t * self.lambda_plus).exp()
            - self.lambda_plus / two_q * (t * self.lambda_minus).exp()
    }
}

pub fn g2_driven(emitter: &EmitterParams, drive: &DriveParams, tau: f64) -> f64 {
    G2Coefficients::new(emitter, drive).g2(tau)
}

/// Sample g²(τ) on `grid`.
pub fn g2_curve(emitter: &EmitterParams, drive: &DriveParams, grid: Grid) -> Result<CorrelationCurve> {
    let coeffs = G2Coefficients::new(emitter, drive);
    let values = grid.points().map(|t| coeffs.g2(t).max(0.0)).collect();
    CorrelationCurve::new(grid.start, grid.step, values)
}

/// Parameters of the strong-drive Mollow triplet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollowParams {
    /// γ_sp in ps⁻¹.
    pub gamma_sp: f64,
    /// Ω in rad/ps.
    pub rabi: f64,
    /// Line centre on the energy axis, µeV.
    pub center: f64,
}

impl MollowParams {
    pub fn new(gamma_sp: f64, rabi: f64, center: f64) -> Result<Self> {
        check_positive("gamma_sp", gamma_sp)?;
        if !(rabi >= 0.0) || !rabi.is_finite() {
            return Err(Error::param("rabi", format!("must be non-negative, got {rabi}")));
        }
        Ok(MollowParams {
            gamma_sp,
            rabi,
            center,
        })
    }

    /// Build from energies: ħγ_sp and ħΩ in µeV.
    pub fn from_energies(gamma_sp_uev: f64, rabi_uev: f64, center: f64) -> Result<Self> {
        Self::new(gamma_sp_uev / HBAR_UEV_PS, rabi_uev / HBAR_UEV_PS, center)
    }

    pub fn gamma_sp_energy(&self) -> f64 {
        self.gamma_sp * HBAR_UEV_PS
    }

    pub fn rabi_energy(&self) -> f64 {
        self.rabi * HBAR_UEV_PS
    }

    /// Spectral density (µeV⁻¹) at absolute energy `omega`.
    pub fn density(&self, omega: f64) -> f64 {
        mollow_density(
            omega - self.center,
            self.gamma_sp_energy(),
            self.rabi_energy(),
        )
    }
}

/// Three-Lorentzian Mollow density at offset `x` from the line centre, all
/// arguments in µeV. Integrates to one.
pub fn mollow_density(x: f64, gamma_sp: f64, rabi: f64) -> f64 {
    mollow_components(x, gamma_sp, rabi).iter().sum()
}

/// The (−Ω, centre, +Ω) Lorentzians of [`mollow_density`]; their areas are
/// 1/4, 1/2 and 1/4.
pub fn mollow_components(x: f64, gamma_sp: f64, rabi: f64) -> [f64; 3] {
    let side_hw = 1.5 * gamma_sp;
    let side_amp = 3.0 * gamma_sp / (8.0 * PI);
    let side = |c: f64| side_amp / ((x - c).powi(2) + side_hw * side_hw);
    let central = (gamma_sp / (2.0 * PI)) / (x * x + gamma_sp * gamma_sp);
    [side(-rabi), central, side(rabi)]
}

pub fn mollow_spectrum(p: &MollowParams, grid: Grid) -> Result<Spectrum> {
    check_positive("gamma_sp", p.gamma_sp)?;
    let density = grid.points().map(|w| p.density(w)).collect();
    Spectrum::new(grid.start, grid.step, density)
}

/// Normalised Lorentzian of the given FWHM (all µeV) at offset `x`.
pub fn lorentzian(x: f64, fwhm: f64) -> f64 {
    let hw = 0.5 * fwhm;
    hw / PI / (x * x + hw * hw)
}

/// Weak-drive spectrum: one Lorentzian with FWHM 2ħ/T2 centred on the grid origin.
pub fn weak_drive_spectrum(emitter: &EmitterParams, grid: Grid) -> Result<Spectrum> {
    let fwhm = 2.0 * HBAR_UEV_PS / emitter.t2();
    let density = grid.points().map(|w| lorentzian(w, fwhm)).collect();
    Spectrum::new(grid.start, grid.step, density)
}

/// ħΩ = c·√P.
pub fn rabi_from_power(power: f64, calibration: f64) -> Result<f64> {
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::param("power", format!("must be non-negative, got {power}")));
    }
    check_positive("calibration", calibration)?;
    Ok(calibration * power.sqrt())
}

/// Least-squares c in ħΩ = c·√P from (power, rabi energy) pairs.
pub fn calibrate_power(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::param("points", "need at least one (power, rabi) pair"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(p, e) in points {
        if !(p >= 0.0) {
            return Err(Error::param("power", format!("must be non-negative, got {p}")));
        }
        num += p.sqrt() * e;
        den += p;
    }
    if den <= 0.0 {
        return Err(Error::DegenerateData("all powers are zero".into()));
    }
    Ok(num / den)
}

/// s = Ω² T1 T2.
pub fn saturation_parameter(emitter: &EmitterParams, drive: &DriveParams) -> f64 {
    let omega = drive.rabi_angular();
    omega * omega * emitter.t1() * emitter.t2()
}

/// Excited-state population (s/2)/(1+s); tends to 1/2 at saturation.
pub fn steady_state_population(emitter: &EmitterParams, drive: &DriveParams) -> f64 {
    let s = saturation_parameter(emitter, drive);
    if s.is_infinite() {
        return 0.5;
    }
    0.5 * s / (1.0 + s)
}

/// Photon emission rate γ₀·ρ_ee in ps⁻¹.
pub fn emission_rate(emitter: &EmitterParams, drive: &DriveParams) -> f64 {
    emitter.gamma0() * steady_state_population(emitter, drive)
}

/// Fluorescence over linearly growing laser scatter at excitation power `power`.
///
/// The drive at `power` follows ħΩ = c√P with c taken from `drive`.
pub fn signal_to_background(
    power: f64,
    emitter: &EmitterParams,
    drive: &DriveParams,
    laser_coeff: f64,
) -> Result<f64> {
    check_positive("power", power)?;
    check_positive("laser_coeff", laser_coeff)?;
    let c = drive
        .power_calibration()
        .ok_or_else(|| Error::param("power_calibration", "required to map power to Rabi energy"))?;
    let at_power = DriveParams::new(rabi_from_power(power, c)?)?;
    Ok(emission_rate(emitter, &at_power) / (laser_coeff * power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paper_emitter() -> EmitterParams {
        EmitterParams::new(560.0, 360.0).unwrap()
    }

    #[test]
    fn antibunched_at_zero_and_flat_at_infinity() {
        let e = paper_emitter();
        let d = DriveParams::new(0.9).unwrap();
        assert!(g2_driven(&e, &d, 0.0).abs() < 1e-12);
        assert!((g2_driven(&e, &d, 1e6) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_branch_matches_small_q() {
        // T2 = T1 gives γ₀ = γ/2; with Ω = 0, q is exactly zero.
        let e = EmitterParams::new(560.0, 560.0).unwrap();
        let d = DriveParams::new(0.0).unwrap();
        let c = G2Coefficients::new(&e, &d);
        assert_eq!(c.regime(), Regime::Degenerate);
        // Perturb Ω so that |q| = 1e-6 ps⁻¹ (imaginary).
        let near = G2Coefficients::from_rates(e.gamma0(), e.gamma(), 1e-6);
        assert!((near.q.norm() - 1e-6).abs() < 1e-12);
        for i in 0..200 {
            let tau = i as f64 * 25.0;
            assert!((c.g2(tau) - near.g2(tau)).abs() < 1e-6, "tau = {tau}");
        }
    }

    #[test]
    fn complex_evaluation_is_real() {
        let c = G2Coefficients::new(&paper_emitter(), &DriveParams::new(0.9).unwrap());
        assert_eq!(c.regime(), Regime::Oscillatory);
        for i in 0..500 {
            assert!(c.g2_complex(i as f64 * 17.0).im.abs() < 1e-9);
        }
    }

    #[test]
    fn coefficient_invariants() {
        for (g0, g, w) in [(1e-3, 5e-3, 2e-3), (2e-3, 1e-2, 1e-4), (1e-3, 2e-3, 0.0)] {
            let c = G2Coefficients::from_rates(g0, g, w);
            let sum = c.lambda_plus + c.lambda_minus;
            assert!((sum.re + g0 + 0.5 * g).abs() < 1e-12 && sum.im.abs() < 1e-12);
            assert!((c.lambda_plus - c.lambda_minus - 2.0 * c.q).norm() < 1e-15);
        }
    }

    #[test]
    fn curve_is_even_and_tends_to_one() {
        let e = paper_emitter();
        let d = DriveParams::new(0.9).unwrap();
        let grid = Grid::symmetric(20_000.0, 10.0).unwrap();
        let curve = g2_curve(&e, &d, grid).unwrap();
        let n = curve.len();
        assert!(curve.values()[n / 2].abs() < 1e-12);
        for i in 0..n {
            assert_eq!(curve.values()[i], curve.values()[n - 1 - i]);
            if curve.tau(i).abs() > 15.0 * 560.0 {
                assert!((curve.values()[i] - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn first_maximum_near_half_rabi_period() {
        let e = paper_emitter();
        // Ω = 20 max(γ₀, γ)
        let omega = 20.0 * e.gamma();
        let c = G2Coefficients::from_rates(e.gamma0(), e.gamma(), omega);
        let expected = PI / omega;
        let step = expected / 2000.0;
        let mut t = step;
        while c.g2(t + step) > c.g2(t) {
            t += step;
        }
        assert!((t - expected).abs() / expected < 0.1, "{t} vs {expected}");
    }

    #[test]
    fn mollow_shape() {
        let p = MollowParams::from_energies(1.0, 26.7, 0.0).unwrap();
        let hw = p.gamma_sp_energy();
        // Peak-height ratio, central over side: (1/2π)/γ vs (3/8π)/((9/4)γ) = 3
        let central = p.density(0.0);
        let ratio = (1.0 / (2.0 * PI * hw)) / ((3.0 / (8.0 * PI)) / (2.25 * hw));
        assert_relative_eq!(ratio, 3.0, max_relative = 1e-12);
        // With the side peaks far away the measured ratio approaches 3.
        let side = p.density(26.7);
        assert!((central / side - 3.0).abs() < 0.02, "{}", central / side);
        // Even about the centre.
        for x in [0.3, 5.0, 26.7, 60.0] {
            assert_relative_eq!(p.density(x), p.density(-x), max_relative = 1e-14);
        }
        assert!(mollow_spectrum(&p, Grid::symmetric(10.0, 1.0).unwrap()).is_ok());
        assert!(MollowParams::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn weak_drive_lorentzian_width() {
        let e = paper_emitter();
        let fwhm = 2.0 * HBAR_UEV_PS / 360.0;
        let s = weak_drive_spectrum(&e, Grid::symmetric(2000.0, 0.01).unwrap()).unwrap();
        let peak = s.density()[s.len() / 2];
        let half = s.density().iter().filter(|&&d| d >= 0.5 * peak).count() as f64 * 0.01;
        assert!((half - fwhm).abs() < 0.02);
        assert!((s.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn power_law() {
        assert_eq!(rabi_from_power(0.0, 3.0).unwrap(), 0.0);
        let a = rabi_from_power(2.0, 3.0).unwrap();
        let b = rabi_from_power(8.0, 3.0).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-14);
        assert!(rabi_from_power(-1.0, 3.0).is_err());
        assert!(rabi_from_power(1.0, 0.0).is_err());
    }

    #[test]
    fn calibration_recovers_constant() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let c = 4.2;
        let pts: Vec<_> = (1..=12)
            .map(|i| {
                let p = i as f64 * 3.5;
                (p, c * p.sqrt() * (1.0 + noise.sample(&mut rng)))
            })
            .collect();
        let fit = calibrate_power(&pts).unwrap();
        assert!((fit - c).abs() / c < 0.03);
    }

    #[test]
    fn saturation_limits() {
        let e = paper_emitter();
        let strong = DriveParams::new(1e6).unwrap();
        assert!((steady_state_population(&e, &strong) - 0.5).abs() < 1e-9);
        // s = 1 -> 1/4
        let omega = 1.0 / (e.t1() * e.t2()).sqrt();
        let half = DriveParams::new(omega * HBAR_UEV_PS).unwrap();
        assert_relative_eq!(saturation_parameter(&e, &half), 1.0, max_relative = 1e-12);
        assert_relative_eq!(steady_state_population(&e, &half), 0.25, max_relative = 1e-12);
        assert_eq!(steady_state_population(&e, &DriveParams::new(0.0).unwrap()), 0.0);
    }

    #[test]
    fn background_ratio_behaviour() {
        let e = paper_emitter();
        let d = DriveParams::new(0.0).unwrap().with_power_calibration(0.5).unwrap();
        let k = 1e-4;
        // small-s limit: γ₀ c² T1 T2 / (2 ħ² k)
        let limit = e.gamma0() * 0.25 * e.t1() * e.t2() / (2.0 * HBAR_UEV_PS.powi(2) * k);
        let tiny = signal_to_background(1e-9, &e, &d, k).unwrap();
        assert_relative_eq!(tiny, limit, max_relative = 1e-6);
        let mut last = f64::INFINITY;
        for i in 1..50 {
            let r = signal_to_background(i as f64 * 0.7, &e, &d, k).unwrap();
            assert!(r < last);
            last = r;
        }
        let r1 = signal_to_background(3.0, &e, &d, k).unwrap();
        let r2 = signal_to_background(3.0, &e, &d, 2.0 * k).unwrap();
        assert_relative_eq!(r1, 2.0 * r2, max_relative = 1e-14);
        assert!(signal_to_background(1.0, &e, &DriveParams::new(0.0).unwrap(), k).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn antibunched_nonnegative_and_flat_far_out(
                t1 in 50.0f64..5000.0, frac in 0.02f64..1.0, rabi in 0.0f64..20.0,
                tau in 0.0f64..50_000.0,
            ) {
                let e = EmitterParams::new(t1, 2.0 * t1 * frac).unwrap();
                let d = DriveParams::new(rabi).unwrap();
                prop_assert!(g2_driven(&e, &d, 0.0).abs() < 1e-10);
                prop_assert!(g2_driven(&e, &d, tau) >= -1e-10);
                prop_assert!((g2_driven(&e, &d, tau) - g2_driven(&e, &d, -tau)).abs() < 1e-12);
                prop_assert!((g2_driven(&e, &d, 200.0 * t1) - 1.0).abs() < 1e-9);
            }
        }
    }
}
