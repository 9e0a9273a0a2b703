use crate::error::{Error, Result};
use crate::hom::{cross_asymptote, g2_cross};
use crate::instrument::mix_background;
use crate::tls::G2Coefficients;
use crate::units::{DriveParams, EmitterParams, InterferometerParams, IrfParams, HBAR_UEV_PS};

use super::g2::{G2Data, Sampling};
use super::{run_fit, FitOptions, FitResult, ParamSet, ParamSpec};

pub const HOM_PARAMS: [&str; 10] = [
    "t1",
    "t2",
    "rabi_energy",
    "overlap",
    "rho",
    "r1",
    "r2",
    "delay",
    "amplitude_cross",
    "amplitude_parallel",
];

/// Cross- and parallel-polarised HOM curves sharing emitter parameters.
///
/// The background enters through the single-emitter g² that feeds the
/// interferometer expressions; both curves are divided by the cross-curve
/// asymptote so that unbalanced couplers still tend to one.
#[derive(Debug, Clone)]
pub struct HomModel {
    cross: Sampling,
    parallel: Sampling,
}

struct Eval {
    base: G2Coefficients,
    rho: f64,
    ifo: InterferometerParams,
    gamma: f64,
    scale: f64,
}

impl Eval {
    fn new(p: &[f64]) -> Self {
        let ifo = InterferometerParams {
            r1: p[5],
            t1c: 1.0 - p[5],
            r2: p[6],
            t2c: 1.0 - p[6],
            delay: p[7],
            overlap: p[3],
        };
        Eval {
            base: G2Coefficients::from_rates(1.0 / p[0], 2.0 / p[1], p[2] / HBAR_UEV_PS),
            rho: p[4].clamp(0.0, 1.0),
            scale: 1.0 / cross_asymptote(&ifo),
            ifo,
            gamma: 2.0 / p[1],
        }
    }

    fn cross(&self, tau: f64) -> f64 {
        let base = |t: f64| mix_background(self.base.g2(t), self.rho).unwrap_or(f64::NAN);
        self.scale * g2_cross(tau, base, &self.ifo)
    }

    fn parallel_from_cross(&self, tau: f64, cross: f64) -> f64 {
        cross * (1.0 - self.ifo.overlap * (-self.gamma * tau.abs()).exp())
    }
}

impl HomModel {
    pub fn new(cross: G2Data, parallel: G2Data, irf: &IrfParams) -> Result<Self> {
        if !cross.same_layout(&parallel) {
            return Err(Error::GridMismatch(
                "cross and parallel data must share one delay grid".into(),
            ));
        }
        Ok(HomModel {
            cross: Sampling::new(&cross, irf)?,
            parallel: Sampling::new(&parallel, irf)?,
        })
    }

    /// T1, T2, couplers and delay fixed; ħΩ, V, ρ and both amplitudes free.
    pub fn default_params(emitter: &EmitterParams, drive: &DriveParams, ifo: &InterferometerParams) -> ParamSet {
        ParamSet::new(vec![
            ParamSpec::fixed("t1", emitter.t1()),
            ParamSpec::fixed("t2", emitter.t2()),
            ParamSpec::free("rabi_energy", drive.rabi_energy().clamp(0.01, 20.0), 0.01, 20.0),
            ParamSpec::free("overlap", 0.5, 0.0, 1.0),
            ParamSpec::free("rho", 0.9, 0.05, 1.0),
            ParamSpec::fixed("r1", ifo.r1),
            ParamSpec::fixed("r2", ifo.r2),
            ParamSpec::fixed("delay", ifo.delay),
            ParamSpec::free("amplitude_cross", 1.0, 0.5, 2.0),
            ParamSpec::free("amplitude_parallel", 1.0, 0.5, 2.0),
        ])
    }

    /// Normalised (cross, parallel) model at every data sample.
    pub fn predict(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let ev = Eval::new(p);
        let s = &self.cross;
        let mut cross = Vec::with_capacity(s.fine_len);
        let mut par = Vec::with_capacity(s.fine_len);
        for i in 0..s.fine_len {
            let t = s.fine_tau(i);
            let c = ev.cross(t);
            cross.push(c);
            par.push(ev.parallel_from_cross(t, c));
        }
        (s.sample(&s.blur(&cross)), s.sample(&s.blur(&par)))
    }

    pub fn residuals(&self, p: &[f64]) -> Vec<f64> {
        let (c, q) = self.predict(p);
        let mut r = self.cross.weighted_residuals(&c, p[8]);
        r.extend(self.parallel.weighted_residuals(&q, p[9]));
        r
    }

    /// Weighted sums of squares of the (cross, parallel) data separately.
    pub fn residual_parts(&self, p: &[f64]) -> (f64, f64) {
        let r = self.residuals(p);
        let n = self.cross.data.len();
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum();
        (sq(&r[..n]), sq(&r[n..]))
    }

    /// Joint weighted sum of squares at `p` (in [`HOM_PARAMS`] order).
    pub fn residual(&self, p: &[f64]) -> f64 {
        self.residuals(p).iter().map(|r| r * r).sum()
    }

    /// (cross, parallel) before the instrument response.
    pub fn deconvolved(p: &[f64], tau: f64) -> (f64, f64) {
        let ev = Eval::new(p);
        let c = ev.cross(tau);
        (c, ev.parallel_from_cross(tau, c))
    }

    /// Largest visibility of the blurred curves, searched over the data delays.
    pub fn convolved_visibility_peak(&self, p: &[f64]) -> f64 {
        let ev = Eval::new(p);
        let s = &self.cross;
        let (cross, par): (Vec<f64>, Vec<f64>) = (0..s.fine_len)
            .map(|i| {
                let t = s.fine_tau(i);
                let c = ev.cross(t);
                (c, ev.parallel_from_cross(t, c))
            })
            .unzip();
        let (c, q) = (s.blur(&cross), s.blur(&par));
        c.iter()
            .zip(&q)
            .filter(|(c, _)| **c > crate::hom::VISIBILITY_GUARD)
            .map(|(c, q)| (c - q) / c)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Joint fit of cross- and parallel-polarised HOM data. Derived values are
/// the deconvolved `g2_cross_0`, `g2_parallel_0`, `visibility_0`, and the
/// `visibility_peak_convolved` seen through the instrument response.
pub fn fit_hom(
    cross: G2Data,
    parallel: G2Data,
    irf: &IrfParams,
    params: &ParamSet,
    opts: &FitOptions,
) -> Result<FitResult> {
    params.expect_names(&HOM_PARAMS)?;
    params.validate()?;
    let init = params.inits();
    for (name, i) in [("r1", 5), ("r2", 6)] {
        let s = &params.specs()[i];
        let (lo, hi) = if s.free { (s.lower, s.upper) } else { (s.init, s.init) };
        if !(lo > 0.0 && hi < 1.0) {
            return Err(Error::param("couplers", format!("`{name}` must stay inside (0, 1)")));
        }
    }
    let longest = init[0].max(init[1]);
    if cross.reach() < init[7] + 10.0 * longest {
        return Err(Error::param(
            "data",
            format!("must cover |τ| ≥ delay + 10·max(T1, T2) = {} ps", init[7] + 10.0 * longest),
        ));
    }
    let model = HomModel::new(cross, parallel, irf)?;
    let mut fit = run_fit(params, |p| model.residuals(p), opts)?;
    let p = fit.values();
    let (c0, q0) = HomModel::deconvolved(&p, 0.0);
    fit.derived.insert("g2_cross_0".into(), c0);
    fit.derived.insert("g2_parallel_0".into(), q0);
    fit.derived.insert("visibility_0".into(), (c0 - q0) / c0);
    fit.derived.insert(
        "visibility_peak_convolved".into(),
        model.convolved_visibility_peak(&p),
    );
    Ok(fit)
}
