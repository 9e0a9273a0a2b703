use crate::error::{Error, Result};
use crate::instrument::{gaussian_kernel, mix_background, smear, Histogram};
use crate::tls::G2Coefficients;
use crate::units::{CorrelationCurve, DriveParams, EmitterParams, IrfParams, HBAR_UEV_PS};

use super::{check_not_flat, run_fit, FitOptions, FitResult, ParamSet, ParamSpec};

pub const G2_PARAMS: [&str; 5] = ["t1", "t2", "rabi_energy", "rho", "amplitude"];

/// Target spacing of the internal model grid, ps.
const FINE_STEP: f64 = 20.0;

#[derive(Debug, Clone, Copy)]
pub enum G2Data<'a> {
    /// Raw coincidence counts; fitted with Poisson weights 1/max(count, 1).
    Histogram(&'a Histogram),
    /// Normalised samples; fitted with uniform weights.
    Curve(&'a CorrelationCurve),
}

impl G2Data<'_> {
    fn layout(&self) -> (f64, f64, usize) {
        match self {
            G2Data::Histogram(h) => (h.bin_start, h.bin_width, h.len()),
            G2Data::Curve(c) => (c.tau_start(), c.tau_step(), c.len()),
        }
    }

    pub(crate) fn same_layout(&self, other: &G2Data) -> bool {
        let (a, b) = (self.layout(), other.layout());
        let kind = matches!(
            (self, other),
            (G2Data::Histogram(_), G2Data::Histogram(_)) | (G2Data::Curve(_), G2Data::Curve(_))
        );
        kind && a.2 == b.2 && (a.0 - b.0).abs() <= 1e-9 * a.1 && (a.1 - b.1).abs() <= 1e-12 * a.1
    }

    /// Largest |τ| covered by the data.
    pub(crate) fn reach(&self) -> f64 {
        let (start, step, len) = self.layout();
        start.abs().max((start + step * len as f64).abs())
    }
}

/// Data samples with weights and the fine grid the model is evaluated on.
///
/// Point samples read the fine grid directly; histogram bins average the
/// fine samples at the bin's sub-interval midpoints.
#[derive(Debug, Clone)]
pub(crate) struct Sampling {
    pub data: Vec<f64>,
    pub sqrt_weights: Vec<f64>,
    /// Multiplies the normalised model to give data units.
    pub scale: f64,
    pub fine_start: f64,
    pub fine_step: f64,
    pub fine_len: usize,
    sub: usize,
    margin: usize,
    averaged: bool,
    pub fwhm: f64,
}

impl Sampling {
    pub fn new(data: &G2Data, irf: &IrfParams) -> Result<Self> {
        let (_, step, len) = data.layout();
        if len < 3 {
            return Err(Error::param("data", "need at least three samples"));
        }
        let target = FINE_STEP.min(irf.fwhm() / 10.0);
        let sub = (step / target).ceil().max(1.0) as usize;
        let fine_step = step / sub as f64;
        let margin = (5.0 * irf.sigma() / fine_step).ceil() as usize + 1;
        let (values, sqrt_weights, scale, origin, averaged) = match data {
            G2Data::Histogram(h) => {
                let values: Vec<f64> = h.counts.iter().map(|&c| c as f64).collect();
                let w = h.counts.iter().map(|&c| 1.0 / (c.max(1) as f64).sqrt()).collect();
                let scale = match h.normalization {
                    Some(n) => n,
                    None => tail_level(&values),
                };
                (values, w, scale, h.bin_start + 0.5 * fine_step, true)
            }
            G2Data::Curve(c) => (c.values().to_vec(), vec![1.0; len], 1.0, c.tau_start(), false),
        };
        check_not_flat(&values)?;
        if !(scale > 0.0) {
            return Err(Error::DegenerateData("histogram has no counts in its tails".into()));
        }
        Ok(Sampling {
            data: values,
            sqrt_weights,
            scale,
            fine_start: origin - margin as f64 * fine_step,
            fine_step,
            fine_len: 2 * margin + len * sub,
            sub,
            margin,
            averaged,
            fwhm: irf.fwhm(),
        })
    }

    pub fn fine_tau(&self, i: usize) -> f64 {
        self.fine_start + i as f64 * self.fine_step
    }

    pub fn blur(&self, fine: &[f64]) -> Vec<f64> {
        smear(fine, self.fine_step, self.fwhm)
    }

    /// Reduce a fine-grid model to one value per data sample.
    pub fn sample(&self, fine: &[f64]) -> Vec<f64> {
        (0..self.data.len())
            .map(|i| {
                let first = self.margin + i * self.sub;
                if self.averaged {
                    fine[first..first + self.sub].iter().sum::<f64>() / self.sub as f64
                } else {
                    fine[first]
                }
            })
            .collect()
    }

    pub fn weighted_residuals(&self, model: &[f64], amplitude: f64) -> Vec<f64> {
        let k = amplitude * self.scale;
        self.data
            .iter()
            .zip(model)
            .zip(&self.sqrt_weights)
            .map(|((d, m), w)| (d - k * m) * w)
            .collect()
    }

    /// `f` blurred by the instrument response at a single delay.
    pub fn blurred_at(&self, tau: f64, f: impl Fn(f64) -> f64) -> f64 {
        let taps = gaussian_kernel(self.fine_step, self.fwhm);
        let half = (taps.len() / 2) as f64;
        taps.iter()
            .enumerate()
            .map(|(k, w)| w * f(tau + (k as f64 - half) * self.fine_step))
            .sum()
    }
}

/// Mean of the outer fifth of the samples on each side.
fn tail_level(values: &[f64]) -> f64 {
    let n = (values.len() / 5).max(1);
    let tails: Vec<f64> = values[..n].iter().chain(&values[values.len() - n..]).copied().collect();
    tails.iter().sum::<f64>() / tails.len() as f64
}

/// Measured intensity correlation: amplitude × background-mixed g²
/// blurred by the instrument response.
#[derive(Debug, Clone)]
pub struct G2Model {
    sampling: Sampling,
}

impl G2Model {
    pub fn new(data: G2Data, irf: &IrfParams) -> Result<Self> {
        Ok(G2Model {
            sampling: Sampling::new(&data, irf)?,
        })
    }

    /// T1 and T2 fixed at the given emitter; ħΩ, ρ and amplitude free.
    pub fn default_params(emitter: &EmitterParams, drive: &DriveParams) -> ParamSet {
        ParamSet::new(vec![
            ParamSpec::fixed("t1", emitter.t1()),
            ParamSpec::fixed("t2", emitter.t2()),
            ParamSpec::free("rabi_energy", drive.rabi_energy().clamp(0.01, 20.0), 0.01, 20.0),
            ParamSpec::free("rho", 0.9, 0.05, 1.0),
            ParamSpec::free("amplitude", 1.0, 0.5, 2.0),
        ])
    }

    fn coefficients(p: &[f64]) -> G2Coefficients {
        G2Coefficients::from_rates(1.0 / p[0], 2.0 / p[1], p[2] / HBAR_UEV_PS)
    }

    /// Background-mixed g² before the instrument response.
    pub fn deconvolved(p: &[f64], tau: f64) -> f64 {
        let c = Self::coefficients(p);
        mix(c.g2(tau), p[3])
    }

    /// Normalised model at every data sample (amplitude excluded).
    pub fn predict(&self, p: &[f64]) -> Vec<f64> {
        let s = &self.sampling;
        let c = Self::coefficients(p);
        let fine: Vec<f64> = (0..s.fine_len).map(|i| mix(c.g2(s.fine_tau(i)), p[3])).collect();
        s.sample(&s.blur(&fine))
    }

    pub fn residuals(&self, p: &[f64]) -> Vec<f64> {
        self.sampling.weighted_residuals(&self.predict(p), p[4])
    }

    /// Weighted sum of squares at `p` (in [`G2_PARAMS`] order).
    pub fn residual(&self, p: &[f64]) -> f64 {
        self.residuals(p).iter().map(|r| r * r).sum()
    }

    pub fn convolved_at(&self, p: &[f64], tau: f64) -> f64 {
        let c = Self::coefficients(p);
        self.sampling.blurred_at(tau, |t| mix(c.g2(t), p[3]))
    }
}

fn mix(g2: f64, rho: f64) -> f64 {
    // ρ is bounded to [0, 1] by the parameter box.
    mix_background(g2, rho.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
}

/// Fit intensity-correlation data. Derived values: `g2_0_ideal` (emitter
/// alone), `g2_0_deconvolved` (with background, before the instrument
/// response) and `g2_0_convolved`.
pub fn fit_g2(data: G2Data, irf: &IrfParams, params: &ParamSet, opts: &FitOptions) -> Result<FitResult> {
    params.expect_names(&G2_PARAMS)?;
    params.validate()?;
    if params.specs()[..3].iter().all(|s| s.free) {
        return Err(Error::param(
            "free",
            "t1, t2 and rabi_energy cannot all be free: g² depends on them only through \
             1/T1 + 1/T2 and 1/(T1 T2) + Ω²",
        ));
    }
    let init = params.inits();
    let longest = init[0].max(init[1]);
    if data.reach() < 10.0 * longest {
        return Err(Error::param(
            "data",
            format!(
                "covers |τ| ≤ {} ps, need at least 10·max(T1, T2) = {} ps",
                data.reach(),
                10.0 * longest
            ),
        ));
    }
    let model = G2Model::new(data, irf)?;
    let mut fit = run_fit(params, |p| model.residuals(p), opts)?;
    let p = fit.values();
    fit.derived.insert("g2_0_ideal".into(), G2Model::coefficients(&p).g2(0.0));
    fit.derived.insert("g2_0_deconvolved".into(), G2Model::deconvolved(&p, 0.0));
    fit.derived.insert("g2_0_convolved".into(), model.convolved_at(&p, 0.0));
    Ok(fit)
}
