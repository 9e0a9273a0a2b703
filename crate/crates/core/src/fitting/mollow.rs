use crate::error::{Error, Result};
use crate::tls::mollow_density;
use crate::units::Spectrum;

use super::{check_not_flat, run_fit, FitOptions, FitResult, ParamSet, ParamSpec};

pub const MOLLOW_PARAMS: [&str; 4] = ["gamma_sp_energy", "rabi_energy", "amplitude", "center"];

/// Below ħΩ = this × ħγ_sp the side peaks sit inside their own half-width
/// and the splitting is not identifiable.
pub const RESOLVED_SPLITTING: f64 = 1.5;

#[derive(Debug, Clone)]
pub struct MollowModel<'a> {
    spectrum: &'a Spectrum,
}

impl<'a> MollowModel<'a> {
    pub fn new(spectrum: &'a Spectrum) -> Self {
        MollowModel { spectrum }
    }

    pub fn predict(&self, p: &[f64]) -> Vec<f64> {
        self.spectrum
            .omegas()
            .map(|w| p[2] * mollow_density(w - p[3], p[0], p[1]))
            .collect()
    }

    pub fn residuals(&self, p: &[f64]) -> Vec<f64> {
        self.spectrum
            .density()
            .iter()
            .zip(self.predict(p))
            .map(|(d, m)| d - m)
            .collect()
    }

    /// Sum of squares at `p` (in [`MOLLOW_PARAMS`] order).
    pub fn residual(&self, p: &[f64]) -> f64 {
        self.residuals(p).iter().map(|r| r * r).sum()
    }
}

/// Starting values and bounds around guesses of ħγ_sp and ħΩ (µeV). The
/// amplitude starts at the spectrum's integral and the centre at zero.
pub fn mollow_params(spectrum: &Spectrum, gamma_sp_energy: f64, rabi_energy: f64) -> ParamSet {
    let area = spectrum.integral().abs().max(f64::MIN_POSITIVE);
    let span = spectrum.omega_step() * spectrum.len() as f64;
    ParamSet::new(vec![
        ParamSpec::free("gamma_sp_energy", gamma_sp_energy, 0.1 * gamma_sp_energy, 10.0 * gamma_sp_energy),
        ParamSpec::free("rabi_energy", rabi_energy, 0.0, 0.5 * span),
        ParamSpec::free("amplitude", area, 0.2 * area, 5.0 * area),
        ParamSpec::free("center", 0.0, -5.0 * gamma_sp_energy, 5.0 * gamma_sp_energy),
    ])
}

/// Fit the three-Lorentzian triplet. A splitting below
/// [`RESOLVED_SPLITTING`]·ħγ_sp is reported as
/// [`Error::TripletUnresolved`] instead of a value.
pub fn fit_mollow(spectrum: &Spectrum, params: &ParamSet, opts: &FitOptions) -> Result<FitResult> {
    params.expect_names(&MOLLOW_PARAMS)?;
    params.validate()?;
    check_not_flat(spectrum.density())?;
    let p0 = params.inits();
    let need = p0[1] + 5.0 * p0[0];
    let lo = spectrum.omega_start() - p0[3];
    let hi = lo + spectrum.omega_step() * (spectrum.len() as f64 - 1.0);
    if lo > -need || hi < need {
        return Err(Error::param(
            "spectrum",
            format!("must span ±(ħΩ + 5ħγ_sp) = ±{need} µeV around the centre"),
        ));
    }
    let model = MollowModel::new(spectrum);
    let fit = run_fit(params, |p| model.residuals(p), opts)?;
    let (gamma, rabi) = (fit.values()[0], fit.values()[1]);
    if rabi < RESOLVED_SPLITTING * gamma {
        return Err(Error::TripletUnresolved {
            rabi_energy: rabi,
            half_width: RESOLVED_SPLITTING * gamma,
        });
    }
    Ok(fit)
}
