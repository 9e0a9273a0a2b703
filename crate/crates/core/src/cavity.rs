//! Weak-coupling micropillar model: mode linewidth and the Purcell-shortened
//! radiative lifetime as a function of emitter-mode detuning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::check_positive;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub q_factor: f64,
    /// µeV
    pub mode_energy: f64,
    /// Mode FWHM, µeV. Always `mode_energy / q_factor`.
    pub kappa: f64,
    /// Effective enhancement at zero detuning.
    pub f_eff: f64,
    /// Lifetime far from the mode, ps.
    pub t1_off: f64,
}

impl CavityParams {
    pub fn new(mode_energy: f64, q_factor: f64, f_eff: f64, t1_off: f64) -> Result<Self> {
        let kappa = cavity_linewidth(mode_energy, q_factor)?;
        Self::validated(CavityParams {
            q_factor,
            mode_energy,
            kappa,
            f_eff,
            t1_off,
        })
    }

    /// Build from a mode linewidth instead of a quality factor.
    pub fn from_linewidth(mode_energy: f64, kappa: f64, f_eff: f64, t1_off: f64) -> Result<Self> {
        check_positive("mode_energy", mode_energy)?;
        check_positive("kappa", kappa)?;
        Self::validated(CavityParams {
            q_factor: mode_energy / kappa,
            mode_energy,
            kappa,
            f_eff,
            t1_off,
        })
    }

    fn validated(c: CavityParams) -> Result<Self> {
        if !(c.f_eff >= 0.0) || !c.f_eff.is_finite() {
            return Err(Error::param("f_eff", format!("must be non-negative, got {}", c.f_eff)));
        }
        check_positive("t1_off", c.t1_off)?;
        Ok(c)
    }

    /// Far-detuned over on-resonance lifetime, 1 + f_eff.
    pub fn purcell_factor(&self) -> f64 {
        1.0 + self.f_eff
    }

    /// T1(Δ_far) / T1(Δ_near).
    pub fn lifetime_ratio(&self, near: f64, far: f64) -> f64 {
        purcell_lifetime(far, self) / purcell_lifetime(near, self)
    }
}

/// κ = E/Q.
pub fn cavity_linewidth(mode_energy: f64, q_factor: f64) -> Result<f64> {
    check_positive("mode_energy", mode_energy)?;
    if !(q_factor > 0.0) {
        return Err(Error::param("q_factor", format!("must be positive, got {q_factor}")));
    }
    Ok(mode_energy / q_factor)
}

/// Lorentzian weight (κ/2)² / ((κ/2)² + Δ²), equal to one on resonance.
pub fn mode_overlap(detuning: f64, kappa: f64) -> f64 {
    let hw2 = 0.25 * kappa * kappa;
    hw2 / (hw2 + detuning * detuning)
}

pub fn lifetime_with(detuning: f64, kappa: f64, f_eff: f64, t1_off: f64) -> f64 {
    t1_off / (1.0 + f_eff * mode_overlap(detuning, kappa))
}

/// T1(Δ) = t1_off / (1 + f_eff L(Δ)).
pub fn purcell_lifetime(detuning: f64, cavity: &CavityParams) -> f64 {
    lifetime_with(detuning, cavity.kappa, cavity.f_eff, cavity.t1_off)
}

/// Exact (f_eff, t1_off) through two (detuning, lifetime) points at fixed κ.
pub fn two_point_solve(kappa: f64, a: (f64, f64), b: (f64, f64)) -> Result<(f64, f64)> {
    check_positive("kappa", kappa)?;
    check_positive("lifetime", a.1)?;
    check_positive("lifetime", b.1)?;
    let la = mode_overlap(a.0, kappa);
    let lb = mode_overlap(b.0, kappa);
    // t_a (1 + f la) = t_b (1 + f lb)
    let denom = a.1 * la - b.1 * lb;
    if denom.abs() < 1e-12 * (a.1 + b.1) {
        return Err(Error::DegenerateData(
            "points do not constrain the enhancement (equal mode overlap)".into(),
        ));
    }
    let f_eff = (b.1 - a.1) / denom;
    if f_eff < 0.0 {
        return Err(Error::DegenerateData(format!(
            "lifetimes imply a negative enhancement ({f_eff:.4})"
        )));
    }
    Ok((f_eff, a.1 * (1.0 + f_eff * la)))
}

/// Saturated photon rate 1/T1, in GHz.
pub fn max_photon_rate(t1_ps: f64) -> Result<f64> {
    check_positive("t1", t1_ps)?;
    Ok(1e3 / t1_ps)
}
