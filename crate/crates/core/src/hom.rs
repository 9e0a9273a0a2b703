//! Two-photon interference in an unbalanced fiber Mach-Zehnder.
//!
//! The coupler coefficients here are intensity reflectivities and
//! transmissivities, not emitter times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{check_positive, CorrelationCurve, EmitterParams, Grid, InterferometerParams};

/// Below this cross-polarised value the visibility is reported undefined.
pub const VISIBILITY_GUARD: f64 = 1e-9;

/// Orthogonal-polarisation coincidences:
/// 4(T₁²+R₁²)R₂T₂ g²(τ) + 4R₁T₁[T₂² g²(τ−Δτ) + R₂² g²(τ+Δτ)].
pub fn g2_cross<F>(tau: f64, base_g2: F, ifo: &InterferometerParams) -> f64
where
    F: Fn(f64) -> f64,
{
    let same_arm = 4.0 * (ifo.t1c * ifo.t1c + ifo.r1 * ifo.r1) * ifo.r2 * ifo.t2c;
    let cross_arm = 4.0 * ifo.r1 * ifo.t1c;
    same_arm * base_g2(tau)
        + cross_arm
            * (ifo.t2c * ifo.t2c * base_g2(tau - ifo.delay)
                + ifo.r2 * ifo.r2 * base_g2(tau + ifo.delay))
}

/// Coincidence suppression 1 − V e^{−γ|τ|}, γ = 2/T2.
pub fn overlap_factor(tau: f64, overlap: f64, emitter: &EmitterParams) -> f64 {
    1.0 - overlap * (-emitter.gamma() * tau.abs()).exp()
}

/// Parallel-polarisation coincidences: the whole cross expression times
/// the overlap factor.
pub fn g2_parallel<F>(tau: f64, base_g2: F, ifo: &InterferometerParams, emitter: &EmitterParams) -> f64
where
    F: Fn(f64) -> f64,
{
    g2_cross(tau, base_g2, ifo) * overlap_factor(tau, ifo.overlap, emitter)
}

/// Large-|τ| value of [`g2_cross`] when g² → 1; equals one for balanced couplers.
pub fn cross_asymptote(ifo: &InterferometerParams) -> f64 {
    4.0 * (ifo.t1c * ifo.t1c + ifo.r1 * ifo.r1) * ifo.r2 * ifo.t2c
        + 4.0 * ifo.r1 * ifo.t1c * (ifo.t2c * ifo.t2c + ifo.r2 * ifo.r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    Orthogonal,
    Parallel,
}

/// Sample the HOM correlation on `grid`. With `renormalize` the curve is
/// divided by [`cross_asymptote`].
pub fn hom_curve<F>(
    polarization: Polarization,
    base_g2: F,
    ifo: &InterferometerParams,
    emitter: &EmitterParams,
    grid: Grid,
    renormalize: bool,
) -> Result<CorrelationCurve>
where
    F: Fn(f64) -> f64,
{
    ifo.validate()?;
    let scale = if renormalize { 1.0 / cross_asymptote(ifo) } else { 1.0 };
    let values = grid
        .points()
        .map(|t| {
            let v = match polarization {
                Polarization::Orthogonal => g2_cross(t, &base_g2, ifo),
                Polarization::Parallel => g2_parallel(t, &base_g2, ifo, emitter),
            };
            (v * scale).max(0.0)
        })
        .collect();
    CorrelationCurve::new(grid.start, grid.step, values)
}

/// Visibility samples; `None` where the cross curve is too small to divide by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityCurve {
    pub tau_start: f64,
    pub tau_step: f64,
    pub values: Vec<Option<f64>>,
}

impl VisibilityCurve {
    pub fn tau(&self, i: usize) -> f64 {
        self.tau_start + i as f64 * self.tau_step
    }

    pub fn value_at(&self, tau: f64) -> Option<f64> {
        let x = ((tau - self.tau_start) / self.tau_step).round();
        if x < 0.0 || x as usize >= self.values.len() {
            return None;
        }
        self.values[x as usize]
    }

    /// Largest defined value and its delay.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (self.tau(i), v)))
            .fold(None, |best: Option<(f64, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
    }
}

/// V(τ) = (g²⊥ − g²∥)/g²⊥ element-wise.
pub fn visibility(cross: &CorrelationCurve, parallel: &CorrelationCurve) -> Result<VisibilityCurve> {
    if !cross.same_grid(parallel) {
        return Err(Error::GridMismatch(format!(
            "cross curve ({} points from {} ps, step {} ps) vs parallel curve ({} points from {} ps, step {} ps)",
            cross.len(),
            cross.tau_start(),
            cross.tau_step(),
            parallel.len(),
            parallel.tau_start(),
            parallel.tau_step()
        )));
    }
    let values = cross
        .values()
        .iter()
        .zip(parallel.values())
        .map(|(&c, &p)| (c >= VISIBILITY_GUARD).then(|| (c - p) / c))
        .collect();
    Ok(VisibilityCurve {
        tau_start: cross.tau_start(),
        tau_step: cross.tau_step(),
        values,
    })
}

/// Upper bound T2/(2δt) on cw HOM visibility seen through a detector response δt.
pub fn max_cw_visibility(t2_ps: f64, detector_response_ps: f64) -> Result<f64> {
    check_positive("t2", t2_ps)?;
    if !(detector_response_ps >= 0.0) {
        return Err(Error::param(
            "detector_response",
            format!("must be non-negative, got {detector_response_ps}"),
        ));
    }
    if detector_response_ps == 0.0 {
        return Ok(1.0);
    }
    Ok((t2_ps / (2.0 * detector_response_ps)).min(1.0))
}
