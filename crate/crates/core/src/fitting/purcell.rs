use serde::{Deserialize, Serialize};

use crate::cavity::{lifetime_with, two_point_solve};
use crate::error::{Error, Result};
use crate::units::check_positive;

use super::{run_fit, FitOptions, FitResult, ParamSet, ParamSpec};

pub const PURCELL_PARAMS: [&str; 3] = ["f_eff", "t1_off", "kappa"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifetimePoint {
    /// µeV
    pub detuning: f64,
    /// ps
    pub lifetime: f64,
    /// ps, one standard deviation
    pub uncertainty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kappa {
    Fixed(f64),
    Free { init: f64, lower: f64, upper: f64 },
}

/// χ² of the lifetime model at `p` = (f_eff, t1_off, κ).
pub fn purcell_residual(points: &[LifetimePoint], p: &[f64]) -> f64 {
    residuals(points, p).iter().map(|r| r * r).sum()
}

fn residuals(points: &[LifetimePoint], p: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|q| (q.lifetime - lifetime_with(q.detuning, p[2], p[0], p[1])) / q.uncertainty)
        .collect()
}

/// Starting (f_eff, t1_off) from the points nearest and farthest from resonance.
fn two_point_guess(points: &[LifetimePoint], kappa: f64) -> (f64, f64) {
    let near = points
        .iter()
        .min_by(|a, b| a.detuning.abs().total_cmp(&b.detuning.abs()))
        .expect("non-empty");
    let far = points
        .iter()
        .max_by(|a, b| a.detuning.abs().total_cmp(&b.detuning.abs()))
        .expect("non-empty");
    two_point_solve(kappa, (near.detuning, near.lifetime), (far.detuning, far.lifetime))
        .unwrap_or((10.0, far.lifetime))
}

/// Fit T1(Δ) = t1_off/(1 + f_eff L(Δ; κ)).
///
/// Two points with a fixed κ are solved exactly; otherwise at least three
/// points are needed. Derived: `purcell_factor` = 1 + f_eff and
/// `enhancement_ratio` = T1 at the largest |Δ| over T1 at the smallest.
pub fn fit_purcell(points: &[LifetimePoint], kappa: Kappa, opts: &FitOptions) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::param("points", "need at least two (detuning, lifetime) points"));
    }
    for q in points {
        check_positive("lifetime", q.lifetime)?;
        check_positive("uncertainty", q.uncertainty)?;
        if !q.detuning.is_finite() {
            return Err(Error::param("detuning", "must be finite"));
        }
    }

    let mut fit = match kappa {
        Kappa::Fixed(k) if points.len() == 2 => {
            check_positive("kappa", k)?;
            let a = (points[0].detuning, points[0].lifetime);
            let b = (points[1].detuning, points[1].lifetime);
            let (f, t) = two_point_solve(k, a, b)?;
            let params = ParamSet::new(vec![
                ParamSpec::fixed("f_eff", f),
                ParamSpec::fixed("t1_off", t),
                ParamSpec::fixed("kappa", k),
            ]);
            run_fit(&params, |p| residuals(points, p), opts)?
        }
        Kappa::Free { .. } if points.len() < 3 => {
            return Err(Error::param("points", "a free κ needs at least three points"));
        }
        _ => {
            let (kappa_spec, k0) = match kappa {
                Kappa::Fixed(k) => {
                    check_positive("kappa", k)?;
                    (ParamSpec::fixed("kappa", k), k)
                }
                Kappa::Free { init, lower, upper } => (ParamSpec::free("kappa", init, lower, upper), init),
            };
            let (f0, t0) = two_point_guess(points, k0);
            let params = ParamSet::new(vec![
                ParamSpec::free("f_eff", f0, 0.0, 10.0 * (f0 + 1.0)),
                ParamSpec::free("t1_off", t0, 0.2 * t0, 5.0 * t0),
                kappa_spec,
            ]);
            run_fit(&params, |p| residuals(points, p), opts)?
        }
    };

    let p = fit.values();
    let near = points.iter().map(|q| q.detuning.abs()).fold(f64::INFINITY, f64::min);
    let far = points.iter().map(|q| q.detuning.abs()).fold(0.0, f64::max);
    fit.derived.insert("purcell_factor".into(), 1.0 + p[0]);
    fit.derived.insert(
        "enhancement_ratio".into(),
        lifetime_with(far, p[2], p[0], p[1]) / lifetime_with(near, p[2], p[0], p[1]),
    );
    Ok(fit)
}
