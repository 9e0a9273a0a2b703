//! Forward-model least squares.
//!
//! A "deconvolved" quantity is always read off the fitted model before the
//! instrument response is applied; data are never inverse filtered.

mod g2;
mod hom;
mod mollow;
mod purcell;
mod simplex;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use g2::{fit_g2, G2Data, G2Model, G2_PARAMS};
pub use hom::{fit_hom, HomModel, HOM_PARAMS};
pub use mollow::{fit_mollow, mollow_params, MollowModel, MOLLOW_PARAMS, RESOLVED_SPLITTING};
pub use purcell::{fit_purcell, purcell_residual, Kappa, LifetimePoint, PURCELL_PARAMS};

/// One model parameter: starting value, box bounds and whether it is varied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub init: f64,
    pub lower: f64,
    pub upper: f64,
    pub free: bool,
}

impl ParamSpec {
    pub fn free(name: &str, init: f64, lower: f64, upper: f64) -> Self {
        ParamSpec {
            name: name.to_string(),
            init,
            lower,
            upper,
            free: true,
        }
    }

    pub fn fixed(name: &str, value: f64) -> Self {
        ParamSpec {
            name: name.to_string(),
            init: value,
            lower: value,
            upper: value,
            free: false,
        }
    }
}

/// Ordered parameter list of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    specs: Vec<ParamSpec>,
}

impl ParamSet {
    pub fn new(specs: Vec<ParamSpec>) -> Self {
        ParamSet { specs }
    }

    pub fn specs(&self) -> &[ParamSpec] {
        &self.specs
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.specs.iter().map(|s| s.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&ParamSpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut ParamSpec> {
        self.specs
            .iter_mut()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::param("parameter", format!("unknown parameter `{name}`")))
    }

    pub fn set_init(&mut self, name: &str, value: f64) -> Result<&mut Self> {
        let s = self.get_mut(name)?;
        s.init = value;
        if !s.free {
            s.lower = value;
            s.upper = value;
        }
        Ok(self)
    }

    pub fn set_bounds(&mut self, name: &str, lower: f64, upper: f64) -> Result<&mut Self> {
        let s = self.get_mut(name)?;
        s.lower = lower;
        s.upper = upper;
        Ok(self)
    }

    /// Free or fix a parameter. Fixing pins it at its initial value.
    pub fn set_free(&mut self, name: &str, free: bool) -> Result<&mut Self> {
        let s = self.get_mut(name)?;
        s.free = free;
        Ok(self)
    }

    pub fn inits(&self) -> Vec<f64> {
        self.specs.iter().map(|s| s.init).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.specs {
            if !s.init.is_finite() {
                return Err(Error::param("init", format!("`{}` is not finite", s.name)));
            }
            if s.free {
                if !(s.lower.is_finite() && s.upper.is_finite() && s.lower < s.upper) {
                    return Err(Error::param(
                        "bounds",
                        format!("`{}` needs finite bounds with lower < upper", s.name),
                    ));
                }
                if !(s.lower..=s.upper).contains(&s.init) {
                    return Err(Error::param(
                        "init",
                        format!("`{}` = {} outside [{}, {}]", s.name, s.init, s.lower, s.upper),
                    ));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn expect_names(&self, names: &[&str]) -> Result<()> {
        let have: Vec<&str> = self.names().collect();
        if have != names {
            return Err(Error::param(
                "parameters",
                format!("expected {names:?}, got {have:?}"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Objective evaluation budget.
    pub max_evaluations: usize,
    /// Relative spread of simplex values at which a descent stops.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_evaluations: 20_000,
            tolerance: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    /// One standard deviation from the curvature at the optimum.
    pub uncertainty: Option<f64>,
    pub free: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameters: Vec<FitParameter>,
    /// Weighted sum of squared residuals at the returned parameters.
    pub residual: f64,
    pub data_points: usize,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Over the free parameters, in parameter order.
    pub covariance: Option<Vec<Vec<f64>>>,
    /// Quantities computed from the fitted model.
    pub derived: BTreeMap<String, f64>,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn uncertainty(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.name == name).and_then(|p| p.uncertainty)
    }

    pub fn values(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p.value).collect()
    }

    pub fn derived(&self, name: &str) -> Option<f64> {
        self.derived.get(name).copied()
    }

    /// Plain-text table of parameters, residual and convergence.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "converged\t{}", self.converged);
        let _ = writeln!(s, "iterations\t{}", self.iterations);
        let _ = writeln!(s, "evaluations\t{}", self.evaluations);
        let _ = writeln!(s, "residual\t{:e}", self.residual);
        let _ = writeln!(s, "data_points\t{}", self.data_points);
        let _ = writeln!(s);
        let _ = writeln!(s, "parameter\tvalue\tuncertainty\tstatus");
        for p in &self.parameters {
            let unc = p.uncertainty.map_or("-".to_string(), |u| format!("{u:e}"));
            let status = if p.free { "free" } else { "fixed" };
            let _ = writeln!(s, "{}\t{}\t{}\t{}", p.name, p.value, unc, status);
        }
        if !self.derived.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "derived\tvalue");
            for (k, v) in &self.derived {
                let _ = writeln!(s, "{k}\t{v}");
            }
        }
        s
    }
}

/// Minimise Σ r² of `residuals`, a map from the full parameter vector to
/// weighted residuals, over the free parameters of `params`.
pub(crate) fn run_fit<R>(params: &ParamSet, residuals: R, opts: &FitOptions) -> Result<FitResult>
where
    R: Fn(&[f64]) -> Vec<f64>,
{
    params.validate()?;
    if opts.max_evaluations == 0 {
        return Err(Error::param("max_evaluations", "must be positive"));
    }
    let specs = params.specs();
    let free: Vec<usize> = (0..specs.len()).filter(|&i| specs[i].free).collect();
    let base = params.inits();

    let to_physical = |u: &[f64]| -> Vec<f64> {
        let mut p = base.clone();
        for (k, &i) in free.iter().enumerate() {
            p[i] = specs[i].lower + u[k] * (specs[i].upper - specs[i].lower);
        }
        p
    };
    let objective = |u: &[f64]| -> f64 { residuals(&to_physical(u)).iter().map(|r| r * r).sum() };

    let u0: Vec<f64> = free
        .iter()
        .map(|&i| (specs[i].init - specs[i].lower) / (specs[i].upper - specs[i].lower))
        .collect();
    let min = simplex::minimize(
        objective,
        &u0,
        &simplex::SimplexOptions {
            max_evaluations: opts.max_evaluations,
            x_tolerance: 1e-11,
            f_tolerance: opts.tolerance,
            initial_step: 0.3,
            max_restarts: 3,
        },
    );

    let best = to_physical(&min.x);
    let r = residuals(&best);
    let residual: f64 = r.iter().map(|x| x * x).sum();
    let covariance = covariance(&residuals, &best, &free, specs, &r, residual);

    let parameters = specs
        .iter()
        .enumerate()
        .map(|(i, s)| FitParameter {
            name: s.name.clone(),
            value: best[i],
            uncertainty: free
                .iter()
                .position(|&f| f == i)
                .and_then(|k| covariance.as_ref().map(|c| c[k][k]))
                .filter(|v| *v >= 0.0)
                .map(f64::sqrt),
            free: s.free,
        })
        .collect();

    Ok(FitResult {
        parameters,
        residual,
        data_points: r.len(),
        iterations: min.iterations,
        evaluations: min.evaluations,
        converged: min.converged,
        covariance,
        derived: BTreeMap::new(),
    })
}

/// s² (JᵀJ)⁻¹ from a central-difference Jacobian, s² = residual/(m − k).
fn covariance<R>(
    residuals: &R,
    best: &[f64],
    free: &[usize],
    specs: &[ParamSpec],
    r0: &[f64],
    residual: f64,
) -> Option<Vec<Vec<f64>>>
where
    R: Fn(&[f64]) -> Vec<f64>,
{
    let (m, k) = (r0.len(), free.len());
    if k == 0 || m <= k {
        return None;
    }
    let mut jac = DMatrix::<f64>::zeros(m, k);
    for (c, &i) in free.iter().enumerate() {
        let s = &specs[i];
        let h = 1e-6 * (s.upper - s.lower);
        let lo = (best[i] - h).max(s.lower);
        let hi = (best[i] + h).min(s.upper);
        let mut p = best.to_vec();
        p[i] = hi;
        let rh = residuals(&p);
        p[i] = lo;
        let rl = residuals(&p);
        for row in 0..m {
            jac[(row, c)] = (rh[row] - rl[row]) / (hi - lo);
        }
    }
    let s2 = residual / (m - k) as f64;
    let inv = (jac.transpose() * &jac).try_inverse()?;
    Some((0..k).map(|a| (0..k).map(|b| s2 * inv[(a, b)]).collect()).collect())
}

/// Reject data with no variation.
pub(crate) fn check_not_flat(values: &[f64]) -> Result<()> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if values.is_empty() || !(hi - lo > 1e-12 * hi.abs().max(lo.abs())) {
        return Err(Error::DegenerateData("data are flat".into()));
    }
    Ok(())
}
