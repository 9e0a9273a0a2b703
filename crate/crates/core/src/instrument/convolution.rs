use crate::error::{Error, Result};
use crate::units::{CorrelationCurve, IrfParams};

/// Kernel support in standard deviations on each side.
pub const KERNEL_SIGMAS: f64 = 5.0;
/// Allowed deviation of the outer kernel half-width from the edge value.
pub const EDGE_FLATNESS: f64 = 1e-4;

/// Normalised Gaussian taps on a grid of spacing `step`, truncated at ±5σ.
/// The centre tap is at index `len / 2`.
pub fn gaussian_kernel(step: f64, fwhm: f64) -> Vec<f64> {
    let sigma = fwhm / crate::units::FWHM_PER_SIGMA;
    let half = (KERNEL_SIGMAS * sigma / step).ceil() as isize;
    let mut taps: Vec<f64> = (-half..=half)
        .map(|k| {
            let x = k as f64 * step / sigma;
            (-0.5 * x * x).exp()
        })
        .collect();
    let norm: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= norm);
    taps
}

/// Convolve uniformly sampled `values` with a Gaussian, holding the edge
/// values constant beyond the ends. No sampling or flatness checks.
pub fn smear(values: &[f64], step: f64, fwhm: f64) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let taps = gaussian_kernel(step, fwhm);
    let half = (taps.len() / 2) as isize;
    let last = values.len() as isize - 1;
    (0..values.len() as isize)
        .map(|i| {
            taps.iter()
                .enumerate()
                .map(|(k, w)| {
                    let j = (i + k as isize - half).clamp(0, last);
                    w * values[j as usize]
                })
                .sum()
        })
        .collect()
}

/// Blur a correlation curve with the instrument response.
///
/// Requires step ≤ FWHM/8 and curve ends that are flat over the kernel
/// support; the output shares the input grid.
pub fn convolve_irf(curve: &CorrelationCurve, irf: &IrfParams) -> Result<CorrelationCurve> {
    let limit = irf.fwhm() / 8.0;
    if curve.tau_step() > limit * (1.0 + 1e-12) {
        return Err(Error::Undersampled {
            step: curve.tau_step(),
            limit,
        });
    }
    let values = curve.values();
    if values.is_empty() {
        return Ok(curve.clone());
    }
    let reach = ((KERNEL_SIGMAS * irf.sigma() / curve.tau_step()).ceil() as usize + 1).min(values.len());
    let deviation = |edge: f64, window: &[f64]| {
        window.iter().map(|v| (v - edge).abs()).fold(0.0, f64::max) / edge.abs().max(1.0)
    };
    let left = deviation(values[0], &values[..reach]);
    if left > EDGE_FLATNESS {
        return Err(Error::EdgesNotFlat {
            edge: "leading",
            deviation: left,
        });
    }
    let n = values.len();
    let right = deviation(values[n - 1], &values[n - reach..]);
    if right > EDGE_FLATNESS {
        return Err(Error::EdgesNotFlat {
            edge: "trailing",
            deviation: right,
        });
    }
    let smeared = smear(values, curve.tau_step(), irf.fwhm())
        .into_iter()
        .map(|v| v.max(0.0))
        .collect();
    CorrelationCurve::new(curve.tau_start(), curve.tau_step(), smeared)
}
