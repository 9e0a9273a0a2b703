use crate::error::{Error, Result};
use crate::units::{check_unit_interval, CorrelationCurve};

/// Poissonian background with signal fraction ρ: 1 + ρ²(g² − 1).
pub fn mix_background(g2: f64, signal_fraction: f64) -> Result<f64> {
    check_unit_interval("signal_fraction", signal_fraction)?;
    Ok(1.0 + signal_fraction * signal_fraction * (g2 - 1.0))
}

/// Remove the background contribution; needs ρ > 0.
pub fn unmix_background(g2_measured: f64, signal_fraction: f64) -> Result<f64> {
    check_unit_interval("signal_fraction", signal_fraction)?;
    if signal_fraction == 0.0 {
        return Err(Error::param(
            "signal_fraction",
            "cannot remove background from a background-only signal",
        ));
    }
    Ok(1.0 + (g2_measured - 1.0) / (signal_fraction * signal_fraction))
}

pub fn mix_background_curve(curve: &CorrelationCurve, signal_fraction: f64) -> Result<CorrelationCurve> {
    check_unit_interval("signal_fraction", signal_fraction)?;
    let r2 = signal_fraction * signal_fraction;
    let values = curve.values().iter().map(|g| 1.0 + r2 * (g - 1.0)).collect();
    CorrelationCurve::new(curve.tau_start(), curve.tau_step(), values)
}

/// Fails if the corrected curve would go negative; the input then carries
/// more background than `signal_fraction` implies.
pub fn unmix_background_curve(curve: &CorrelationCurve, signal_fraction: f64) -> Result<CorrelationCurve> {
    let values = curve
        .values()
        .iter()
        .map(|&g| unmix_background(g, signal_fraction))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = values.iter().position(|&v| v < 0.0) {
        return Err(Error::param(
            "signal_fraction",
            format!(
                "background removal gives negative g2 = {:.4} at tau = {} ps",
                values[i],
                curve.tau(i)
            ),
        ));
    }
    CorrelationCurve::new(curve.tau_start(), curve.tau_step(), values)
}
