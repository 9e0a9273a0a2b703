//! Physical constants, unit conversions and the shared value types.
//!
//! Internal units are fixed throughout the crate: time in picoseconds,
//! energy in micro-electronvolts, rates in inverse picoseconds.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in µeV·ps.
pub const HBAR_UEV_PS: f64 = 658.2119569;
/// Planck constant in µeV/GHz.
pub const PLANCK_UEV_PER_GHZ: f64 = 4.135667696;

/// Relative slack allowed on the physical bound T2 <= 2 T1.
pub const FOURIER_LIMIT_TOLERANCE: f64 = 1e-9;

/// Photon energy (µeV) to frequency (GHz).
pub fn energy_to_frequency(energy_uev: f64) -> f64 {
    energy_uev / PLANCK_UEV_PER_GHZ
}

pub fn frequency_to_energy(frequency_ghz: f64) -> f64 {
    frequency_ghz * PLANCK_UEV_PER_GHZ
}

/// Rabi energy ħΩ (µeV) to angular frequency Ω in rad/ps.
pub fn rabi_energy_to_angular(energy_uev: f64) -> f64 {
    energy_uev / HBAR_UEV_PS
}

pub fn angular_to_rabi_energy(omega_rad_per_ps: f64) -> f64 {
    omega_rad_per_ps * HBAR_UEV_PS
}

/// Rabi energy ħΩ (µeV) to the ordinary frequency Ω/2π in GHz.
pub fn rabi_energy_to_frequency(energy_uev: f64) -> f64 {
    // rad/ps -> rad/ns
    rabi_energy_to_angular(energy_uev) * 1e3 / TAU
}

pub fn rabi_frequency_to_energy(frequency_ghz: f64) -> f64 {
    angular_to_rabi_energy(frequency_ghz * TAU * 1e-3)
}

/// Lorentzian FWHM (µeV) to coherence time T2 = 2ħ/FWHM (ps).
pub fn linewidth_to_t2(fwhm_uev: f64) -> Result<f64> {
    if !(fwhm_uev > 0.0) || !fwhm_uev.is_finite() {
        return Err(Error::param("fwhm", format!("must be positive, got {fwhm_uev}")));
    }
    Ok(2.0 * HBAR_UEV_PS / fwhm_uev)
}

pub fn t2_to_linewidth(t2_ps: f64) -> Result<f64> {
    if !(t2_ps > 0.0) || !t2_ps.is_finite() {
        return Err(Error::param("t2", format!("must be positive, got {t2_ps}")));
    }
    Ok(2.0 * HBAR_UEV_PS / t2_ps)
}

/// Pure-dephasing time T2*. `Infinite` is the Fourier-limited case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DephasingTime {
    Finite(f64),
    Infinite,
}

impl DephasingTime {
    /// Pure-dephasing rate 1/T2* in ps⁻¹.
    pub fn rate(self) -> f64 {
        match self {
            DephasingTime::Finite(t) => 1.0 / t,
            DephasingTime::Infinite => 0.0,
        }
    }
}

/// Combine radiative decay and pure dephasing: 1/T2 = 1/(2T1) + 1/T2*.
pub fn fourier_compose(t1_ps: f64, t2_star: DephasingTime) -> Result<f64> {
    check_positive("t1", t1_ps)?;
    match t2_star {
        DephasingTime::Infinite => Ok(2.0 * t1_ps),
        DephasingTime::Finite(t) => {
            check_positive("t2_star", t)?;
            Ok(1.0 / (0.5 / t1_ps + 1.0 / t))
        }
    }
}

/// Solve 1/T2* = 1/T2 − 1/(2T1). T2 = 2T1 (within tolerance) gives `Infinite`.
pub fn pure_dephasing_time(t1_ps: f64, t2_ps: f64) -> Result<DephasingTime> {
    check_positive("t1", t1_ps)?;
    check_positive("t2", t2_ps)?;
    let limit = 2.0 * t1_ps;
    if t2_ps > limit * (1.0 + FOURIER_LIMIT_TOLERANCE) {
        return Err(Error::Inconsistent(format!(
            "T2 = {t2_ps} ps exceeds the Fourier limit 2 T1 = {limit} ps"
        )));
    }
    let rate = 1.0 / t2_ps - 0.5 / t1_ps;
    if rate <= 0.0 || t2_ps >= limit * (1.0 - FOURIER_LIMIT_TOLERANCE) {
        Ok(DephasingTime::Infinite)
    } else {
        Ok(DephasingTime::Finite(1.0 / rate))
    }
}

/// T2/(2T1): how close the emitter is to the Fourier limit.
pub fn coherence_fidelity(t1_ps: f64, t2_ps: f64) -> Result<f64> {
    check_positive("t1", t1_ps)?;
    check_positive("t2", t2_ps)?;
    Ok(t2_ps / (2.0 * t1_ps))
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

pub(crate) fn check_unit_interval(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in [0, 1], got {v}")))
    }
}

/// Radiative lifetime and coherence time of the two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    t1: f64,
    t2: f64,
    emission_energy: Option<f64>,
}

impl EmitterParams {
    pub fn new(t1_ps: f64, t2_ps: f64) -> Result<Self> {
        check_positive("t1", t1_ps)?;
        check_positive("t2", t2_ps)?;
        if t2_ps > 2.0 * t1_ps * (1.0 + FOURIER_LIMIT_TOLERANCE) {
            return Err(Error::Inconsistent(format!(
                "T2 = {t2_ps} ps exceeds 2 T1 = {} ps",
                2.0 * t1_ps
            )));
        }
        Ok(EmitterParams {
            t1: t1_ps,
            t2: t2_ps,
            emission_energy: None,
        })
    }

    /// Fourier-limited emitter, T2 = 2 T1.
    pub fn transform_limited(t1_ps: f64) -> Result<Self> {
        Self::new(t1_ps, 2.0 * t1_ps)
    }

    pub fn with_emission_energy(mut self, energy_uev: f64) -> Self {
        self.emission_energy = Some(energy_uev);
        self
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn emission_energy(&self) -> Option<f64> {
        self.emission_energy
    }

    /// Natural linewidth γ₀ = 1/T1 (ps⁻¹).
    pub fn gamma0(&self) -> f64 {
        1.0 / self.t1
    }

    /// Homogeneous linewidth γ = 2/T2 (ps⁻¹).
    pub fn gamma(&self) -> f64 {
        2.0 / self.t2
    }

    pub fn t2_star(&self) -> DephasingTime {
        // Construction already enforced T2 <= 2 T1.
        pure_dephasing_time(self.t1, self.t2).unwrap_or(DephasingTime::Infinite)
    }

    pub fn fidelity(&self) -> f64 {
        self.t2 / (2.0 * self.t1)
    }
}

/// Resonant drive strength as the Rabi energy ħΩ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    rabi_energy: f64,
    power_calibration: Option<f64>,
}

impl DriveParams {
    pub fn new(rabi_energy_uev: f64) -> Result<Self> {
        if !(rabi_energy_uev >= 0.0) || !rabi_energy_uev.is_finite() {
            return Err(Error::param(
                "rabi_energy",
                format!("must be non-negative, got {rabi_energy_uev}"),
            ));
        }
        Ok(DriveParams {
            rabi_energy: rabi_energy_uev,
            power_calibration: None,
        })
    }

    /// Attach the constant c of ħΩ = c·√P.
    pub fn with_power_calibration(mut self, calibration: f64) -> Result<Self> {
        check_positive("power_calibration", calibration)?;
        self.power_calibration = Some(calibration);
        Ok(self)
    }

    pub fn rabi_energy(&self) -> f64 {
        self.rabi_energy
    }

    /// Ω in rad/ps.
    pub fn rabi_angular(&self) -> f64 {
        rabi_energy_to_angular(self.rabi_energy)
    }

    pub fn power_calibration(&self) -> Option<f64> {
        self.power_calibration
    }
}

/// Fiber Mach-Zehnder: two couplers with intensity coefficients, an arm
/// delay and the photon wave-function overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerParams {
    pub r1: f64,
    pub t1c: f64,
    pub r2: f64,
    pub t2c: f64,
    pub delay: f64,
    pub overlap: f64,
}

impl InterferometerParams {
    pub fn new(r1: f64, r2: f64, delay_ps: f64, overlap: f64) -> Result<Self> {
        let ifo = InterferometerParams {
            r1,
            t1c: 1.0 - r1,
            r2,
            t2c: 1.0 - r2,
            delay: delay_ps,
            overlap,
        };
        ifo.validate()?;
        Ok(ifo)
    }

    pub fn balanced(delay_ps: f64, overlap: f64) -> Result<Self> {
        Self::new(0.5, 0.5, delay_ps, overlap)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r1", self.r1),
            ("t1c", self.t1c),
            ("r2", self.r2),
            ("t2c", self.t2c),
            ("overlap", self.overlap),
        ] {
            check_unit_interval(name, v)?;
        }
        if (self.r1 + self.t1c - 1.0).abs() > 1e-12 {
            return Err(Error::param("t1c", "r1 + t1c must equal 1"));
        }
        if (self.r2 + self.t2c - 1.0).abs() > 1e-12 {
            return Err(Error::param("t2c", "r2 + t2c must equal 1"));
        }
        check_positive("delay", self.delay)
    }
}

/// Gaussian instrument response of the correlation setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrfParams {
    fwhm: f64,
}

/// FWHM = 2√(2 ln 2)·σ.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

impl IrfParams {
    pub fn new(fwhm_ps: f64) -> Result<Self> {
        check_positive("fwhm", fwhm_ps)?;
        Ok(IrfParams { fwhm: fwhm_ps })
    }

    pub fn fwhm(&self) -> f64 {
        self.fwhm
    }

    pub fn sigma(&self) -> f64 {
        self.fwhm / FWHM_PER_SIGMA
    }
}

/// Uniform sampling grid `start + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        check_positive("step", step)?;
        if !start.is_finite() {
            return Err(Error::param("start", "must be finite"));
        }
        if len == 0 {
            return Err(Error::param("len", "grid must have at least one point"));
        }
        Ok(Grid { start, step, len })
    }

    /// Odd-length grid centred on zero covering at least ±`half_range`.
    pub fn symmetric(half_range: f64, step: f64) -> Result<Self> {
        check_positive("step", step)?;
        if !(half_range >= 0.0) || !half_range.is_finite() {
            return Err(Error::param("half_range", "must be non-negative and finite"));
        }
        let half = (half_range / step - 1e-9).ceil().max(0.0) as usize;
        Grid::new(-(half as f64) * step, step, 2 * half + 1)
    }

    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }
}

/// Uniformly gridded correlation function g²(τ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    tau_start: f64,
    tau_step: f64,
    values: Vec<f64>,
}

impl CorrelationCurve {
    pub fn new(tau_start: f64, tau_step: f64, values: Vec<f64>) -> Result<Self> {
        check_positive("tau_step", tau_step)?;
        if !tau_start.is_finite() {
            return Err(Error::param("tau_start", "must be finite"));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param(
                "values",
                format!("entry {i} = {} is negative or non-finite", values[i]),
            ));
        }
        Ok(CorrelationCurve {
            tau_start,
            tau_step,
            values,
        })
    }

    pub fn tau_start(&self) -> f64 {
        self.tau_start
    }

    pub fn tau_step(&self) -> f64 {
        self.tau_step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.tau_start + i as f64 * self.tau_step
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.tau(i))
    }

    /// Index of the sample nearest to `tau`, if inside the grid.
    pub fn index_of(&self, tau: f64) -> Option<usize> {
        let x = ((tau - self.tau_start) / self.tau_step).round();
        (x >= 0.0 && (x as usize) < self.values.len()).then_some(x as usize)
    }

    pub fn value_at(&self, tau: f64) -> Option<f64> {
        self.index_of(tau).map(|i| self.values[i])
    }

    pub fn same_grid(&self, other: &CorrelationCurve) -> bool {
        self.values.len() == other.values.len()
            && (self.tau_start - other.tau_start).abs() <= 1e-9 * self.tau_step
            && (self.tau_step - other.tau_step).abs() <= 1e-12 * self.tau_step
    }

    pub fn grid(&self) -> Grid {
        Grid {
            start: self.tau_start,
            step: self.tau_step,
            len: self.values.len(),
        }
    }
}

/// Spectral density on a uniform energy axis relative to the line centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    omega_start: f64,
    omega_step: f64,
    density: Vec<f64>,
}

impl Spectrum {
    pub fn new(omega_start: f64, omega_step: f64, density: Vec<f64>) -> Result<Self> {
        check_positive("omega_step", omega_step)?;
        if !omega_start.is_finite() {
            return Err(Error::param("omega_start", "must be finite"));
        }
        if let Some(i) = density.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param(
                "density",
                format!("entry {i} = {} is negative or non-finite", density[i]),
            ));
        }
        Ok(Spectrum {
            omega_start,
            omega_step,
            density,
        })
    }

    pub fn omega_start(&self) -> f64 {
        self.omega_start
    }

    pub fn omega_step(&self) -> f64 {
        self.omega_step
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.omega_start + i as f64 * self.omega_step
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.density.len()).map(move |i| self.omega(i))
    }

    /// Trapezoidal integral of the density.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.density, self.omega_step)
    }
}

pub(crate) fn trapezoid(y: &[f64], dx: f64) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => dx * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[n - 1])),
    }
}

/// Time-ordered detections of one detector channel, integer picoseconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickStream {
    channel: u8,
    timestamps: Vec<u64>,
    duration: u64,
}

impl ClickStream {
    pub fn new(channel: u8, timestamps: Vec<u64>, duration: u64) -> Result<Self> {
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Unsorted { index: i + 1 });
        }
        if let Some(&last) = timestamps.last() {
            if last > duration {
                return Err(Error::OutOfRange {
                    index: timestamps.len() - 1,
                    timestamp: last,
                    duration,
                });
            }
        }
        Ok(ClickStream {
            channel,
            timestamps,
            duration,
        })
    }

    pub fn channel(&self) -> u8 {
        self.channel
    }

    pub fn timestamps(&self) -> &[u64] {
        &self.timestamps
    }

    pub fn duration(&self) -> u64 {
        self.duration
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Mean click rate in ps⁻¹.
    pub fn rate(&self) -> f64 {
        if self.duration == 0 {
            0.0
        } else {
            self.timestamps.len() as f64 / self.duration as f64
        }
    }
}
