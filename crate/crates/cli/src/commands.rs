use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use rfstat_core::cavity::lifetime_with;
use rfstat_core::fitting::{
    fit_g2, fit_hom, fit_mollow, fit_purcell, mollow_params, FitOptions, FitResult, G2Data, G2Model, HomModel, Kappa,
    LifetimePoint, ParamSet, RESOLVED_SPLITTING,
};
use rfstat_core::hom::{hom_curve, visibility, Polarization};
use rfstat_core::instrument::{
    autocorrelate_clicks, convolve_irf, correlate_clicks, gaussian_kernel, io, mix_background, mix_background_curve,
    smear, Histogram,
};
use rfstat_core::tls::{
    emission_rate, g2_curve, mollow_spectrum, saturation_parameter, steady_state_population, G2Coefficients,
    MollowParams,
};
use rfstat_core::trajectory::{simulate_clicks, simulate_mz, split_stream, MzMode, TrajectoryConfig};
use rfstat_core::units::rabi_energy_to_frequency;
use rfstat_core::{CorrelationCurve, DriveParams, EmitterParams, Grid, InterferometerParams, IrfParams, Spectrum};

use crate::config::{FitModel, McMode, RunConfig};
use crate::error::{CliError, NO_CONVERGENCE};
use crate::output::Output;

fn emitter(cfg: &RunConfig) -> Result<EmitterParams, CliError> {
    Ok(EmitterParams::new(cfg.emitter.t1, cfg.emitter.t2)?)
}

fn drive(cfg: &RunConfig) -> Result<DriveParams, CliError> {
    Ok(DriveParams::new(cfg.drive.rabi_energy)?)
}

fn irf(cfg: &RunConfig) -> Result<IrfParams, CliError> {
    Ok(IrfParams::new(cfg.irf.fwhm)?)
}

fn interferometer(cfg: &RunConfig) -> Result<InterferometerParams, CliError> {
    let h = &cfg.hom;
    Ok(InterferometerParams::new(h.r1, h.r2, h.delay, h.overlap)?)
}

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    p.as_deref()
        .ok_or_else(|| CliError::config(format!("`{key}` is required for this command")))
}

fn at(curve: &CorrelationCurve, tau: f64) -> Value {
    curve.value_at(tau).map_or(Value::Null, Value::from)
}

pub fn g2(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let (e, d) = (emitter(cfg)?, drive(cfg)?);
    let grid = Grid::symmetric(cfg.g2.half_range.unwrap_or_default(), cfg.g2.step)?;
    let ideal = g2_curve(&e, &d, grid)?;
    let mixed = mix_background_curve(&ideal, cfg.background.rho)?;
    let blurred = convolve_irf(&mixed, &irf(cfg)?)?;
    out.curve("g2_ideal.csv", &ideal, "g2")?;
    out.curve("g2.csv", &mixed, "g2")?;
    out.curve("g2_convolved.csv", &blurred, "g2")?;
    Ok(json!({
        "g2_0_ideal": at(&ideal, 0.0),
        "g2_0_deconvolved": at(&mixed, 0.0),
        "g2_0_convolved": at(&blurred, 0.0),
        "regime": format!("{:?}", G2Coefficients::new(&e, &d).regime()).to_lowercase(),
        "saturation_parameter": saturation_parameter(&e, &d),
        "excited_population": steady_state_population(&e, &d),
        "emission_rate_per_ps": emission_rate(&e, &d),
    }))
}

fn local_peak(s: &Spectrum, lo: f64, hi: f64) -> Option<f64> {
    s.omegas()
        .zip(s.density())
        .filter(|(w, _)| (lo..=hi).contains(w))
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(w, _)| w)
}

pub fn mollow(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let m = &cfg.mollow;
    let (gamma, rabi, half) = (
        m.gamma_sp_energy.unwrap_or_default(),
        m.rabi_energy.unwrap_or_default(),
        m.half_range.unwrap_or_default(),
    );
    let p = MollowParams::from_energies(gamma, rabi, m.center)?;
    let n = (half / m.step).round() as usize;
    let grid = Grid::new(m.center - n as f64 * m.step, m.step, 2 * n + 1)?;
    let s = mollow_spectrum(&p, grid)?;
    out.spectrum("mollow.csv", &s)?;
    let resolved = rabi >= RESOLVED_SPLITTING * gamma;
    let (minus, plus) = if resolved {
        (
            local_peak(&s, m.center - 1.5 * rabi, m.center - 0.5 * rabi),
            local_peak(&s, m.center + 0.5 * rabi, m.center + 1.5 * rabi),
        )
    } else {
        (None, None)
    };
    Ok(json!({
        "gamma_sp_energy": gamma,
        "rabi_energy": rabi,
        "rabi_frequency_ghz": rabi_energy_to_frequency(rabi),
        "center": m.center,
        "side_peaks_resolved": resolved,
        "side_peak_minus": minus,
        "side_peak_plus": plus,
        "peak_separation": minus.zip(plus).map(|(a, b)| b - a),
        "window_integral": s.integral(),
    }))
}

pub fn hom(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let (e, d, ifo, irf) = (emitter(cfg)?, drive(cfg)?, interferometer(cfg)?, irf(cfg)?);
    let c = G2Coefficients::new(&e, &d);
    let rho = cfg.background.rho;
    mix_background(0.0, rho)?;
    let base = |t: f64| mix_background(c.g2(t), rho).unwrap_or(f64::NAN);
    let grid = Grid::symmetric(cfg.hom.half_range.unwrap_or_default(), cfg.hom.step)?;
    let cross = hom_curve(Polarization::Orthogonal, base, &ifo, &e, grid, true)?;
    let par = hom_curve(Polarization::Parallel, base, &ifo, &e, grid, true)?;
    let cross_b = convolve_irf(&cross, &irf)?;
    let par_b = convolve_irf(&par, &irf)?;
    let vis = visibility(&cross, &par)?;
    let vis_b = visibility(&cross_b, &par_b)?;
    out.curve("hom_cross.csv", &cross, "g2 cross-polarised")?;
    out.curve("hom_parallel.csv", &par, "g2 parallel-polarised")?;
    out.curve("hom_cross_convolved.csv", &cross_b, "g2 cross-polarised")?;
    out.curve("hom_parallel_convolved.csv", &par_b, "g2 parallel-polarised")?;
    out.visibility("visibility.csv", &vis)?;
    out.visibility("visibility_convolved.csv", &vis_b)?;
    let peak = vis.peak();
    let peak_b = vis_b.peak();
    let delay = cfg.hom.delay;
    Ok(json!({
        "g2_cross_0": at(&cross, 0.0),
        "g2_parallel_0": at(&par, 0.0),
        "visibility_0": vis.value_at(0.0),
        "visibility_peak_deconvolved": peak.map(|p| p.1),
        "visibility_peak_tau_deconvolved": peak.map(|p| p.0),
        "visibility_peak_convolved": peak_b.map(|p| p.1),
        "visibility_peak_tau_convolved": peak_b.map(|p| p.0),
        "dip_positions": [-delay, 0.0, delay],
        "side_dips_deconvolved": [at(&cross, -delay), at(&cross, delay)],
        "side_dips_convolved": [at(&cross_b, -delay), at(&cross_b, delay)],
    }))
}

fn load_curve_or_histogram(path: &Path) -> Result<CorrelationCurve, CliError> {
    match io::sniff_format(path)?.as_str() {
        io::HISTOGRAM_MAGIC => Ok(io::load_histogram(path)?.normalized()?),
        _ => Ok(io::load_curve(path)?),
    }
}

pub fn visibility_cmd(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let cross = load_curve_or_histogram(required(&cfg.visibility.cross, "visibility.cross")?)?;
    let par = load_curve_or_histogram(required(&cfg.visibility.parallel, "visibility.parallel")?)?;
    let vis = visibility(&cross, &par)?;
    out.visibility("visibility.csv", &vis)?;
    let peak = vis.peak();
    Ok(json!({
        "visibility_0": vis.value_at(0.0),
        "visibility_peak": peak.map(|p| p.1),
        "visibility_peak_tau": peak.map(|p| p.0),
    }))
}

fn lifetime_points(cfg: &RunConfig) -> Vec<LifetimePoint> {
    cfg.purcell
        .points
        .iter()
        .map(|p| LifetimePoint {
            detuning: p.detuning,
            lifetime: p.lifetime,
            uncertainty: p.uncertainty,
        })
        .collect()
}

fn purcell_kappa(cfg: &RunConfig) -> Kappa {
    let k = cfg.purcell.kappa;
    if cfg.purcell.fit_kappa {
        Kappa::Free {
            init: k,
            lower: 0.1 * k,
            upper: 10.0 * k,
        }
    } else {
        Kappa::Fixed(k)
    }
}

fn options(cfg: &RunConfig) -> FitOptions {
    FitOptions {
        max_evaluations: cfg.fit.max_evaluations,
        tolerance: cfg.fit.tolerance,
    }
}

fn converged(fit: &FitResult) -> Result<(), CliError> {
    if fit.converged {
        Ok(())
    } else {
        Err(CliError {
            code: NO_CONVERGENCE,
            message: format!(
                "fit did not converge within {} evaluations; best point written",
                fit.evaluations
            ),
        })
    }
}

pub fn purcell(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let p = &cfg.purcell;
    let fit = fit_purcell(&lifetime_points(cfg), purcell_kappa(cfg), &options(cfg))?;
    let v = fit.values();
    let n = ((p.detuning_max - p.detuning_min) / p.detuning_step).round() as usize;
    let rows: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let d = p.detuning_min + i as f64 * p.detuning_step;
            (d, lifetime_with(d, v[2], v[0], v[1]))
        })
        .collect();
    out.table(
        "purcell.csv",
        &format!("rfstat-purcell v1 points={}", rows.len()),
        &rows,
        ("detuning (µeV)", "T1 (ps)"),
    )?;
    out.text("purcell_fit.txt", &fit.report())?;
    converged(&fit)?;
    Ok(json!({
        "f_eff": v[0],
        "t1_off": v[1],
        "kappa": v[2],
        "purcell_factor": fit.derived("purcell_factor"),
        "enhancement_ratio": fit.derived("enhancement_ratio"),
    }))
}

/// Seed for the routing stage, kept apart from the emission seed.
fn routing_seed(seed: u64) -> u64 {
    seed.wrapping_add(0x9E37_79B9_7F4A_7C15)
}

pub fn mc(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let (e, d) = (emitter(cfg)?, drive(cfg)?);
    let mut tc = TrajectoryConfig::new(e, d, cfg.mc.duration, cfg.seed);
    if let Some(dt) = cfg.mc.time_step {
        tc = tc.with_time_step(dt);
    }
    let s = simulate_clicks(&tc)?;
    let mut summary = json!({
        "emissions": s.len(),
        "duration_ps": s.duration(),
        "emission_rate_per_ps": s.rate(),
        "analytic_rate_per_ps": emission_rate(&e, &d),
        "time_step_ps": tc.time_step,
    });
    let pair = match cfg.mc.mode {
        McMode::Single => {
            out.clicks("clicks.txt", &s)?;
            return Ok(summary);
        }
        McMode::Hbt => split_stream(&s, cfg.mc.split_ratio, routing_seed(cfg.seed))?,
        McMode::MzOrthogonal => simulate_mz(&s, &interferometer(cfg)?, MzMode::Orthogonal, routing_seed(cfg.seed))?,
        McMode::MzParallel => simulate_mz(
            &s,
            &interferometer(cfg)?,
            MzMode::Parallel { t2: e.t2() },
            routing_seed(cfg.seed),
        )?,
    };
    out.clicks("clicks_a.txt", &pair.0)?;
    out.clicks("clicks_b.txt", &pair.1)?;
    summary["clicks_a"] = pair.0.len().into();
    summary["clicks_b"] = pair.1.len().into();
    Ok(summary)
}

/// Blur a normalised histogram with the instrument response and drop the
/// outer kernel half-width on each side, where the blur sees the clamped edge.
fn blur_histogram(curve: &CorrelationCurve, irf: &IrfParams) -> Result<CorrelationCurve, CliError> {
    let step = curve.tau_step();
    let half = gaussian_kernel(step, irf.fwhm()).len() / 2;
    if curve.len() <= 2 * half + 1 {
        return Err(CliError::config(format!(
            "correlate.window too short to blur with a {} ps instrument response",
            irf.fwhm()
        )));
    }
    let blurred = smear(curve.values(), step, irf.fwhm());
    Ok(CorrelationCurve::new(
        curve.tau(half),
        step,
        blurred[half..blurred.len() - half].to_vec(),
    )?)
}

pub fn correlate(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let c = &cfg.correlate;
    let a = io::load_clicks(required(&c.a, "correlate.a")?)?;
    let h: Histogram = match &c.b {
        Some(b) => correlate_clicks(&a, &io::load_clicks(b)?, c.bin_width, c.window)?,
        None => autocorrelate_clicks(&a, c.bin_width, c.window)?,
    };
    out.histogram("histogram.csv", &h)?;
    let mut summary = json!({
        "bins": h.len(),
        "bin_width_ps": h.bin_width,
        "coincidences": h.total(),
        "normalization": h.normalization,
    });
    if h.normalization.is_some() {
        let g = h.normalized()?;
        out.curve("g2.csv", &g, "g2")?;
        summary["g2_0"] = at(&g, 0.0);
        if c.apply_irf {
            let b = blur_histogram(&g, &irf(cfg)?)?;
            out.curve("g2_convolved.csv", &b, "g2")?;
            summary["g2_0_convolved"] = at(&b, 0.0);
        }
    }
    Ok(summary)
}

fn g2_data(path: &Path) -> Result<Loaded, CliError> {
    Ok(match io::sniff_format(path)?.as_str() {
        io::HISTOGRAM_MAGIC => Loaded::Histogram(io::load_histogram(path)?),
        _ => Loaded::Curve(io::load_curve(path)?),
    })
}

enum Loaded {
    Curve(CorrelationCurve),
    Histogram(Histogram),
}

impl Loaded {
    fn view(&self) -> G2Data<'_> {
        match self {
            Loaded::Curve(c) => G2Data::Curve(c),
            Loaded::Histogram(h) => G2Data::Histogram(h),
        }
    }
}

fn customise(mut params: ParamSet, cfg: &RunConfig) -> Result<ParamSet, CliError> {
    let f = &cfg.fit;
    if let Some(free) = &f.free {
        let names: Vec<String> = params.names().map(str::to_string).collect();
        if let Some(bad) = free.iter().find(|n| !names.contains(n)) {
            return Err(CliError::config(format!(
                "`fit.free`: unknown parameter `{bad}` (expected one of {})",
                names.join(", ")
            )));
        }
        for n in &names {
            params.set_free(n, free.contains(n))?;
        }
    }
    for (name, v) in &f.init {
        params.set_init(name, *v)?;
    }
    for (name, [lo, hi]) in &f.bounds {
        params.set_bounds(name, *lo, *hi)?;
    }
    Ok(params)
}

pub fn fit(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let (e, d) = (emitter(cfg)?, drive(cfg)?);
    let opts = options(cfg);
    let result = match cfg.fit.model {
        FitModel::G2 => {
            let data = g2_data(required(&cfg.fit.data, "fit.data")?)?;
            let params = customise(G2Model::default_params(&e, &d), cfg)?;
            fit_g2(data.view(), &irf(cfg)?, &params, &opts)?
        }
        FitModel::Hom => {
            let cross = g2_data(required(&cfg.fit.data, "fit.data")?)?;
            let par = g2_data(required(&cfg.fit.parallel, "fit.parallel")?)?;
            let params = customise(HomModel::default_params(&e, &d, &interferometer(cfg)?), cfg)?;
            fit_hom(cross.view(), par.view(), &irf(cfg)?, &params, &opts)?
        }
        FitModel::Mollow => {
            let s = io::load_spectrum(required(&cfg.fit.data, "fit.data")?)?;
            let m = &cfg.mollow;
            let params = customise(
                mollow_params(
                    &s,
                    m.gamma_sp_energy.unwrap_or_default(),
                    m.rabi_energy.unwrap_or_default(),
                ),
                cfg,
            )?;
            fit_mollow(&s, &params, &opts)?
        }
        FitModel::Purcell => fit_purcell(&lifetime_points(cfg), purcell_kappa(cfg), &opts)?,
    };
    out.text("fit.txt", &result.report())?;
    out.json("fit.json", &result)?;
    converged(&result)?;
    let mut summary = json!({
        "converged": result.converged,
        "residual": result.residual,
        "data_points": result.data_points,
    });
    for p in &result.parameters {
        summary[&p.name] = p.value.into();
    }
    for (k, v) in &result.derived {
        summary[k] = (*v).into();
    }
    Ok(summary)
}
