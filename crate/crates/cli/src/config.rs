//! Run configuration: TOML file, `--set` overrides, and the manifest echo.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rfstat_core::units::HBAR_UEV_PS;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Subcommand that produced a manifest; checked when re-running one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub seed: u64,
    pub out: PathBuf,
    pub emitter: EmitterSection,
    pub drive: DriveSection,
    pub background: BackgroundSection,
    pub irf: IrfSection,
    pub g2: G2Section,
    pub mollow: MollowSection,
    pub hom: HomSection,
    pub visibility: VisibilitySection,
    pub purcell: PurcellSection,
    pub mc: McSection,
    pub correlate: CorrelateSection,
    pub fit: FitSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 0,
            out: PathBuf::from("rfstat-out"),
            emitter: EmitterSection::default(),
            drive: DriveSection::default(),
            background: BackgroundSection::default(),
            irf: IrfSection::default(),
            g2: G2Section::default(),
            mollow: MollowSection::default(),
            hom: HomSection::default(),
            visibility: VisibilitySection::default(),
            purcell: PurcellSection::default(),
            mc: McSection::default(),
            correlate: CorrelateSection::default(),
            fit: FitSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitterSection {
    /// ps
    pub t1: f64,
    /// ps
    pub t2: f64,
}

impl Default for EmitterSection {
    fn default() -> Self {
        EmitterSection { t1: 560.0, t2: 360.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    /// ħΩ in µeV
    pub rabi_energy: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection { rabi_energy: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundSection {
    /// Signal fraction of the detected light.
    pub rho: f64,
}

impl Default for BackgroundSection {
    fn default() -> Self {
        BackgroundSection { rho: 0.96 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IrfSection {
    /// ps
    pub fwhm: f64,
}

impl Default for IrfSection {
    fn default() -> Self {
        IrfSection { fwhm: 400.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct G2Section {
    /// The delay grid spans ±half_range, ps; defaults to
    /// max(8000, 15·max(T1, T2)) so the tails are flat.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_range: Option<f64>,
    pub step: f64,
}

impl Default for G2Section {
    fn default() -> Self {
        G2Section {
            half_range: None,
            step: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MollowSection {
    /// ħγ_sp in µeV; defaults to ħ/T1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_sp_energy: Option<f64>,
    /// ħΩ in µeV; defaults to `drive.rabi_energy`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi_energy: Option<f64>,
    pub center: f64,
    /// Defaults to ħΩ + 20ħγ_sp.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_range: Option<f64>,
    pub step: f64,
}

impl Default for MollowSection {
    fn default() -> Self {
        MollowSection {
            gamma_sp_energy: None,
            rabi_energy: None,
            center: 0.0,
            half_range: None,
            step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomSection {
    pub r1: f64,
    pub r2: f64,
    /// Arm delay, ps.
    pub delay: f64,
    pub overlap: f64,
    /// Defaults to delay + 15·max(T1, T2).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_range: Option<f64>,
    pub step: f64,
}

impl Default for HomSection {
    fn default() -> Self {
        HomSection {
            r1: 0.5,
            r2: 0.5,
            delay: 13_000.0,
            overlap: 0.9,
            half_range: None,
            step: 10.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VisibilitySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifetimeEntry {
    /// µeV
    pub detuning: f64,
    /// ps
    pub lifetime: f64,
    #[serde(default = "unit")]
    pub uncertainty: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PurcellSection {
    /// Mode FWHM, µeV.
    pub kappa: f64,
    /// Fit κ as well; needs at least three points.
    pub fit_kappa: bool,
    pub detuning_min: f64,
    pub detuning_max: f64,
    pub detuning_step: f64,
    pub points: Vec<LifetimeEntry>,
}

impl Default for PurcellSection {
    fn default() -> Self {
        PurcellSection {
            kappa: 104.4,
            fit_kappa: false,
            detuning_min: -300.0,
            detuning_max: 300.0,
            detuning_step: 1.0,
            points: vec![
                LifetimeEntry {
                    detuning: 0.0,
                    lifetime: 65.0,
                    uncertainty: 1.0,
                },
                LifetimeEntry {
                    detuning: 250.0,
                    lifetime: 820.0,
                    uncertainty: 1.0,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McMode {
    /// One detector, channel 0.
    Single,
    /// Beamsplitter onto channels 1 and 2.
    Hbt,
    /// Unbalanced Mach-Zehnder from `[hom]`, orthogonal polarisations.
    MzOrthogonal,
    /// Same with parallel polarisations and `hom.overlap`.
    MzParallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    /// ps
    pub duration: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_step: Option<f64>,
    pub mode: McMode,
    /// Probability of routing a click to channel 1 in `hbt` mode.
    pub split_ratio: f64,
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            duration: 1e8,
            time_step: None,
            mode: McMode::Hbt,
            split_ratio: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrelateSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<PathBuf>,
    /// Without `b` the stream in `a` is correlated with itself.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<PathBuf>,
    /// ps
    pub bin_width: u64,
    /// ps
    pub window: u64,
    /// Also write the normalised histogram blurred with `[irf]`.
    pub apply_irf: bool,
}

impl Default for CorrelateSection {
    fn default() -> Self {
        CorrelateSection {
            a: None,
            b: None,
            bin_width: 50,
            window: 10_000,
            apply_irf: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    G2,
    Hom,
    Mollow,
    Purcell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub model: FitModel,
    /// Curve, histogram or spectrum file; cross data for `hom`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// Parallel-polarised curve for `hom`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel: Option<PathBuf>,
    /// When given, exactly these parameters are free.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free: Option<Vec<String>>,
    pub init: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, [f64; 2]>,
    pub max_evaluations: usize,
    pub tolerance: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection {
            model: FitModel::G2,
            data: None,
            parallel: None,
            free: None,
            init: BTreeMap::new(),
            bounds: BTreeMap::new(),
            max_evaluations: 20_000,
            tolerance: 1e-13,
        }
    }
}

/// Overrides from the command line, applied on top of the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for set in &overrides.sets {
        apply_set(&mut table, set)?;
    }
    let mut cfg: RunConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| CliError::config(e.message().to_string()))?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &overrides.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

/// `a.b.c=value`; the value is read as a TOML literal, or as a bare string.
fn apply_set(table: &mut toml::Table, set: &str) -> Result<(), CliError> {
    let (key, raw) = set
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("--set `{set}`: expected key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|k| k.is_empty()) {
        return Err(CliError::config(format!("--set `{set}`: malformed key")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut node = table;
    for k in &path[..path.len() - 1] {
        let entry = node
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::config(format!("--set `{set}`: `{k}` is not a section")))?;
    }
    node.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn manifest(&self, command: &str) -> Result<String, CliError> {
        let mut echo = self.clone();
        echo.command = Some(command.to_string());
        toml::to_string(&echo).map_err(|e| CliError::config(format!("cannot serialise manifest: {e}")))
    }

    /// Fill in every value that defaults to others, so the manifest is explicit.
    pub fn resolve(&mut self) {
        let longest = self.emitter.t1.max(self.emitter.t2);
        self.g2.half_range.get_or_insert(f64::max(8000.0, 15.0 * longest));
        self.hom.half_range.get_or_insert(self.hom.delay + 15.0 * longest);
        let m = &mut self.mollow;
        let gamma = *m.gamma_sp_energy.get_or_insert(HBAR_UEV_PS / self.emitter.t1);
        let rabi = *m.rabi_energy.get_or_insert(self.drive.rabi_energy);
        m.half_range.get_or_insert(rabi + 20.0 * gamma);
    }

    /// A manifest written by a different subcommand is a configuration error.
    pub fn check_command(&self, command: &str) -> Result<(), CliError> {
        match &self.command {
            Some(c) if c != command => Err(CliError::config(format!(
                "`command`: configuration was written by `{c}`, not `{command}`"
            ))),
            _ => Ok(()),
        }
    }
}
