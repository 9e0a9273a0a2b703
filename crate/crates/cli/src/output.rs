//! Output directory: data files, optional gnuplot scripts, summary and manifest.

use std::fs;
use std::path::{Path, PathBuf};

use rfstat_core::hom::VisibilityCurve;
use rfstat_core::instrument::{io, Histogram};
use rfstat_core::{ClickStream, CorrelationCurve, Spectrum};
use serde::Serialize;

use crate::error::CliError;

pub struct Output {
    dir: PathBuf,
    gnuplot: bool,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::io(format!("{}: {e}", path.display()))
}

impl Output {
    pub fn create(dir: &Path, gnuplot: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            gnuplot,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn text(&self, name: &str, content: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, content).map_err(|e| io_err(&p, e))
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::io(e.to_string()))?;
        s.push('\n');
        self.text(name, &s)
    }

    pub fn curve(&self, name: &str, curve: &CorrelationCurve, ylabel: &str) -> Result<(), CliError> {
        io::save_curve(self.path(name), curve)?;
        self.plot(name, "τ (ps)", ylabel)
    }

    pub fn spectrum(&self, name: &str, s: &Spectrum) -> Result<(), CliError> {
        io::save_spectrum(self.path(name), s)?;
        self.plot(name, "energy (µeV)", "spectral density (1/µeV)")
    }

    pub fn histogram(&self, name: &str, h: &Histogram) -> Result<(), CliError> {
        io::save_histogram(self.path(name), h)?;
        self.plot(name, "τ (ps)", "coincidences")
    }

    pub fn visibility(&self, name: &str, v: &VisibilityCurve) -> Result<(), CliError> {
        io::save_visibility(self.path(name), v)?;
        self.plot(name, "τ (ps)", "visibility")
    }

    pub fn clicks(&self, name: &str, s: &ClickStream) -> Result<(), CliError> {
        Ok(io::save_clicks(self.path(name), s)?)
    }

    /// Two-column CSV under a `#` header, for curves without a core format.
    pub fn table(&self, name: &str, header: &str, rows: &[(f64, f64)], labels: (&str, &str)) -> Result<(), CliError> {
        let mut s = format!("# {header}\n");
        for (x, y) in rows {
            s.push_str(&format!("{x},{y}\n"));
        }
        self.text(name, &s)?;
        self.plot(name, labels.0, labels.1)
    }

    fn plot(&self, name: &str, xlabel: &str, ylabel: &str) -> Result<(), CliError> {
        if !self.gnuplot {
            return Ok(());
        }
        let stem = name.strip_suffix(".csv").unwrap_or(name);
        let script = format!(
            "set datafile separator \",\"\n\
             set xlabel \"{xlabel}\"\n\
             set ylabel \"{ylabel}\"\n\
             set key off\n\
             set terminal pngcairo size 900,600\n\
             set output \"{stem}.png\"\n\
             plot \"{name}\" using 1:2 with lines\n"
        );
        self.text(&format!("{stem}.gp"), &script)
    }
}
