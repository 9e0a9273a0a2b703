use clap::ValueEnum;

use rfstat_core::units;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Conversion {
    /// Photon energy µeV → frequency GHz.
    UevToGhz,
    /// Frequency GHz → photon energy µeV.
    GhzToUev,
    /// Rabi energy ħΩ µeV → Ω/2π GHz.
    RabiUevToGhz,
    /// Ω/2π GHz → ħΩ µeV.
    RabiGhzToUev,
    /// ħΩ µeV → Ω rad/ps.
    RabiUevToRadPs,
    /// Homogeneous linewidth FWHM µeV → T2 ps.
    LinewidthToT2,
    /// T2 ps → linewidth FWHM µeV.
    T2ToLinewidth,
}

/// Nine significant digits, then the shortest decimal that parses back.
fn format(v: f64) -> String {
    let rounded: f64 = format!("{v:.8e}").parse().unwrap_or(v);
    rounded.to_string()
}

pub fn run(conversion: Conversion, values: &[String]) -> Result<Vec<String>, CliError> {
    values
        .iter()
        .map(|raw| {
            let x: f64 = raw
                .parse()
                .map_err(|_| CliError::config(format!("`{raw}` is not a number")))?;
            let y = match conversion {
                Conversion::UevToGhz => units::energy_to_frequency(x),
                Conversion::GhzToUev => units::frequency_to_energy(x),
                Conversion::RabiUevToGhz => units::rabi_energy_to_frequency(x),
                Conversion::RabiGhzToUev => units::rabi_frequency_to_energy(x),
                Conversion::RabiUevToRadPs => units::rabi_energy_to_angular(x),
                Conversion::LinewidthToT2 => units::linewidth_to_t2(x)?,
                Conversion::T2ToLinewidth => units::t2_to_linewidth(x)?,
            };
            Ok(format(y))
        })
        .collect()
}
