//! `rfstat`: model curves, quantum-jump simulation, correlation and fits for
//! a resonantly driven two-level emitter.

mod commands;
mod config;
mod convert;
mod error;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::CliError;
use output::Output;

#[derive(Parser, Debug)]
#[command(name = "rfstat", version, about = "Photon statistics of a resonantly driven two-level emitter")]
struct Cli {
    /// TOML run configuration (a manifest from an earlier run works too).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random stage; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set emitter.t1=600`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    /// Also write a gnuplot script next to every curve.
    #[arg(long, global = true)]
    gnuplot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Driven-emitter g²(τ): ideal, with background, and through the IRF.
    G2,
    /// Mollow triplet spectrum.
    Mollow,
    /// Cross- and parallel-polarised HOM curves and their visibility.
    Hom,
    /// Visibility of two measured or simulated HOM curves.
    Visibility,
    /// Purcell lifetime model through the configured lifetime points.
    Purcell,
    /// Quantum-jump click streams.
    Mc,
    /// Start-stop correlation of click files.
    Correlate,
    /// Fit a model to data files.
    Fit,
    /// Unit conversions on arguments or stdin; prints one result per line.
    Convert {
        #[arg(value_enum)]
        conversion: convert::Conversion,
        /// Values to convert; read whitespace-separated from stdin if absent.
        values: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::G2 => "g2",
            Command::Mollow => "mollow",
            Command::Hom => "hom",
            Command::Visibility => "visibility",
            Command::Purcell => "purcell",
            Command::Mc => "mc",
            Command::Correlate => "correlate",
            Command::Fit => "fit",
            Command::Convert { .. } => "convert",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Convert { conversion, values } = &cli.command {
        let values = if values.is_empty() {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s.split_whitespace().map(str::to_string).collect()
        } else {
            values.clone()
        };
        for line in convert::run(*conversion, &values)? {
            println!("{line}");
        }
        return Ok(());
    }

    let overrides = Overrides {
        sets: cli.sets.clone(),
        seed: cli.seed,
        out: cli.out.clone(),
    };
    let name = cli.command.name();
    let mut cfg: RunConfig = config::load(cli.config.as_deref(), &overrides)?;
    cfg.check_command(name)?;
    cfg.resolve();
    let out = Output::create(&cfg.out, cli.gnuplot)?;
    out.text("manifest.toml", &cfg.manifest(name)?)?;
    let summary = match cli.command {
        Command::G2 => commands::g2(&cfg, &out),
        Command::Mollow => commands::mollow(&cfg, &out),
        Command::Hom => commands::hom(&cfg, &out),
        Command::Visibility => commands::visibility_cmd(&cfg, &out),
        Command::Purcell => commands::purcell(&cfg, &out),
        Command::Mc => commands::mc(&cfg, &out),
        Command::Correlate => commands::correlate(&cfg, &out),
        Command::Fit => commands::fit(&cfg, &out),
        Command::Convert { .. } => unreachable!(),
    }?;
    out.json("summary.json", &summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rfstat: {e}");
            ExitCode::from(e.code)
        }
    }
}
