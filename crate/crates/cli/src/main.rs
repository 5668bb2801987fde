//! `saferisk` — attribute-based construction safety risk pipelines.
//!
//! One concern per subcommand, files as the composition mechanism:
//! `demo-data` / `attributes` / `reports` / `simulate` / `density` /
//! `ranges` / `escalate`. Every run is fully determined by its flags plus
//! an optional `key=value` config file (flags win), and each output file
//! embeds the effective configuration and input digests, so any artifact
//! can be reproduced byte for byte.
//!
//! Exit codes: 0 success, 1 validation or domain error, 2 i/o error.

mod commands;
mod ioutil;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use saferisk_core::riskcore::Basis;
use saferisk_core::simgen::NegativePolicy;

#[derive(Parser)]
#[command(name = "saferisk", version, about = "Attribute-based construction safety risk analytics")]
struct Cli {
    /// key=value file with defaults for the long options; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BasisArg {
    Real,
    Worst,
}

impl From<BasisArg> for Basis {
    fn from(value: BasisArg) -> Basis {
        match value {
            BasisArg::Real => Basis::Real,
            BasisArg::Worst => Basis::Worst,
        }
    }
}

impl std::str::FromStr for BasisArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(BasisArg::Real),
            "worst" => Ok(BasisArg::Worst),
            other => Err(format!("unknown basis '{other}' (real|worst)")),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Uni,
    Biv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SupportArg {
    Real,
    Nonneg,
    Unit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NegativesArg {
    Reject,
    Keep,
}

/// Which pseudo-observation map fills the u,v columns of bivariate output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PseudoArg {
    /// Standard normal CDF of the raw simulated values; saturates near 1
    /// unless the margins are roughly standard normal
    NormalCdf,
    /// Ranks of the simulated values over n+1; uniform by construction
    Rank,
}

impl From<NegativesArg> for NegativePolicy {
    fn from(value: NegativesArg) -> NegativePolicy {
        match value {
            NegativesArg::Reject => NegativePolicy::Reject,
            NegativesArg::Keep => NegativePolicy::Keep,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Export per-attribute relative risks and escalation deltas
    Attributes {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute report-level risk values from a report/attribute matrix
    Reports {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// Fail on reports with no attributes instead of dropping them
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate synthetic risk values with the smoothed bootstrap
    Simulate {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// uni: one margin; biv: (real, worst) pairs plus pseudo coordinates
        #[arg(long, value_enum, default_value = "biv")]
        mode: ModeArg,
        /// Margin simulated in uni mode
        #[arg(long, value_enum)]
        basis: Option<BasisArg>,
        #[arg(long = "n-sim")]
        n_sim: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        streams: Option<usize>,
        #[arg(long, value_enum, default_value = "reject")]
        negatives: NegativesArg,
        /// u,v column contents in biv mode
        #[arg(long, value_enum, default_value = "normal-cdf")]
        pseudo: PseudoArg,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel density or histogram export of a value sample
    Density {
        #[arg(long)]
        values: PathBuf,
        /// Column holding the values (default: sim_value/value or the only one)
        #[arg(long)]
        column: Option<String>,
        /// Apply the boundary correction for bounded supports
        #[arg(long)]
        corrected: bool,
        #[arg(long, value_enum)]
        support: Option<SupportArg>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Emit a histogram with this many bins instead of a density grid
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut a (usually simulated) sample into labeled risk ranges
    Ranges {
        #[arg(long)]
        values: PathBuf,
        /// Column holding the values (default: sim_value or risk_<basis>)
        #[arg(long)]
        column: Option<String>,
        #[arg(long, value_enum)]
        basis: Option<BasisArg>,
        /// Extra quantile levels to report, e.g. 0.9,0.998
        #[arg(long)]
        quantiles: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Conditional-quantile risk escalation for an observed attribute set
    Escalate {
        #[arg(long)]
        catalog: PathBuf,
        /// Simulated bivariate pairs (output of `simulate --mode biv`)
        #[arg(long)]
        pairs: PathBuf,
        /// Comma-separated attribute names observed onsite
        #[arg(long)]
        attributes: String,
        #[arg(long = "window-lo")]
        window_lo: Option<f64>,
        #[arg(long = "window-hi")]
        window_hi: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long = "min-support")]
        min_support: Option<usize>,
        /// Optional machine-readable report
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled demo catalog and an optional synthetic matrix
    DemoData {
        #[arg(long = "out-catalog")]
        out_catalog: PathBuf,
        #[arg(long = "out-matrix")]
        out_matrix: Option<PathBuf>,
        #[arg(long = "n-reports")]
        n_reports: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    match commands::run(cli.config.as_deref(), cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_io() { 2 } else { 1 })
        }
    }
}
