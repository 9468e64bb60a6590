//! Command-line front end for the spinkick simulator.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 i/o failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spinkick::effective::{validate_effective, DenseOptions, EffectiveError};
use spinkick::ensemble::{
    presets, run_and_emit, ConfigError, EnsembleError, ExperimentConfig,
};

#[derive(Parser)]
#[command(
    name = "spinkick",
    version,
    about = "Exact simulator for periodically kicked quantum spin networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a disorder-ensemble experiment and write trace.csv + manifest.json
    Run {
        /// JSON experiment configuration
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// Named preset from `spinkick presets`
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (defaults to the config's output.dir)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of disorder realizations
        #[arg(long)]
        realizations: Option<u64>,
        /// Override the number of drive periods
        #[arg(long)]
        periods: Option<u64>,
        /// Override the master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (results are identical for any value)
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write per-realization traces under realizations/
        #[arg(long)]
        store_realizations: bool,
    },
    /// Compare exact Floquet dynamics against the effective Hamiltonian
    ValidateEff {
        /// Named preset (needs eps_b = 1, e.g. s2-long or s3-*)
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        /// JSON experiment configuration
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comparison horizon in drive periods
        #[arg(long, default_value_t = 100)]
        horizon: u64,
        /// Dense-path site guard
        #[arg(long, default_value_t = 12)]
        max_dense_sites: usize,
        /// Disorder realization index used for the comparison
        #[arg(long, default_value_t = 0)]
        realization: u64,
    },
    /// List the published experiment presets
    Presets,
    /// Emit a gnuplot script for a finished run directory
    Plot {
        /// Directory containing trace.csv
        dir: PathBuf,
    },
}

fn load_config(
    config: Option<&Path>,
    preset: Option<&str>,
) -> Result<ExperimentConfig, CliError> {
    match (config, preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
            Ok(ExperimentConfig::from_json(&text)?)
        }
        (None, Some(name)) => Ok(presets::preset(name)?),
        _ => unreachable!("clap enforces exactly one source"),
    }
}

enum CliError {
    Config(String),
    Numerical(String),
    Io { path: PathBuf, source: std::io::Error },
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::Config(c) => Self::Config(c.to_string()),
            EnsembleError::Network(n) => Self::Config(n.to_string()),
            EnsembleError::Io { path, source } => Self::Io { path, source },
            other => Self::Numerical(other.to_string()),
        }
    }
}

impl From<EffectiveError> for CliError {
    fn from(e: EffectiveError) -> Self {
        match e {
            EffectiveError::DenseGuard { .. }
            | EffectiveError::EpsBNotOne(_)
            | EffectiveError::ZeroCoupling
            | EffectiveError::BadDimension { .. } => Self::Config(e.to_string()),
            other => Self::Numerical(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            preset,
            out,
            realizations,
            periods,
            seed,
            jobs,
            store_realizations,
        } => {
            let mut config = load_config(config.as_deref(), preset.as_deref())?;
            if let Some(l) = realizations {
                config.ensemble.n_realizations = l;
            }
            if let Some(n) = periods {
                config.schedule.n_periods = n;
            }
            if let Some(s) = seed {
                config.ensemble.master_seed = s;
            }
            if store_realizations {
                config.output.store_realizations = true;
            }
            config.validate().map_err(|e| CliError::Config(e.to_string()))?;
            let (result, written) = run_and_emit(&config, jobs, out.as_deref())?;
            eprintln!(
                "ran {} realizations x {} periods in {:.2}s",
                config.ensemble.n_realizations,
                config.schedule.n_periods,
                result.manifest.wall_time_seconds
            );
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::ValidateEff { preset, config, horizon, max_dense_sites, realization } => {
            let config = load_config(config.as_deref(), preset.as_deref())?;
            let (network, partition, initial) = config.realize()?;
            let protocol =
                config.drive_protocol().map_err(|e| CliError::Config(e.to_string()))?;
            let disorder = config.disorder_for(realization)?;
            let report = validate_effective(
                &network,
                &disorder,
                &protocol,
                &partition,
                &initial,
                horizon,
                &DenseOptions { max_sites: max_dense_sites },
            )?;
            println!("{}", report.to_json());
            Ok(())
        }
        Command::Presets => {
            for (name, description) in presets::catalog() {
                println!("{name:20} {description}");
            }
            Ok(())
        }
        Command::Plot { dir } => {
            let trace = dir.join("trace.csv");
            let header = std::fs::read_to_string(&trace)
                .map_err(|source| CliError::Io { path: trace.clone(), source })?
                .lines()
                .next()
                .unwrap_or_default()
                .to_string();
            let columns: Vec<&str> = header.split(',').collect();
            let script = plot_script(&columns);
            let path = dir.join("plot.gp");
            std::fs::write(&path, script)
                .map_err(|source| CliError::Io { path: path.clone(), source })?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn plot_script(columns: &[&str]) -> String {
    let mut script = String::from(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'n (drive periods)'\n",
    );
    let col = |name: &str| columns.iter().position(|c| *c == name).map(|i| i + 1);
    if let (Some(a), Some(b)) = (col("M_A"), col("M_B")) {
        script.push_str("set ylabel 'regional magnetization'\nset yrange [-1.1:1.1]\n");
        script.push_str(&format!(
            "plot 'trace.csv' using 1:{a} with lines title 'M_A', \\\n     'trace.csv' using 1:{b} with lines title 'M_B'\n",
        ));
    } else {
        script.push_str("set ylabel 'local magnetization'\nset yrange [-1.1:1.1]\n");
        let sites: Vec<String> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.starts_with("site_"))
            .map(|(i, c)| format!("'trace.csv' using 1:{} with lines title '{}'", i + 1, c))
            .collect();
        script.push_str(&format!("plot {}\n", sites.join(", \\\n     ")));
    }
    if let Some(s) = col("S_B") {
        script.push_str(&format!(
            "\n# entanglement entropy panel\n# set ylabel 'S_B'; set yrange [*:*]\n# plot 'trace.csv' using 1:{s} with lines title 'S_B'\n",
        ));
    }
    script
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("configuration error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(message)) => {
            eprintln!("numerical failure: {message}");
            ExitCode::from(3)
        }
        Err(CliError::Io { path, source }) => {
            eprintln!("i/o failure at {}: {source}", path.display());
            ExitCode::from(4)
        }
    }
}
