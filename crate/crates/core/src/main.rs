use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coupled_core::cli::{self, CliError};

const CONFIG_HELP: &str = "\
CONFIG FILE (JSON, unknown keys are rejected)
  mode              averaged | online | stability | derivcheck   (required)
  problem           pca | svd        (averaged/online; stability implies svd)
  rule              PCA: L2, L2_ALA, SUM_EXACT, SUM_MOD
                    SVD: L2, L2_SIMPLE, SUM_FULL (averaged only), SUM_MOD
  matrix            {\"generated\": {\"spectrum\": [..], \"rows\": n, \"cols\": n, \"seed\": <seed>}}
                    or {\"csv\": {\"path\": \"a.csv\"}}  (header `rows,cols`, then rows)
  seed              0
  integrator        {\"dt\": 0.05, \"steps\": 10000, \"method\": \"rk4\" | \"euler\",
                     \"thin\": 1, \"stop_residual\": null}
  online            {\"samples\": 100000, \"noise\": 0.0,
                     \"schedule\": {\"kind\": \"inverse_time\", \"rate\": 0.05, \"offset\": 100}
                               or {\"kind\": \"constant\", \"rate\": r}}
  derivcheck        {\"count\": 100}
  output_dir        \"out\"
  record_wall_time  false

OUTPUTS
  averaged, online  trajectory.csv, summary.json
  stability         stability.json
  derivcheck        derivcheck.json

EXIT CODES
  0 success, 1 I/O error, 2 divergence or numerical failure, 3 config error";

#[derive(Parser)]
#[command(name = "coupled", version, about = "Coupled PCA/SVD learning-rule experiments", after_long_help = CONFIG_HELP)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the version.
    Version,
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Version => {
            println!("coupled {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match cli::parse_config(&config) {
            Ok(_) => {
                println!("{}: ok", config.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Run { config, out } => {
            let result = cli::parse_config(&config).and_then(|cfg| cli::run(&cfg, out.as_deref()));
            match result {
                Ok(artifacts) => {
                    for (name, _) in &artifacts.files {
                        println!("wrote {name}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
