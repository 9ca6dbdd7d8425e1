use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use scattercorr::cli::{export_psd_grid, run_scenario_file, GridVariant, Overrides, Scenario};

/// Spatial MIMO channel correlation simulator: builds exact and Kronecker
/// correlation matrices from bi-angular scattering spectra and estimates
/// average mutual information by Monte Carlo.
#[derive(Parser)]
#[command(name = "scattercorr", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: build each variant's correlation and sweep SNR,
    /// writing one capacity CSV per variant plus a run manifest.
    Run {
        /// Scenario TOML file.
        config: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the Monte Carlo trial count.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Tabulate the scenario's joint PSD (exact or Kronecker product) on a
    /// uniform angle grid and write it as CSV.
    ExportPsd {
        /// Scenario TOML file.
        config: PathBuf,
        /// Which density to tabulate.
        #[arg(long, value_enum)]
        variant: GridVariantArg,
        /// Grid points per axis.
        #[arg(long, default_value_t = 181)]
        resolution: usize,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GridVariantArg {
    Exact,
    Kronecker,
}

impl From<GridVariantArg> for GridVariant {
    fn from(v: GridVariantArg) -> Self {
        match v {
            GridVariantArg::Exact => GridVariant::Exact,
            GridVariantArg::Kronecker => GridVariant::Kronecker,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Run {
            config,
            seed,
            out_dir,
            trials,
        } => run_scenario_file(
            &config,
            &Overrides {
                seed,
                out_dir,
                trials,
            },
        )
        .map(|out| {
            for (variant, file) in &out.curve_files {
                println!("{variant}: {}", file.display());
            }
            println!("manifest: {}", out.manifest_file.display());
        }),
        Command::ExportPsd {
            config,
            variant,
            resolution,
            out_dir,
        } => Scenario::from_path(&config).and_then(|mut scenario| {
            if let Some(dir) = out_dir {
                scenario.out_dir = dir;
            }
            let (file, _) = export_psd_grid(&scenario, variant.into(), resolution)?;
            println!("psd grid: {}", file.display());
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
