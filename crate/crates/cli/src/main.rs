//! `holecov`: batch front end for model checks, covariance grids, fitting,
//! kriging, cross-validation and simulation.
//!
//! Exit codes: 0 success; 1 input errors (unreadable or malformed files,
//! missing sections, empty holdout); 2 numerical failures. `check` exits 0
//! on a certified model, 2 on FAILED and 3 on UNCHECKED.

mod commands;
mod config;
mod failure;

use clap::{Args, Parser, Subcommand};
use config::{GridSpec, ModelSource, RunConfig};
use failure::Failure;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "holecov", version, about = "Anisotropic hole-effect covariance models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random draw; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the validity certificate of a model.
    Check {
        /// Model document; overrides the config's model.
        spec: Option<PathBuf>,
    },
    /// Evaluate C(h) on a planar lattice and write CSV rows (h1, h2, C).
    Grid {
        /// Model document; overrides the config's model.
        spec: Option<PathBuf>,
        /// x0,x1,y0,y1
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        extent: Option<Vec<f64>>,
        /// n1,n2
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<usize>>,
        /// Divide by C(0).
        #[arg(long)]
        normalize: bool,
        /// Evaluate models without a PROVED or NUMERIC certificate.
        #[arg(long)]
        allow_uncertified: bool,
    },
    /// Fit a model template to data.
    Fit,
    /// Simple kriging at query points.
    Krige,
    /// Split-sample validation on held-out rows.
    Cv,
    /// Draw a Gaussian realization.
    Simulate,
}

fn configure(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.common.output {
        cfg.output = Some(o.clone());
    }
    match &cli.command {
        Command::Check { spec: Some(p) } => cfg.model = Some(ModelSource::Path(p.clone())),
        Command::Grid { spec, extent, resolution, normalize, allow_uncertified } => {
            if let Some(p) = spec {
                cfg.model = Some(ModelSource::Path(p.clone()));
            }
            if extent.as_ref().is_some_and(|e| e.len() != 4) || resolution.as_ref().is_some_and(|r| r.len() != 2) {
                return Err(Failure::input("--extent takes x0,x1,y0,y1 and --resolution takes n1,n2"));
            }
            match (extent, resolution, &mut cfg.grid) {
                (Some(e), Some(r), _) => {
                    cfg.grid = Some(GridSpec { extent: [e[0], e[1], e[2], e[3]], resolution: [r[0], r[1]], normalize: false })
                }
                (Some(e), None, Some(g)) => g.extent = [e[0], e[1], e[2], e[3]],
                (None, Some(r), Some(g)) => g.resolution = [r[0], r[1]],
                (None, None, _) => {}
                _ => return Err(Failure::input("--extent and --resolution are both needed without a config grid")),
            }
            if *normalize {
                if let Some(g) = &mut cfg.grid {
                    g.normalize = true;
                }
            }
            cfg.allow_uncertified |= *allow_uncertified;
        }
        _ => {}
    }
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::input(format!("--threads {n}: {e}")))?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32, Failure> {
    let mut cfg = configure(cli)?;
    match cli.command {
        Command::Check { .. } => commands::check(&mut cfg),
        Command::Grid { .. } => commands::grid(&mut cfg),
        Command::Fit => commands::fit_cmd(&mut cfg),
        Command::Krige => commands::krige(&mut cfg),
        Command::Cv => commands::cv(&mut cfg),
        Command::Simulate => commands::simulate(&mut cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
