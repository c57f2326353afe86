//! `oavqe` command-line driver.
//!
//! Exit status: 0 on success, 1 when verification fails or a run errors,
//! 2 on configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oavqe::ansatz::{Exponentiation, Family};
use oavqe::experiments::{
    run_band_structure, run_dissociation, run_spectrum, run_verify, CheckStatus, Experiment, RunConfig,
};
use oavqe::Error;

#[derive(Parser)]
#[command(name = "oavqe", version, about = "Orthogonal-ansatz VQE experiments on a statevector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Product-formula order, or `dense` for exact exponentials.
    #[arg(long, global = true)]
    trotter_r: Option<String>,
    /// a-gate-chain, hyperspherical-compact or hyperspherical-many-body.
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Tight-binding bands along a k-path.
    BandStructure,
    /// H2 energies over the fixture geometries.
    Dissociation,
    /// Every level of a PauliSum read from a text file.
    Spectrum {
        /// Lines of `<re> <im> <letters>`; overrides the config.
        hamiltonian: Option<PathBuf>,
    },
    /// Run the invariant suites and write a JSON report.
    Verify,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse(_) | Error::Integrals(_) | Error::Json(_) | Error::Io(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Run(other.to_string()),
        }
    }
}

fn build_config(common: &Common, experiment: Experiment) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(Failure::Config(format!("config is for {} but {} was requested", e.name(), experiment.name())));
        }
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(r) = &common.trotter_r {
        cfg.trotter_r = Some(r.parse::<Exponentiation>()?);
    }
    if let Some(f) = &common.family {
        cfg.family = Some(f.parse::<Family>()?);
    }
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(jobs) = common.jobs {
        cfg.jobs = jobs;
    }
    Ok(cfg)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::BandStructure => {
            let cfg = build_config(&cli.common, Experiment::BandStructure)?;
            let out = run_band_structure(&cfg)?;
            report(&out.write(&cfg.output_dir)?);
            for e in out.worst_per_band() {
                println!("band {} worst |error| {:.3e} at k_index {}", e.band_index, e.max_abs_error, e.k_index);
            }
            println!("max off-diagonal overlap {:.3e}", out.max_overlap());
        }
        Command::Dissociation => {
            let cfg = build_config(&cli.common, Experiment::Dissociation)?;
            let out = run_dissociation(&cfg)?;
            report(&out.write(&cfg.output_dir)?);
            println!("max |error| {:.3e} over {} geometries", out.max_abs_error(), out.geometries.len());
        }
        Command::Spectrum { hamiltonian } => {
            let mut cfg = build_config(&cli.common, Experiment::Spectrum)?;
            if hamiltonian.is_some() {
                cfg.hamiltonian = hamiltonian;
            }
            let out = run_spectrum(&cfg)?;
            report(&out.write(&cfg.output_dir)?);
            for (l, e) in out.result.energies().iter().enumerate() {
                println!("level {l}: {e:.11e} (exact {:.11e})", out.exact[l]);
            }
        }
        Command::Verify => {
            let cfg = build_config(&cli.common, Experiment::Verify)?;
            let out = run_verify(&cfg);
            report(&out.write(&cfg.output_dir)?);
            for c in &out.checks {
                let tag = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                println!("{tag} {}: {}", c.name, c.detail);
            }
            return Ok(out.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
