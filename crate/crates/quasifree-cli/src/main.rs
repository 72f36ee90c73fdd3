//! `quasifree`: entanglement-scaling experiments for quasi-free lattice
//! models in the half-space geometry.
//!
//! Each subcommand runs one experiment end to end and writes CSV/JSON
//! artifacts plus a `manifest.json` (file list, effective config, config
//! hash) into the output directory. Identical configs and worker counts
//! produce byte-identical outputs.

mod config;
mod experiments;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Kind, ModelKind, PartialConfig};
use quasifree::error::Error;
use quasifree::model::Statistics;

#[derive(Parser)]
#[command(
    name = "quasifree",
    version,
    about = "Entanglement scaling laboratory for quasi-free lattices (half-space geometry)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dispersion cuts along phi_1 and a surface minimum scan.
    Dispersion(CommonArgs),
    /// Fermi-set volume v(Phi_sigma): grid estimate vs closed form.
    FermiVolume(CommonArgs),
    /// Aggregated fermionic log law E(M) over the transverse grid.
    FermionScaling(CommonArgs),
    /// Bosonic area-law check over N and regularizer ladders.
    BosonArealaw(CommonArgs),
    /// Transverse negativity integral with quadrature extrapolation.
    NegativityBound(CommonArgs),
    /// v(Phi_2)(a) scan with kink detection.
    Lifshitz(CommonArgs),
    /// Finite-N half-space entropy vs the harmonic lower bound.
    HalfspaceDivergence(CommonArgs),
    /// Run the experiment named by `kind` in the config file.
    Run(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Plain-text config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = library default).
    #[arg(long)]
    workers: Option<usize>,
    /// Seed, reserved for sampling estimators (current estimators are
    /// deterministic); recorded in the manifest.
    #[arg(long)]
    seed: Option<u64>,
    /// Main resolution knob of the experiment (grid points or quadrature
    /// top level depending on the subcommand).
    #[arg(long)]
    resolution: Option<usize>,
    /// Spatial dimension D.
    #[arg(long = "dim")]
    dimension: Option<usize>,
    /// Model family: nn-fermion | half-filled | nn-boson | kg-boson | custom.
    #[arg(long)]
    model: Option<String>,
    /// Statistics for custom models: boson | fermion.
    #[arg(long)]
    statistics: Option<String>,
    /// Nearest-neighbor hopping a.
    #[arg(long)]
    a: Option<f64>,
    /// Boson coupling c (defaults to the critical 1/(2D)).
    #[arg(long)]
    c: Option<f64>,
    /// Klein-Gordon mass.
    #[arg(long)]
    mass: Option<f64>,
    /// Klein-Gordon box length L.
    #[arg(long)]
    box_length: Option<f64>,
    /// Klein-Gordon velocity v.
    #[arg(long)]
    velocity: Option<f64>,
    /// Klein-Gordon discretization size N for the coupling c_N.
    #[arg(long)]
    kg_n: Option<usize>,
    /// Block-size ladder, e.g. 64,128,256,512,1024.
    #[arg(long, value_delimiter = ',')]
    m_ladder: Option<Vec<usize>>,
    /// System-size ladder, e.g. 64,128,256,512.
    #[arg(long, value_delimiter = ',')]
    n_ladder: Option<Vec<usize>>,
    /// Regularizer factors f (mu_reg = f/N), e.g. 1.0,0.5,0.25.
    #[arg(long, value_delimiter = ',')]
    mu_factors: Option<Vec<f64>>,
    /// Lifshitz scan lower end.
    #[arg(long)]
    a_min: Option<f64>,
    /// Lifshitz scan upper end.
    #[arg(long)]
    a_max: Option<f64>,
    /// Lifshitz scan points.
    #[arg(long)]
    a_points: Option<usize>,
    /// Transverse momentum components for dispersion cuts.
    #[arg(long, value_delimiter = ',')]
    phi_prime: Option<Vec<f64>>,
    /// Subleading constant override.
    #[arg(long)]
    c0: Option<f64>,
    /// Discontinuity count sigma for fermi-volume.
    #[arg(long)]
    sigma: Option<usize>,
}

fn partial_from_args(args: &CommonArgs) -> Result<PartialConfig, Error> {
    let model = match &args.model {
        None => None,
        Some(s) => Some(match s.as_str() {
            "nn-fermion" => ModelKind::NnFermion,
            "half-filled" => ModelKind::HalfFilled,
            "nn-boson" => ModelKind::NnBoson,
            "kg-boson" => ModelKind::KgBoson,
            "custom" => ModelKind::Custom,
            other => {
                return Err(Error::InvalidInput(format!("unknown model `{other}`")));
            }
        }),
    };
    let statistics = match &args.statistics {
        None => None,
        Some(s) => Some(match s.as_str() {
            "boson" => Statistics::Boson,
            "fermion" => Statistics::Fermion,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown statistics `{other}`"
                )));
            }
        }),
    };
    Ok(PartialConfig {
        kind: None,
        statistics,
        dimension: args.dimension,
        model,
        a: args.a,
        c: args.c,
        mass: args.mass,
        box_length: args.box_length,
        velocity: args.velocity,
        kg_n: args.kg_n,
        couplings: Vec::new(),
        params: Vec::new(),
        resolution: args.resolution,
        m_ladder: args.m_ladder.clone(),
        n_ladder: args.n_ladder.clone(),
        mu_factors: args.mu_factors.clone(),
        a_min: args.a_min,
        a_max: args.a_max,
        a_points: args.a_points,
        phi_prime: args.phi_prime.clone(),
        c0: args.c0,
        sigma: args.sigma,
        out_dir: args.out_dir.clone(),
        workers: args.workers,
        seed: args.seed,
    })
}

fn module_of(e: &Error) -> &'static str {
    match e {
        Error::AsymmetricCoupling { .. } | Error::UnstableHamiltonian { .. } => "model",
        Error::CriticalZeroMode { .. }
        | Error::DegenerateSymbol
        | Error::NotPositiveDefinite
        | Error::EigenvalueOutOfRange { .. } => "gaussian_core",
        Error::NonFiniteAggregate { .. } => "decouple",
        Error::NoConvergence(_) => "analysis",
        Error::Config { .. } => "config",
        Error::DimensionMismatch { .. } | Error::InvalidInput(_) => "input",
    }
}

fn execute(kind: Option<Kind>, args: &CommonArgs) -> Result<PathBuf, (String, Error)> {
    let flag_partial = partial_from_args(args).map_err(|e| (String::new(), e))?;
    let file_partial = match &args.config {
        None => PartialConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                (
                    String::new(),
                    Error::InvalidInput(format!("cannot read config {path:?}: {e}")),
                )
            })?;
            config::parse_config(&text).map_err(|e| (path.display().to_string(), e))?
        }
    };
    let merged = file_partial.overlay(flag_partial);
    let resolved = config::resolve(kind, merged).map_err(|e| (String::new(), e))?;
    experiments::run(&resolved).map_err(|e| (String::new(), e))?;
    Ok(resolved.out_dir.join("manifest.json"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Dispersion(a) => (Some(Kind::Dispersion), a),
        Command::FermiVolume(a) => (Some(Kind::FermiVolume), a),
        Command::FermionScaling(a) => (Some(Kind::FermionScaling), a),
        Command::BosonArealaw(a) => (Some(Kind::BosonArealaw), a),
        Command::NegativityBound(a) => (Some(Kind::NegativityBound), a),
        Command::Lifshitz(a) => (Some(Kind::Lifshitz), a),
        Command::HalfspaceDivergence(a) => (Some(Kind::HalfspaceDivergence), a),
        Command::Run(a) => (None, a),
    };
    match execute(kind, args) {
        Ok(manifest) => {
            println!("wrote {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err((context, e)) => {
            if let Error::Config { line, msg } = &e {
                if context.is_empty() {
                    eprintln!("error: config: line {line}: {msg}");
                } else {
                    eprintln!("error: {context}:{line}: {msg}");
                }
            } else {
                eprintln!("error: {}: {e}", module_of(&e));
            }
            ExitCode::FAILURE
        }
    }
}
