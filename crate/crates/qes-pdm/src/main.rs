//! Thin command-line front end: flag parsing, config-file merge, dispatch,
//! and file/stdout output. All logic lives in the library.
//!
//! Exit codes: 0 success/verified, 1 usage or config error, 2 verification
//! failure.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qes_pdm::cli::{self, Command as RunCommand, PartialConfig, ResolvedConfig};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qes-pdm",
    about = "Quasi-exactly-solvable potentials for position-dependent-mass Schrödinger problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Algebraic ε-spectrum two ways, with closed-form energies (JSON)
    Spectrum(CommonArgs),
    /// Potential curve V(x) for the chosen family (CSV or JSON)
    Potential(CommonArgs),
    /// Wavefunctions ψ(x), raw and L²-normalized (CSV or JSON)
    Wavefunction(CommonArgs),
    /// Verify every algebraic state against the independent eigensolver (JSON)
    Verify(CommonArgs),
    /// Pointwise residual profile of the expanded equation (CSV or JSON)
    Residual(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Potential family: sextic | coulomb | morse | general
    #[arg(long)]
    family: Option<String>,
    /// Algebra parameter ℓ
    #[arg(long)]
    ell: Option<f64>,
    /// Algebra parameter b
    #[arg(long)]
    b: Option<f64>,
    /// Algebra parameter q (q = 0 selects the exactly-solvable reduction)
    #[arg(long)]
    q: Option<f64>,
    /// Spin j (integer or half-integer, as a decimal)
    #[arg(long)]
    j: Option<f64>,
    /// Kinetic ordering exponent α
    #[arg(long)]
    alpha: Option<f64>,
    /// Kinetic ordering exponent β (γ = −1−α−β)
    #[arg(long)]
    beta: Option<f64>,
    /// Mass profile: built-in name (constant|rational2|quadratic) or an expression in x
    #[arg(long)]
    mass: Option<String>,
    /// Mass parameter, name=value (repeatable)
    #[arg(long = "mass-param", value_name = "NAME=VALUE")]
    mass_param: Vec<String>,
    /// λ₀ for the general family
    #[arg(long)]
    lambda0: Option<f64>,
    /// λ₁ for the general family
    #[arg(long)]
    lambda1: Option<f64>,
    /// λ₂ for the general family
    #[arg(long)]
    lambda2: Option<f64>,
    /// Initial r(xmin) for the general family
    #[arg(long)]
    r0: Option<f64>,
    /// Grid lower bound
    #[arg(long)]
    xmin: Option<f64>,
    /// Grid upper bound
    #[arg(long)]
    xmax: Option<f64>,
    /// Grid point count
    #[arg(long)]
    n: Option<usize>,
    /// Which algebraic state to use where one must be selected
    #[arg(long = "epsilon-index")]
    epsilon_index: Option<usize>,
    /// Output path (CSV gets a sibling <path>.meta.json); stdout when absent
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// JSON config file mirroring these flags (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of ladder states for the q = 0 reduction
    #[arg(long = "num-states")]
    num_states: Option<usize>,
    /// Testing aid: shift every algebraic energy by this amount
    #[arg(long = "debug-shift")]
    debug_shift: Option<f64>,
    /// Root-residual tolerance
    #[arg(long = "tol-root")]
    tol_root: Option<f64>,
    /// Residual tolerance for verification
    #[arg(long = "tol-residual")]
    tol_residual: Option<f64>,
    /// Eigenvalue-match tolerance for verification
    #[arg(long = "tol-match")]
    tol_match: Option<f64>,
}

fn parse_mass_params(items: &[String]) -> anyhow::Result<Option<BTreeMap<String, f64>>> {
    if items.is_empty() {
        return Ok(None);
    }
    let mut map = BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .with_context(|| format!("--mass-param `{item}` is not NAME=VALUE"))?;
        let v: f64 = value
            .parse()
            .with_context(|| format!("--mass-param `{item}` has a non-numeric value"))?;
        map.insert(name.trim().to_string(), v);
    }
    Ok(Some(map))
}

impl CommonArgs {
    fn to_partial(&self) -> anyhow::Result<PartialConfig> {
        Ok(PartialConfig {
            family: self.family.clone(),
            ell: self.ell,
            b: self.b,
            q: self.q,
            j: self.j,
            alpha: self.alpha,
            beta: self.beta,
            mass: self.mass.clone(),
            mass_params: parse_mass_params(&self.mass_param)?,
            lambda0: self.lambda0,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            r0: self.r0,
            xmin: self.xmin,
            xmax: self.xmax,
            n: self.n,
            epsilon_index: self.epsilon_index,
            out: self.out.clone(),
            format: self.format.clone(),
            num_states: self.num_states,
            debug_shift: self.debug_shift,
            tol_root: self.tol_root,
            tol_residual: self.tol_residual,
            tol_match: self.tol_match,
        })
    }

    fn resolve(&self, cmd: RunCommand) -> anyhow::Result<ResolvedConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                Some(PartialConfig::from_json(&text)?)
            }
            None => None,
        };
        Ok(ResolvedConfig::resolve(self.to_partial()?, file, cmd)?)
    }
}

/// Write `content` to `out` or stdout; `meta` (when present) goes next to a
/// file output as <out>.meta.json and to stdout otherwise.
fn emit(out: Option<&str>, content: &str, meta: Option<&str>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {path}"))?;
            if let Some(meta) = meta {
                let meta_path = format!("{path}.meta.json");
                std::fs::write(&meta_path, meta)
                    .with_context(|| format!("writing {meta_path}"))?;
            }
            Ok(())
        }
        None => {
            print!("{content}");
            if let Some(meta) = meta {
                print!("{meta}");
            }
            Ok(())
        }
    }
}

fn out_path(cfg: &ResolvedConfig) -> Option<&str> {
    cfg.out.as_deref()
}

fn strip_bulk(mut rep: cli::PotentialReport) -> cli::PotentialReport {
    rep.x.clear();
    rep.v.clear();
    rep
}

fn run(cmd: &Cmd) -> anyhow::Result<i32> {
    match cmd {
        Cmd::Spectrum(args) => {
            let cfg = args.resolve(RunCommand::Spectrum)?;
            let rep = cli::run_spectrum(&cfg)?;
            emit(out_path(&cfg), &cli::json_string(&rep), None)?;
            Ok(0)
        }
        Cmd::Potential(args) => {
            let cfg = args.resolve(RunCommand::Potential)?;
            let rep = cli::run_potential(&cfg)?;
            if cfg.format == "csv" {
                let csv = cli::potential_csv(&rep);
                let meta = cli::json_string(&strip_bulk(rep));
                emit(out_path(&cfg), &csv, Some(&meta))?;
            } else {
                emit(out_path(&cfg), &cli::json_string(&rep), None)?;
            }
            Ok(0)
        }
        Cmd::Wavefunction(args) => {
            let cfg = args.resolve(RunCommand::Wavefunction)?;
            let rep = cli::run_wavefunction(&cfg)?;
            if cfg.format == "csv" {
                let csv = cli::wavefunction_csv(&rep);
                emit(out_path(&cfg), &csv, None)?;
            } else {
                emit(out_path(&cfg), &cli::json_string(&rep), None)?;
            }
            Ok(0)
        }
        Cmd::Verify(args) => {
            let cfg = args.resolve(RunCommand::Verify)?;
            let rep = cli::run_verify(&cfg)?;
            let pass = rep.pass;
            emit(out_path(&cfg), &cli::json_string(&rep), None)?;
            if pass {
                Ok(0)
            } else {
                eprintln!(
                    "verification FAILED: unmatched states {:?}",
                    rep.unmatched_normalizable
                );
                Ok(2)
            }
        }
        Cmd::Residual(args) => {
            let cfg = args.resolve(RunCommand::Residual)?;
            let rep = cli::run_residual(&cfg)?;
            if cfg.format == "csv" {
                let csv = cli::residual_csv(&rep);
                emit(out_path(&cfg), &csv, None)?;
            } else {
                emit(out_path(&cfg), &cli::json_string(&rep), None)?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            // config/usage problems and computation failures both exit 1
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
