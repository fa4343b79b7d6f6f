//! `semilinear`: reproducible experiments for `u_t = Δu + f(u)` with singular
//! initial data.
//!
//! Every run reads a JSON input file, writes JSON/CSV reports into the output
//! directory and embeds the SHA-256 of its manifest in each JSON report.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure or divergence,
//! 4 inconclusive.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semilinear_core::heat_solver::GridSpec;

mod commands;
mod manifest;
mod specs;
mod sweep;

use manifest::{Experiment, SpecError, Status};
use sweep::Sweep;

#[derive(Parser, Debug)]
#[command(name = "semilinear", version, about = "Experiments for u_t = Δu + f(u) with singular initial data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON input file for the command.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "SEMILINEAR_OUT", default_value = "semilinear-out")]
    out: PathBuf,
    /// Tolerance override (quadrature, Picard or supersolution, by command).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Window `lo:hi` for the large-u checks.
    #[arg(long, global = true, value_parser = parse_window)]
    window: Option<(f64, f64)>,
    /// Grid `r_min:r_mid:r_max:per_decade:uniform_step`.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Sweep a numeric input field: `path.to.field=lo:hi:n`.
    #[arg(long, global = true, value_parser = Sweep::parse)]
    sweep: Option<Sweep>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Regime verdict for (q, r), a nonlinearity, or the f_beta table.
    Classify,
    /// Exponents q and p with their diagnostic sequences.
    Profile,
    /// Build a singular datum and measure it.
    Data,
    /// Monotone iteration for the mild solution.
    Simulate,
    /// Supersolution and Jensen checks.
    Verify,
    /// Region map on a (q, r) grid.
    FigureMap,
    /// The constant solving log κ + 2 = κ.
    Kappa,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Profile => "profile",
            Command::Data => "data",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::FigureMap => "figure-map",
            Command::Kappa => "kappa",
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("window `{s}` is not lo:hi"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad window lower bound `{a}`"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad window upper bound `{b}`"))?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(format!("window needs 0 < lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    GridSpec::parse(s).map_err(|e| e.to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<SpecError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<semilinear_core::Error>() {
        Some(semilinear_core::Error::InvalidParameter(_)) => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let spec = match &cli.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| SpecError(format!("cannot read spec {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| SpecError(format!("spec {} is not JSON: {e}", path.display())))?
        }
        None if cli.command == Command::Kappa => serde_json::Value::Null,
        None => return Err(SpecError(format!("`{}` needs --spec", cli.command.name())).into()),
    };
    let base = Experiment {
        command: cli.command.name().to_string(),
        spec,
        tol: cli.tol,
        window: cli.window,
        grid: cli.grid.clone(),
        sweep_point: None,
        deterministic: true,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let spec_path = cli.spec.as_ref().map(|p| p.display().to_string());
    match &cli.sweep {
        None => {
            let outcome = commands::execute(cli.command, &base)?;
            manifest::write_run(&cli.out, &base, spec_path.as_deref(), &outcome)?;
            Ok(outcome.status)
        }
        Some(sw) => sweep::run_sweep(cli.command, &base, sw, &cli.out, spec_path.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
