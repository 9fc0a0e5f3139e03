//! `grkhs`: experiments on worst-case approximation with Gaussian kernels.
//!
//! Exit status: 0 success, 1 invalid input, 2 resource limit, 3 failed
//! verification.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_criterion, ExperimentConfig, FileConfig, InfoClass, DEFAULT_SEED};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Resource(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<grkhs::Error> for CliError {
    fn from(e: grkhs::Error) -> Self {
        match e {
            grkhs::Error::ResourceLimit { partial: Some(p), .. } => {
                CliError::Resource(format!("{e} (partial lower bound {p})"))
            }
            grkhs::Error::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "grkhs", version, about = "Worst-case approximation and tractability experiments for Gaussian kernels")]
struct Cli {
    /// JSON file with experiment parameters; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Univariate eigenvalues: closed form next to the Nyström discretization.
    Spectrum(Params),
    /// The n largest d-variate eigenvalues with their multi-indices.
    Eigs(Params),
    /// Minimal errors e(0..=N), one table per dimension.
    Decay(Params),
    /// Information complexity n(ε, d) over an (ε, d) grid.
    Complexity(Params),
    /// Fitted convergence rates of the minimal errors.
    Rates(Params),
    /// Worst-case errors of the spline on random or given designs.
    SplineBench(Params),
    /// Runs the self-check suite; exits with 3 if any check fails.
    Verify(Params),
}

#[derive(Debug, Clone, Default, Args)]
struct Params {
    /// Shape rule: iso:<γ>, powerlaw:<c>:<α>, geom:<q> or explicit:<γ1,γ2,...>.
    /// Repeat the flag for several shapes.
    #[arg(long)]
    shape: Vec<String>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    /// Number of functionals or design sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Largest n of an error sequence.
    #[arg(long = "N")]
    big_n: Option<usize>,
    /// Error tolerances, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// abs or nor.
    #[arg(long)]
    criterion: Option<String>,
    /// Information class: all or std.
    #[arg(long)]
    class: Option<String>,
    /// Quadrature nodes per coordinate.
    #[arg(long)]
    m: Option<usize>,
    /// Seed for random designs.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV file with one design point per row.
    #[arg(long)]
    design_file: Option<PathBuf>,
    /// Random designs per (d, n) cell.
    #[arg(long)]
    designs: Option<usize>,
    /// Shape parameters for `spectrum`, comma separated.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Number of eigenvalues for `spectrum`.
    #[arg(long)]
    k: Option<usize>,
    /// Rate-fit window lo,hi.
    #[arg(long, value_delimiter = ',')]
    window: Option<Vec<usize>>,
    /// Output CSV path (stdout if absent).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// JSON report path for `complexity`.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn dyadic(k: i32) -> Vec<f64> {
    (1..=k).map(|i| 2f64.powi(-i)).collect()
}

/// Merges flags over the file config and fills per-command defaults.
fn resolve(command: &str, flags: Params, file: FileConfig) -> Result<ExperimentConfig, CliError> {
    if let Some(c) = &file.command {
        if c != command {
            return Err(CliError::Validation(format!(
                "config file is for command '{c}', not '{command}'"
            )));
        }
    }
    let shape = if !flags.shape.is_empty() {
        flags.shape
    } else if let Some(s) = file.shape {
        s.into()
    } else {
        vec!["iso:1".to_string()]
    };
    let default_d = match command {
        "eigs" => vec![2],
        "complexity" => vec![1, 2, 4, 8, 16],
        "rates" => vec![16],
        "spline-bench" => vec![1, 2],
        _ => vec![1],
    };
    let default_n = match command {
        "spline-bench" => vec![1, 2, 5, 10, 20],
        _ => vec![10],
    };
    let criterion = match flags.criterion.or(file.criterion) {
        Some(c) => parse_criterion(&c)?,
        None => grkhs::Criterion::Absolute,
    };
    let class = match flags.class.or(file.class) {
        Some(c) => c.parse::<InfoClass>().map_err(CliError::Validation)?,
        None => InfoClass::All,
    };
    let window = match flags.window {
        Some(w) => match w.as_slice() {
            [lo, hi] => [*lo, *hi],
            _ => return Err(CliError::Validation("window takes exactly two values lo,hi".into())),
        },
        None => file.window.unwrap_or([100, 10_000]),
    };
    let default_big_n = if command == "rates" { 10_000 } else { 50 };
    let cfg = ExperimentConfig {
        command: command.to_string(),
        shape,
        d: flags.d.or(file.d.map(Into::into)).unwrap_or(default_d),
        n: flags.n.or(file.n.map(Into::into)).unwrap_or(default_n),
        big_n: flags.big_n.or(file.big_n).unwrap_or(default_big_n),
        eps: flags.eps.or(file.eps).unwrap_or_else(|| dyadic(6)),
        criterion,
        class,
        m: flags.m.or(file.m),
        seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        design_file: flags.design_file.or(file.design_file),
        designs: flags.designs.or(file.designs).unwrap_or(10),
        gamma: flags
            .gamma
            .or(file.gamma.map(Into::<Vec<f64>>::into))
            .unwrap_or_else(|| vec![0.1, 0.5, 1.0, 2.0, 10.0]),
        k: flags.k.or(file.k).unwrap_or(10),
        window,
        output: flags.output.or(file.output),
        report: flags.report.or(file.report),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn check_guard_env() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(grkhs::spectrum::MAX_EIGS_ENV) {
        match v.trim().parse::<u64>() {
            Ok(n) if n > 0 => {}
            _ => {
                return Err(CliError::Validation(format!(
                    "{} must be a positive integer, got '{v}'",
                    grkhs::spectrum::MAX_EIGS_ENV
                )))
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    check_guard_env()?;
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let (name, params) = match cli.command {
        Command::Spectrum(p) => ("spectrum", p),
        Command::Eigs(p) => ("eigs", p),
        Command::Decay(p) => ("decay", p),
        Command::Complexity(p) => ("complexity", p),
        Command::Rates(p) => ("rates", p),
        Command::SplineBench(p) => ("spline-bench", p),
        Command::Verify(p) => ("verify", p),
    };
    let cfg = resolve(name, params, file)?;
    match name {
        "spectrum" => commands::spectrum(&cfg),
        "eigs" => commands::eigs(&cfg),
        "decay" => commands::decay(&cfg),
        "complexity" => commands::complexity(&cfg),
        "rates" => commands::rates(&cfg),
        "spline-bench" => commands::spline_bench(&cfg),
        _ => commands::verify(&cfg),
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::OneOrMany;

    #[test]
    fn flags_override_file_values() {
        let file: FileConfig =
            serde_json::from_str(r#"{"shape": "powerlaw:1:2", "d": [1, 2], "N": 7, "seed": 3}"#).unwrap();
        let flags = Params {
            d: Some(vec![4]),
            ..Params::default()
        };
        let cfg = resolve("decay", flags, file).unwrap();
        assert_eq!(cfg.shape, vec!["powerlaw:1:2"]);
        assert_eq!(cfg.d, vec![4]);
        assert_eq!(cfg.big_n, 7);
        assert_eq!(cfg.seed, 3);
    }

    #[test]
    fn file_for_another_command_is_rejected() {
        let file: FileConfig = serde_json::from_str(r#"{"command": "rates"}"#).unwrap();
        assert!(matches!(resolve("decay", Params::default(), file), Err(CliError::Validation(_))));
    }

    #[test]
    fn one_or_many_accepts_both_forms() {
        let a: FileConfig = serde_json::from_str(r#"{"d": 3}"#).unwrap();
        assert_eq!(a.d, Some(OneOrMany::One(3)));
        assert!(serde_json::from_str::<FileConfig>(r#"{"unknown": 1}"#).is_err());
    }
}
