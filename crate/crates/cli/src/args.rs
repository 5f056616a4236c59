use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use svmaj::numerics::Exponent;
use svmaj::search::{DiagonalLaw, Objective, Sampler};
use svmaj::theorems::Direction;

#[derive(Debug, Parser)]
#[command(name = "svmaj", version, about = "Extended-precision checks of singular-value majorisation for PSD products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one check over random instances.
    Check(CheckArgs),
    /// Seeded search for violations at one exponent.
    Search(SearchArgs),
    /// Search over a grid of exponents and tabulate the violations.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Target {
    /// sigma(B^p A^p) against sigma((BA)^p)
    Theorem1,
    /// sigma(A^p B^p) against sigma^p(AB)
    Theorem2,
    /// sigma^p(X) against sigma(X^p) for X = S L S^-1
    Theorem3,
    /// Positivity of the power-quotient kernel and its integral form (p is alpha)
    LemmaFh,
    /// Residuals of A = SS*, AB = S L S^-1
    LemmaDecompose,
    /// (ABA)^2 <= A^4 against (A B^{1/p} A)^{2p} <= A^{4p}
    Implication,
    /// Agreement of the norm, similarity and final forms
    Equivalence,
}

impl Target {
    pub fn from_name(name: &str) -> Option<Target> {
        Target::value_variants().iter().copied().find(|t| t.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Theorem1 => "theorem1",
            Target::Theorem2 => "theorem2",
            Target::Theorem3 => "theorem3",
            Target::LemmaFh => "lemma_fh",
            Target::LemmaDecompose => "lemma_decompose",
            Target::Implication => "implication",
            Target::Equivalence => "equivalence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn exponent(s: &str) -> Result<Exponent, String> {
    let p: Exponent = s.parse().map_err(|e| format!("{e}"))?;
    if !p.is_positive() {
        return Err("must be positive".into());
    }
    Ok(p)
}

fn direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn sampler(s: &str) -> Result<Sampler, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn law(s: &str) -> Result<DiagonalLaw, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn digits(s: &str) -> Result<u32, String> {
    let d: u32 = s.parse().map_err(|_| format!("invalid digit count {s:?}"))?;
    if d < 20 {
        return Err("at least 20 digits are required".into());
    }
    Ok(d)
}

fn dim(s: &str) -> Result<usize, String> {
    let d: usize = s.parse().map_err(|_| format!("invalid dimension {s:?}"))?;
    if d == 0 {
        return Err("dimension must be at least 1".into());
    }
    Ok(d)
}

#[derive(Debug, Args)]
pub struct Common {
    /// Matrix dimension.
    #[arg(long, default_value = "3", value_parser = dim)]
    pub dim: usize,
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Decimal digits of working precision.
    #[arg(long, default_value = "60", value_parser = digits)]
    pub digits: u32,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub target: Target,
    #[command(flatten)]
    pub common: Common,
    /// Exponent; exact fractions such as 1/3 are accepted.
    #[arg(long, value_parser = exponent, required_unless_present = "replay")]
    pub p: Option<Exponent>,
    /// theorem1 only; defaults to forward for p <= 1, reversed otherwise.
    #[arg(long, value_parser = direction)]
    pub direction: Option<Direction>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Re-run the instances stored in a previous check report.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchOptions {
    /// premise_form or direct_form; default depends on p.
    #[arg(long, value_parser = objective)]
    pub objective: Option<Objective>,
    /// forward or reversed; default depends on p.
    #[arg(long, value_parser = direction)]
    pub direction: Option<Direction>,
    /// Direct-form instances: lifted or gram.
    #[arg(long, value_parser = sampler, default_value = "lifted")]
    pub sampler: Sampler,
    /// Law of the diagonal D: log-uniform or uniform.
    #[arg(long, value_parser = law, default_value = "log-uniform")]
    pub diag_law: DiagonalLaw,
    /// Local refinement steps applied to the best trial.
    #[arg(long, default_value_t = 50)]
    pub refine_steps: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: Common,
    /// Exponent; exact fractions such as 1/3 are accepted.
    #[arg(long, value_parser = exponent, required_unless_present = "replay")]
    pub p: Option<Exponent>,
    #[command(flatten)]
    pub options: SearchOptions,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Re-confirm the records of a previous search output.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = exponent)]
    pub p_from: Exponent,
    #[arg(long, value_parser = exponent)]
    pub p_to: Exponent,
    #[arg(long, value_parser = exponent)]
    pub p_step: Exponent,
    #[command(flatten)]
    pub options: SearchOptions,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Leave the seconds column empty so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}
