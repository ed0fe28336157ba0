//! Command-line grammar. Manifest lines reuse it, so every manifest check
//! is also a command that can be run on its own.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use superlie_core::engine::{ConsequenceBounds, DEFAULT_DEGREE_CAP};
use superlie_core::{Field, MultiDegree, Var};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "superlie", version, about = "Lie identities of the superalgebras M11(E) and M11(E1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Decide whether an expression is an identity, or evaluate it at a point.
    Check(CheckArgs),
    /// Identities of one multidegree component.
    Kernel(KernelArgs),
    /// Consequences of a set of identities in one multidegree component.
    Consequences(ConsequencesArgs),
    /// Compare two subspaces of one multidegree component.
    Equal(EqualArgs),
    /// Check the substitution relations on degree-5 multilinear identities.
    Subs(SubsArgs),
    /// Run every check of a manifest (the built-in one by default).
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    Q,
    Fp,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Ground field: the rationals or GF(p).
    #[arg(long, value_enum, default_value = "q")]
    pub field: FieldKind,
    /// Characteristic for --field=fp.
    #[arg(long)]
    pub p: Option<u64>,
}

impl FieldArgs {
    pub fn field(&self) -> Result<Field, CliError> {
        match (self.field, self.p) {
            (FieldKind::Q, None) => Ok(Field::Rational),
            (FieldKind::Q, Some(_)) => Err(CliError::Usage("--p needs --field=fp".into())),
            (FieldKind::Fp, None) => Err(CliError::Usage("--field=fp needs --p=<prime>".into())),
            (FieldKind::Fp, Some(p)) => Field::prime(p).map_err(|e| CliError::Usage(format!("--p={p}: {e}"))),
        }
    }

    /// Flags reproducing this field.
    pub fn tokens(&self) -> Vec<String> {
        match (self.field, self.p) {
            (FieldKind::Fp, Some(p)) => vec!["--field=fp".into(), format!("--p={p}")],
            _ => vec!["--field=q".into()],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AlgebraArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Use the unital Grassmann algebra E1 instead of E.
    #[arg(long)]
    pub unital: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DegreeArgs {
    /// The multilinear component in x1, ..., xN.
    #[arg(long, value_name = "N", conflicts_with = "degree")]
    pub multilinear: Option<u32>,
    /// A multidegree such as `x:3,y:3,z1`.
    #[arg(long, value_name = "MULTIDEGREE")]
    pub degree: Option<String>,
}

impl DegreeArgs {
    pub fn get(&self) -> Result<Option<MultiDegree>, CliError> {
        match (&self.multilinear, &self.degree) {
            (Some(n), _) => Ok(Some(MultiDegree::multilinear((1..=*n).map(|i| Var::indexed('x', i))))),
            (None, Some(text)) => parse_multidegree(text).map(Some),
            (None, None) => Ok(None),
        }
    }
}

pub fn parse_var(text: &str) -> Option<Var> {
    let mut cs = text.chars();
    let letter = cs.next().filter(|c| c.is_ascii_alphabetic())?;
    let rest = cs.as_str();
    if rest.is_empty() {
        return Some(Var::named(letter));
    }
    if !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().map(|i| Var::indexed(letter, i))
}

/// `x:3,y:3,z1`: each letter with an optional degree (default 1).
pub fn parse_multidegree(text: &str) -> Result<MultiDegree, CliError> {
    let bad = || CliError::Usage(format!("bad multidegree {text:?}, expected something like x:3,y:3,z1"));
    let body = text.trim().trim_start_matches('(').trim_end_matches(')');
    let mut d = MultiDegree::new();
    for part in body.split(',') {
        let (v, k) = match part.split_once(':') {
            Some((v, k)) => (v.trim(), k.trim().parse::<u32>().map_err(|_| bad())?),
            None => (part.trim(), 1),
        };
        let v = parse_var(v).ok_or_else(bad)?;
        if k == 0 || d.get(v) != 0 {
            return Err(bad());
        }
        d.add_var(v, k);
    }
    Ok(d)
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    /// Monomials per substituted variable (1 or 2).
    #[arg(long, default_value_t = ConsequenceBounds::default().summands)]
    pub summands: u32,
    /// Variables of one instance that may receive a sum.
    #[arg(long, default_value_t = ConsequenceBounds::default().max_pairs)]
    pub max_pairs: u32,
    /// Largest total degree handled.
    #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
    pub cap: u32,
}

impl BoundArgs {
    pub fn bounds(&self) -> ConsequenceBounds {
        ConsequenceBounds {
            summands: self.summands,
            max_pairs: self.max_pairs,
            cap: self.cap,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Identity file whose names can stand for expressions (repeatable).
    #[arg(long, value_name = "PATH")]
    pub ids: Vec<PathBuf>,
    /// Exit with status 1 unless the result is this outcome.
    #[arg(long, value_enum)]
    pub expect: Option<Outcome>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Print the JSON report, or write it to PATH with --json=PATH.
    #[arg(long, num_args = 0..=1, require_equals = true, value_name = "PATH")]
    pub json: Option<Option<PathBuf>>,
    /// Report 0 ms for every check, for byte-comparable reports.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// An expression such as `[x,y,[z,t],u]`, or a name from an identity file.
    #[arg(allow_hyphen_values = true)]
    pub expr: String,
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    /// Decide over M11(E_N) with N Grassmann generators.
    #[arg(long, value_name = "N")]
    pub generators: Option<u32>,
    /// Largest total degree decided (evaluation with --at is not capped).
    #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
    pub cap: u32,
    /// Evaluate at `x=((a, b), (d, c)); y=...` instead of deciding.
    #[arg(long, value_name = "ASSIGNMENT")]
    pub at: Option<String>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConsequencesArgs {
    /// Generators: names or expressions (an expression starting with `-`
    /// goes after `--`).
    pub gens: Vec<String>,
    /// Every identity of this file is a generator.
    #[arg(long, value_name = "PATH")]
    pub gens_file: Option<PathBuf>,
    /// Decide membership of this expression (its multidegree is the default).
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub contains: Option<String>,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EqualArgs {
    /// `kernel`, `kernel(E)`, `kernel(E1)`, `zero` or `consequences(a,b,...)`.
    pub left: String,
    /// Same forms as LEFT.
    pub right: String,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SubsArgs {
    /// `kernel` (every basis vector of the degree-5 kernel) or an expression.
    #[arg(allow_hyphen_values = true)]
    pub target: String,
    /// The variable playing x1 (default: the first variable).
    #[arg(long, value_name = "VAR")]
    pub x1: Option<String>,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Manifest file; the built-in manifest when omitted.
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub report: ReportArgs,
}

impl Command {
    pub fn input(&self) -> Option<&InputArgs> {
        match self {
            Command::Check(a) => Some(&a.input),
            Command::Kernel(a) => Some(&a.input),
            Command::Consequences(a) => Some(&a.input),
            Command::Equal(a) => Some(&a.input),
            Command::Subs(a) => Some(&a.input),
            Command::Verify(_) => None,
        }
    }

    pub fn report(&self) -> &ReportArgs {
        match self {
            Command::Check(a) => &a.report,
            Command::Kernel(a) => &a.report,
            Command::Consequences(a) => &a.report,
            Command::Equal(a) => &a.report,
            Command::Subs(a) => &a.report,
            Command::Verify(a) => &a.report,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Kernel(_) => "kernel",
            Command::Consequences(_) => "consequences",
            Command::Equal(_) => "equal",
            Command::Subs(_) => "subs",
            Command::Verify(_) => "verify",
        }
    }
}

/// Outcomes a check can be expected to have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Outcome {
    Identity,
    NonIdentity,
    Consequence,
    SpacesEqual,
    RelationsHold,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Identity => "identity",
            Outcome::NonIdentity => "non-identity",
            Outcome::Consequence => "consequence",
            Outcome::SpacesEqual => "spaces-equal",
            Outcome::RelationsHold => "relations-hold",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
