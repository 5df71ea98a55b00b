//! `krieger`: classify Bernoulli schemes and ITPFI factors, search and sample
//! cocycles, and compare the analytic and empirical verdicts.
//!
//! Exit codes: 0 definite result, 1 input error, 2 inconclusive or nothing
//! found within scope, 3 internal error.

mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use krieger_core::classifier::{classify_with, ClassifyOptions};
use krieger_core::cocycle::{
    self, brute_force_block, estimate_ratio_set, lattice_detect, mc_sample_cocycle, witness_search, Block,
    CocycleError, EstimateParams, SampleParams, Target, WitnessQuery, DEFAULT_SEED, DEFAULT_STATE_CAP,
};
use krieger_core::group::DEFAULT_EXPONENT_BOUND;
use krieger_core::scalar::parse_rational;
use krieger_core::scheme::file::{parse_document, write_factor, write_scheme, Document};
use krieger_core::scheme::{factor_to_scheme, normalize, scheme_to_factor, validate, Mode, ValidatedScheme};
use krieger_core::{BigRational, Scalar};

use output::{Emit, Format};

#[derive(Parser)]
#[command(name = "krieger", version, about = "Krieger types of Bernoulli schemes and ITPFI factors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the type from cluster sets and summability.
    Classify(ClassifyArgs),
    /// Search blocks for a word pair with cocycle near a target.
    Witness(WitnessArgs),
    /// Sample cocycle values and look for a lattice.
    Sample(SampleArgs),
    /// Exhaustive closest cocycle values on one block.
    Oracle(OracleArgs),
    /// Analytic and empirical verdicts side by side.
    Report(ReportArgs),
    /// Map factor files to scheme files and back.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct Common {
    /// Scheme or factor file.
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Evaluate weights in f64 even for an exact file.
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    /// Cap C in the type III series.
    #[arg(long, default_value = "1")]
    c: String,
    /// Largest exponent tried in commensurability checks.
    #[arg(long, default_value_t = DEFAULT_EXPONENT_BOUND)]
    exponent_bound: u64,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    common: Common,
    /// Target cocycle value r > 0.
    #[arg(long, required_unless_present = "zero_or_one")]
    target: Option<String>,
    /// Look for D near 0 or near 1 with x != y instead of a target.
    #[arg(long)]
    zero_or_one: bool,
    #[arg(long)]
    eps: String,
    /// Words agree on coordinates 1..=start.
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long, default_value_t = 12)]
    max_block: usize,
    /// Mass budget for infinite alphabets.
    #[arg(long, default_value = "1e-9")]
    delta: String,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: u64,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "1e-9")]
    delta: String,
    #[arg(long, default_value = "1e-6")]
    tol: String,
    /// Write `index,log_D,D_num,D_den` lines here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated targets.
    #[arg(long, value_delimiter = ',', required = true)]
    targets: Vec<String>,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long, default_value_t = 8)]
    block: usize,
    #[arg(long, default_value = "1e-9")]
    delta: String,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    window: usize,
    #[arg(long, default_value_t = 4096)]
    start: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "1e-9")]
    delta: String,
    #[arg(long, default_value = "1e-6")]
    tol: String,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    /// Kind of the input file; read from the file when omitted.
    #[arg(long, value_enum)]
    from: Option<Kind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Scheme,
    Factor,
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<CocycleError> for Failure {
    fn from(e: CocycleError) -> Self {
        match e {
            CocycleError::InsufficientSamples { .. } => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Outcome of a command that ran.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Definite,
    Open,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::panic::catch_unwind(|| run(cli.command));
    match result {
        Ok(Ok(Outcome::Definite)) => ExitCode::from(0),
        Ok(Ok(Outcome::Open)) => ExitCode::from(2),
        Ok(Err(Failure::Input(m))) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Internal(m))) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Classify(a) => cmd_classify(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Report(a) => cmd_report(a),
        Command::Convert(a) => cmd_convert(a),
    }
}

fn read(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Loads a scheme file, or a factor file converted to its scheme.
fn load(common: &Common) -> Result<ValidatedScheme, Failure> {
    let invalid = |e: krieger_core::scheme::SchemeError| Failure::Input(format!("{}: {e}", common.spec.display()));
    let mut spec = match read(&common.spec)? {
        Document::Scheme(spec) => spec,
        Document::Factor(factor) => factor_to_scheme(&factor).map_err(invalid)?.0.into_spec(),
    };
    if common.float {
        spec.mode = Mode::Float;
    }
    validate(&spec).map_err(invalid)
}

fn rational(flag: &str, text: &str) -> Result<BigRational, Failure> {
    parse_rational(text).ok_or_else(|| Failure::Input(format!("--{flag}: cannot read {text:?} as a number")))
}

/// A tolerance in (0, 1).
fn tolerance(flag: &str, text: &str) -> Result<BigRational, Failure> {
    let value = rational(flag, text)?;
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    if value <= zero || value >= one {
        return Err(Failure::Input(format!("--{flag} must lie in (0, 1), got {text}")));
    }
    Ok(value)
}

fn float_tolerance(flag: &str, text: &str) -> Result<f64, Failure> {
    tolerance(flag, text).map(|v| v.as_f64())
}

/// Runs `$body` with `$s` bound to the scalar type for the scheme's mode.
macro_rules! with_scalar {
    ($spec:expr, $s:ident => $body:expr) => {
        match $spec.mode() {
            Mode::Exact => {
                type $s = BigRational;
                $body
            }
            Mode::Float => {
                type $s = f64;
                $body
            }
        }
    };
}

fn cmd_classify(a: ClassifyArgs) -> Result<Outcome, Failure> {
    let spec = load(&a.common)?;
    let c = rational("c", &a.c)?;
    if c <= BigRational::from_integer(0.into()) {
        return Err(Failure::Input("--c must be positive".into()));
    }
    let verdict = classify_with(&spec, &ClassifyOptions { c, exponent_bound: a.exponent_bound });
    let doc = output::ClassifyDoc::new(&a.common.spec, &verdict);
    doc.emit(a.common.format);
    Ok(if verdict.label.is_definite() { Outcome::Definite } else { Outcome::Open })
}

fn cmd_witness(a: WitnessArgs) -> Result<Outcome, Failure> {
    let spec = load(&a.common)?;
    let eps = tolerance("eps", &a.eps)?;
    let delta = tolerance("delta", &a.delta)?;
    let target = match (&a.target, a.zero_or_one) {
        (_, true) => None,
        (Some(t), false) => Some(rational("target", t)?),
        (None, false) => return Err(Failure::Input("--target is required".into())),
    };
    if a.max_block == 0 {
        return Err(Failure::Input("--max-block must be positive".into()));
    }
    with_scalar!(spec, S => {
        let query = WitnessQuery {
            target: target.as_ref().map_or(Target::ZeroOrOne, |t| Target::Value(S::from_rational(t))),
            eps: S::from_rational(&eps),
            start: a.start,
            k_max: a.max_block,
            delta: S::from_rational(&delta),
            state_cap: a.state_cap,
        };
        let report = match witness_search(&spec, &query) {
            Ok(r) => r,
            Err(CocycleError::SearchBudgetExceeded { cap }) => {
                output::BudgetDoc::new(&a.common.spec, cap).emit(a.common.format);
                return Ok(Outcome::Open);
            }
            Err(e) => return Err(e.into()),
        };
        let found = report.witness.is_some();
        output::WitnessDoc::new(&a.common.spec, &report).emit(a.common.format);
        Ok(if found { Outcome::Definite } else { Outcome::Open })
    })
}

fn cmd_sample(a: SampleArgs) -> Result<Outcome, Failure> {
    let spec = load(&a.common)?;
    let delta = tolerance("delta", &a.delta)?;
    let tol = float_tolerance("tol", &a.tol)?;
    if a.samples == 0 || a.window == 0 {
        return Err(Failure::Input("--samples and --window must be positive".into()));
    }
    with_scalar!(spec, S => {
        let params = SampleParams {
            seed: a.seed,
            samples: a.samples,
            start: a.start,
            window: a.window,
            delta: S::from_rational(&delta),
        };
        let set = mc_sample_cocycle::<S>(&spec, &params)?;
        if let Some(out) = &a.out {
            fs::write(out, set.export()).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
        }
        let lattice = lattice_detect(&set.log_values(), tol).ok();
        output::SampleDoc::new(&a.common.spec, &set, lattice, tol, a.out.as_deref()).emit(a.common.format);
        Ok(if lattice.is_some() { Outcome::Definite } else { Outcome::Open })
    })
}

fn cmd_oracle(a: OracleArgs) -> Result<Outcome, Failure> {
    let spec = load(&a.common)?;
    let delta = tolerance("delta", &a.delta)?;
    let targets = a.targets.iter().map(|t| rational("targets", t)).collect::<Result<Vec<_>, _>>()?;
    with_scalar!(spec, S => {
        let block = Block::<S>::new(&spec, a.start, a.block, &S::from_rational(&delta))?;
        let targets: Vec<S> = targets.iter().map(S::from_rational).collect();
        let hits = brute_force_block(&block, &targets)?;
        output::OracleDoc::new(&a.common.spec, &block, &hits).emit(a.common.format);
        Ok(Outcome::Definite)
    })
}

fn cmd_report(a: ReportArgs) -> Result<Outcome, Failure> {
    let spec = load(&a.common)?;
    let params = EstimateParams {
        seed: a.seed,
        samples: a.samples,
        window: a.window,
        start: a.start,
        delta: float_tolerance("delta", &a.delta)?,
        tol: float_tolerance("tol", &a.tol)?,
        ..EstimateParams::default()
    };
    if a.samples == 0 || a.window == 0 {
        return Err(Failure::Input("--samples and --window must be positive".into()));
    }
    let verdict = classify_with(&spec, &ClassifyOptions::default());
    let empirical = with_scalar!(spec, S => estimate_ratio_set::<S>(&spec, &params)?);
    let agreement = cocycle::agreement(&verdict.label, &empirical.label);
    output::ReportDoc::new(&a.common.spec, &verdict, &empirical, agreement).emit(a.common.format);
    Ok(if verdict.label.is_definite() { Outcome::Definite } else { Outcome::Open })
}

fn cmd_convert(a: ConvertArgs) -> Result<Outcome, Failure> {
    let doc = read(&a.input)?;
    let invalid = |e: krieger_core::scheme::SchemeError| Failure::Input(format!("{}: {e}", a.input.display()));
    let text = match (doc, a.from) {
        (Document::Factor(factor), None | Some(Kind::Factor)) => {
            write_scheme(factor_to_scheme(&factor).map_err(invalid)?.0.spec())
        }
        (Document::Scheme(spec), None | Some(Kind::Scheme)) => {
            let (normalized, _) = normalize(&spec).map_err(invalid)?;
            write_factor(&scheme_to_factor(normalized.spec()))
        }
        (Document::Scheme(_), Some(Kind::Factor)) => {
            return Err(Failure::Input(format!("{}: expected a factor file", a.input.display())))
        }
        (Document::Factor(_), Some(Kind::Scheme)) => {
            return Err(Failure::Input(format!("{}: expected a scheme file", a.input.display())))
        }
    };
    match &a.out {
        Some(out) => fs::write(out, text).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?,
        None => print!("{text}"),
    }
    Ok(Outcome::Definite)
}
