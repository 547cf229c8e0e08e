use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use latticeforge::checks::{self, CheckError, Status, VerificationReport};
use latticeforge::freeprod::{FreeProduct, FreeProductSpec, Notation};
use latticeforge::group::GroupSpec;
use latticeforge::order::{completion, Poset, PosetFile};
use latticeforge::valuation::Budgets;
use serde_json::{json, Value};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "latticeforge", version, about = "Free products, valuations and intermediate subgroup lattices")]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = "LATTICEFORGE_JOBS")]
    jobs: Option<usize>,
    /// Record wall time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Human-readable summary instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice of down-sets of a poset file.
    Complete { poset: PathBuf },
    /// Realize a poset's join semilattice by valuations and verify the correspondence.
    Realize {
        poset: String,
        #[command(flatten)]
        realization: RealizationArgs,
        #[arg(long, default_value_t = 3)]
        ball: usize,
    },
    /// Run a bounded verification.
    Verify(Box<VerifyArgs>),
    /// Normal form of a word.
    Word {
        expression: String,
        /// Compact (`C2*C3`) or JSON free-product spec.
        #[arg(long, default_value = "C2*C3")]
        spec: String,
        /// Comma-separated generator names.
        #[arg(long)]
        names: Option<String>,
    },
    /// Invariant subgroups of the block-triangular SL₂ module.
    Sl2 {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Poset file, or one of `singleton`, `chainN`, `antichainN`, `diamond`.
        #[arg(long, default_value = "chain2")]
        poset: String,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
    },
    /// Presentation of the truncated Ulm group B_λ.
    Ulm {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        lambda: u32,
    },
}

#[derive(Args, Clone)]
struct RealizationArgs {
    /// Compact spec of the factor Λ.
    #[arg(long)]
    factor: Option<String>,
    #[arg(long)]
    budget_elems: Option<usize>,
    #[arg(long)]
    budget_rounds: Option<usize>,
    #[arg(long)]
    skip_null_layers: bool,
}

/// Unset parameters take the per-check defaults listed in `--help`.
#[derive(Args)]
#[command(after_help = "Defaults per check:
  word-calculus             --spec C2*C3 --radius 6 --triple-radius 3
  power-growth              --spec C2*C3 --ball 4 --nmax 8
  playing-with-words        --ball 5 --budget 6
  w-decomposition           --ball 3 --budget 6 --z-radius 1
  elem-permutation          --n 6
  intersection-assumptions  --n 5 --z-radius 2 --budget 4
  valuation-axioms          --poset diamond --factor C2 --budget-elems 1 --budget-rounds 1 --skip-null-layers --total 8
  step1-uniqueness          --poset chain2 --factor C2 --budget-elems 1 --budget-rounds 1 --skip-null-layers --ball 5
  correspondence            --poset diamond --factor C2 --budget-elems 2 --budget-rounds 1 --skip-null-layers --ball 3
  sl2                       --p 2 --m 1 --poset chain2 --cap 1000
  remark-identity           --ball 3 --injectivity-ball 4
  ulm                       --p 2 --lambda 3
  phi-embedding             --count 100 --max-size 8 (uses --seed)")]
struct VerifyArgs {
    /// One of the check names listed below.
    check: String,
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    ball: Option<usize>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    triple_radius: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    z_radius: Option<usize>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    total: Option<usize>,
    #[arg(long)]
    poset: Option<String>,
    #[command(flatten)]
    realization: RealizationArgs,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    lambda: Option<u32>,
    #[arg(long)]
    injectivity_ball: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    max_size: Option<usize>,
}

/// Every error surfaced to the user is a usage error: the checks only fail on
/// parameters they cannot run with.
#[derive(Debug)]
struct CliError(String);

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        CliError(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

fn read_poset_file(path: &Path) -> Result<Poset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file: PosetFile = serde_json::from_str(&text).map_err(|e| {
        usage(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    Poset::from_file(&file).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// A poset file path, or a built-in name.
fn resolve_poset(arg: &str) -> Result<Poset, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return read_poset_file(path);
    }
    let sized = |prefix: &str| arg.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    match arg {
        "singleton" => Ok(Poset::chain(1)),
        "diamond" => Ok(Poset::diamond()),
        _ => {
            if let Some(n) = sized("chain") {
                Ok(Poset::chain(n))
            } else if let Some(n) = sized("antichain") {
                Ok(Poset::antichain(n))
            } else {
                Err(usage(format!("{arg}: no such file or built-in poset")))
            }
        }
    }
}

fn parse_spec(text: &str) -> Result<FreeProductSpec, CliError> {
    let t = text.trim();
    if t.starts_with('{') || t.starts_with('[') {
        if let Ok(spec) = serde_json::from_str::<FreeProductSpec>(t) {
            return Ok(spec);
        }
        let factors: Vec<GroupSpec> =
            serde_json::from_str(t).map_err(|e| usage(format!("spec: line {}, column {}: {e}", e.line(), e.column())))?;
        return Ok(FreeProductSpec::new(factors));
    }
    FreeProductSpec::parse_compact(t).map_err(|e| usage(format!("spec: {e}")))
}

fn parse_group(text: &str) -> Result<GroupSpec, CliError> {
    let spec = parse_spec(text)?;
    match <[GroupSpec; 1]>::try_from(spec.factors) {
        Ok([g]) => Ok(g),
        Err(_) => Err(usage("factor must be a single group")),
    }
}

fn free_product(text: &str) -> Result<FreeProduct, CliError> {
    FreeProduct::from_factors(parse_spec(text)?.factors).map_err(|e| usage(format!("spec: {e}")))
}

impl RealizationArgs {
    fn resolve(&self, elems: usize, skip: bool) -> Result<(GroupSpec, Budgets), CliError> {
        let lambda = parse_group(self.factor.as_deref().unwrap_or("C2"))?;
        let budgets = Budgets {
            elements: self.budget_elems.unwrap_or(elems),
            rounds: self.budget_rounds.unwrap_or(1),
            skip_null_layers: self.skip_null_layers || skip,
        };
        Ok((lambda, budgets))
    }
}

fn run_verify(a: &VerifyArgs, seed: u64) -> Result<VerificationReport, CliError> {
    let spec = || free_product(a.spec.as_deref().unwrap_or("C2*C3"));
    let poset = |default: &str| resolve_poset(a.poset.as_deref().unwrap_or(default));
    let r = match a.check.as_str() {
        "word-calculus" => checks::word_calculus(&spec()?, a.radius.unwrap_or(6), a.triple_radius.unwrap_or(3))?,
        "power-growth" => checks::power_growth(&spec()?, a.ball.unwrap_or(4), a.nmax.unwrap_or(8))?,
        "playing-with-words" => checks::playing_with_words(a.ball.unwrap_or(5), a.budget.unwrap_or(6))?,
        "w-decomposition" => {
            checks::w_decomposition(a.ball.unwrap_or(3), a.budget.unwrap_or(6), a.z_radius.unwrap_or(1))?
        }
        "elem-permutation" => checks::elem_permutation(a.n.unwrap_or(6))?,
        "intersection-assumptions" => {
            checks::intersection_assumptions(a.n.unwrap_or(5), a.z_radius.unwrap_or(2), a.budget.unwrap_or(4))?
        }
        "valuation-axioms" => {
            let (lambda, budgets) = a.realization.resolve(1, true)?;
            checks::valuation_axioms(&poset("diamond")?, &lambda, budgets, a.total.unwrap_or(8))?
        }
        "step1-uniqueness" => {
            let (lambda, budgets) = a.realization.resolve(1, true)?;
            checks::step1_uniqueness(&poset("chain2")?, &lambda, budgets, a.ball.unwrap_or(5))?
        }
        "correspondence" => {
            let (lambda, budgets) = a.realization.resolve(2, true)?;
            checks::correspondence(&poset("diamond")?, &lambda, budgets, a.ball.unwrap_or(3))?
        }
        "sl2" => checks::sl2(a.p.unwrap_or(2), a.m.unwrap_or(1), &poset("chain2")?, a.cap.unwrap_or(1000))?,
        "remark-identity" => checks::remark_identity(a.ball.unwrap_or(3), a.injectivity_ball.unwrap_or(4))?,
        "ulm" => checks::ulm(a.p.unwrap_or(2), a.lambda.unwrap_or(3))?,
        "phi-embedding" => checks::phi_embedding_check(a.count.unwrap_or(100), a.max_size.unwrap_or(8), seed)?,
        other => {
            return Err(usage(format!("unknown check {other:?}; expected one of {}", checks::CHECK_NAMES.join(", "))))
        }
    };
    Ok(r)
}

/// Output that is not a verification report: lattices and normal forms.
enum Outcome {
    Report(VerificationReport),
    Plain { value: Value, ok: bool },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    Ok(match &cli.command {
        Command::Complete { poset } => {
            let p = read_poset_file(poset)?;
            let lat = completion(&p).map_err(CheckError::from)?;
            let elements: Vec<Vec<&str>> =
                lat.elements.iter().map(|d| d.members.iter().map(|&i| p.label(i)).collect()).collect();
            let value = json!({
                "elements": elements,
                "le": lat.le,
                "meet": lat.meet,
                "join": lat.join,
                "bottom": lat.bottom(),
                "top": lat.top(),
            });
            Outcome::Plain { value, ok: lat.satisfies_lattice_axioms() }
        }
        Command::Realize { poset, realization, ball } => {
            let (lambda, budgets) = realization.resolve(Budgets::default().elements, false)?;
            Outcome::Report(checks::realization(&resolve_poset(poset)?, &lambda, budgets, *ball)?)
        }
        Command::Verify(args) => Outcome::Report(run_verify(args, cli.seed)?),
        Command::Word { expression, spec, names } => {
            let fp = free_product(spec)?;
            let notation = match names {
                Some(list) => Notation::with_names(&fp, &list.split(',').map(str::trim).collect::<Vec<_>>()),
                None => Notation::standard(&fp),
            };
            let w = notation.parse(&fp, expression).map_err(|e| usage(e.to_string()))?;
            let value = json!({
                "spec": fp.spec(),
                "input": expression,
                "normal_form": notation.format(&fp, &w),
                "length": w.len(),
                "cyclically_reduced": fp.is_cyclically_reduced(&w),
            });
            Outcome::Plain { value, ok: true }
        }
        Command::Sl2 { p, m, poset, cap } => Outcome::Report(checks::sl2(*p, *m, &resolve_poset(poset)?, *cap)?),
        Command::Ulm { p, lambda } => Outcome::Report(checks::ulm(*p, *lambda)?),
    })
}

fn summary(r: &VerificationReport) -> String {
    let status = match r.status {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Inconclusive => "inconclusive at budget",
    };
    let mut out = format!("{}: {status}\n  parameters: {}\n", r.check, r.parameters);
    for (k, v) in &r.statistics {
        out.push_str(&format!("  {k}: {v}\n"));
    }
    if let Some(ms) = r.wall_time_ms {
        out.push_str(&format!("  wall time: {ms} ms\n"));
    }
    for c in &r.counterexamples {
        out.push_str(&format!("  counterexample: {c}\n"));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    match run(&cli) {
        Ok(Outcome::Report(mut r)) => {
            r.seed = cli.seed;
            if cli.timing {
                r.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            if cli.pretty {
                print!("{}", summary(&r));
            } else {
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            }
            ExitCode::from(match r.status {
                Status::Pass => EXIT_PASS,
                Status::Fail => EXIT_FAIL,
                Status::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
        Ok(Outcome::Plain { value, ok }) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("value serializes"));
            ExitCode::from(if ok { EXIT_PASS } else { EXIT_FAIL })
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
