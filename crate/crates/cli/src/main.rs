//! `plumb`: invariants of plumbed 3-manifolds from the command line.

mod render;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use plumb_core::census::{self, Filter};
use plumb_core::engine::{basic_vectors, d_invariants_from, default_ar_bound, run_path, verdicts_from, RandomChoice};
use plumb_core::graph::{is_negative_definite, parse_forest_json};
use plumb_core::lattice::{char_box, DEFAULT_BUDGET};
use plumb_core::relations::{hf_summary, truncated_classes, HfParams};
use plumb_core::{parse_forest, reduce, Error, PlumbingForest, QFormContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use render::{Format, Report};

#[derive(Parser)]
#[command(name = "plumb", version, about = "Invariants of negative-definite plumbed 3-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args, Clone)]
struct Options {
    /// Emit JSON (sorted keys, exact rationals as ["num","den"]).
    #[arg(long, global = true, conflicts_with = "dot")]
    json: bool,
    /// Emit a Graphviz diagram.
    #[arg(long, global = true)]
    dot: bool,
    /// Largest U power kept by the truncated relation table.
    #[arg(long, global = true, value_name = "M", value_parser = clap::value_parser!(u32).range(1..))]
    max_u: Option<u32>,
    /// Box expansion B for relation searches (default 2|V|).
    #[arg(long, global = true, value_name = "B")]
    expansion: Option<u32>,
    /// Largest weight decrease tried when looking for an almost-rational vertex.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(i64).range(1..))]
    ar_bound: Option<i64>,
    /// Enumeration budget (box vectors, lattice points, states).
    #[arg(long, global = true, env = "PLUMB_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Seed for the randomized path strategy (cross-checks `basic`).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Input {
    /// Graph file (line format or JSON); `-` reads stdin.
    #[arg(required_unless_present = "chain", conflicts_with = "chain")]
    file: Option<PathBuf>,
    /// Inline chain, e.g. `--chain "-2 -3 -2"`.
    #[arg(long, allow_hyphen_values = true)]
    chain: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Definiteness, determinant, |H1|, spin^c count, minimality.
    Check(Input),
    /// Everything: basic vectors, verdicts, d-invariants, graded summary.
    Invariants(Input),
    /// Basic characteristic vectors per spin^c class.
    Basic(Input),
    /// d-invariants per spin^c class.
    Dinv(Input),
    /// Degree-wise class counts of the truncated relation table.
    Hf(Input),
    /// Blow down -1 vertices of degree <= 2 until none remain.
    Reduce(Input),
    /// Classify small weighted trees and write JSON lines.
    Census {
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        min_weight: i64,
        /// zhs, rational, nonrational, lspace, nonlspace, minimal (repeatable).
        #[arg(long = "filter", value_delimiter = ',')]
        filters: Vec<String>,
        /// Output path (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that E8 is the only unimodular negative-definite all-(-2) tree.
    VerifyE8 {
        #[arg(long, default_value_t = 9)]
        max_vertices: usize,
    },
    /// Check the homology-sphere L-space classification on small trees.
    VerifyClassification {
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
        #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
        min_weight: i64,
    },
}

/// Why the run failed, mapped onto exit codes.
enum Failure {
    Verification(String),
    Input(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Input(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Budget { .. }
            | Error::SafetyLimit(_)
            | Error::BoundExceeded(_)
            | Error::Unconverged { .. }
            | Error::Overflow => Failure::Budget(msg),
            Error::Verification(_) => Failure::Verification(msg),
            _ => Failure::Input(msg),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load(input: &Input) -> Result<PlumbingForest, Failure> {
    if let Some(chain) = &input.chain {
        let weights = chain
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| Failure::Input(format!("bad chain weight `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(PlumbingForest::chain(&weights));
    }
    let path = input.file.as_ref().expect("clap requires a file or --chain");
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    let parsed = if text.trim_start().starts_with('{') {
        parse_forest_json(&text)
    } else {
        parse_forest(&text)
    };
    parsed.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn context(forest: &PlumbingForest, opts: &Options) -> Result<QFormContext, Failure> {
    let ctx = QFormContext::negative_definite(forest)?;
    Ok(ctx.with_budget(opts.budget.unwrap_or(DEFAULT_BUDGET)))
}

fn params(ctx: &QFormContext, opts: &Options) -> HfParams {
    let default = HfParams::for_context(ctx);
    HfParams {
        max_u: opts.max_u.unwrap_or(default.max_u),
        expansion: opts.expansion.unwrap_or(default.expansion),
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let opts = &cli.opts;
    let report = match &cli.command {
        Command::Check(input) => {
            let forest = load(input)?;
            let spinc = match QFormContext::negative_definite(&forest) {
                Ok(ctx) => {
                    let ctx = ctx.with_budget(opts.budget.unwrap_or(DEFAULT_BUDGET));
                    match plumb_core::lattice::spinc_classes(&ctx) {
                        Ok(c) => Some(c.len()),
                        Err(Error::Budget { .. }) => None,
                        Err(e) => return Err(e.into()),
                    }
                }
                Err(_) => None,
            };
            Report::Check {
                negdef: is_negative_definite(&forest),
                spinc,
                forest,
            }
        }
        Command::Invariants(input) => {
            let forest = load(input)?;
            let ctx = context(&forest, opts)?;
            let basic = basic_vectors(&ctx)?;
            let ar_bound = opts.ar_bound.unwrap_or_else(|| default_ar_bound(&ctx));
            let verdicts = verdicts_from(&ctx, &basic, ar_bound)?;
            let d = d_invariants_from(&ctx, &basic)?;
            let hf = hf_summary(&ctx, params(&ctx, opts), &verdicts.ar)?;
            if hf.classes.iter().any(|c| !c.d_agrees) {
                return Err(Failure::Verification(
                    "tower bottom disagrees with -d from basic vectors".into(),
                ));
            }
            Report::Invariants {
                forest,
                basic,
                verdicts,
                d,
                hf,
            }
        }
        Command::Basic(input) => {
            let forest = load(input)?;
            let ctx = context(&forest, opts)?;
            let basic = basic_vectors(&ctx)?;
            if let Some(seed) = opts.seed {
                cross_check_strategy(&ctx, &basic, seed)?;
            }
            Report::Basic { forest, basic }
        }
        Command::Dinv(input) => {
            let forest = load(input)?;
            let ctx = context(&forest, opts)?;
            let basic = basic_vectors(&ctx)?;
            let d = d_invariants_from(&ctx, &basic)?;
            Report::Dinv { forest, d }
        }
        Command::Hf(input) => {
            let forest = load(input)?;
            let ctx = context(&forest, opts)?;
            let table = truncated_classes(&ctx, params(&ctx, opts))?;
            Report::Hf { forest, table }
        }
        Command::Reduce(input) => {
            let forest = load(input)?;
            let (reduced, trace) = reduce(&forest);
            Report::Reduce {
                forest,
                reduced,
                trace,
            }
        }
        Command::Census {
            max_vertices,
            min_weight,
            filters,
            out,
        } => {
            let filters = filters
                .iter()
                .map(|f| f.parse::<Filter>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Input(e.to_string()))?;
            let result = census::census_scan(*max_vertices, *min_weight, &filters)?;
            match out {
                Some(path) => {
                    let mut file = io::BufWriter::new(fs::File::create(path)?);
                    census::write_jsonl(&result.records, &mut file)?;
                    file.flush()?;
                }
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    match census::write_jsonl(&result.records, &mut lock) {
                        // the reader stopped early (`| head`); not an error
                        Err(plumb_core::Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => {
                            return Ok(Report::Nothing)
                        }
                        r => r?,
                    }
                }
            }
            eprintln!(
                "{} records, {} graphs skipped (box over {})",
                result.records.len(),
                result.skipped.len(),
                census::CENSUS_BUDGET
            );
            return Ok(Report::Nothing);
        }
        Command::VerifyE8 { max_vertices } => {
            if *max_vertices < 8 {
                return Err(Failure::Input("--max-vertices must be at least 8".into()));
            }
            let r = census::verify_e8_unique(*max_vertices)?;
            Report::VerifyE8(r)
        }
        Command::VerifyClassification {
            max_vertices,
            min_weight,
        } => Report::VerifyClassification(census::verify_classification(*max_vertices, *min_weight)?),
    };
    Ok(report)
}

/// Reruns every box vector with a seeded random strategy; the basic set
/// must not change.
fn cross_check_strategy(ctx: &QFormContext, basic: &plumb_core::BasicSet, seed: u64) -> Result<(), Failure> {
    let mut rng = RandomChoice(ChaCha8Rng::seed_from_u64(seed));
    let mut expected: Vec<_> = basic
        .classes
        .iter()
        .flat_map(|c| c.basic.iter().map(|b| b.initial.clone()))
        .collect();
    expected.sort();
    let mut got = Vec::new();
    for k in char_box(ctx)? {
        if run_path(&k, ctx, &mut rng)?.is_basic() {
            got.push(k);
        }
    }
    if got != expected {
        return Err(Failure::Verification(format!(
            "random strategy (seed {seed}) found {} basic vectors, lowest-index found {}",
            got.len(),
            expected.len()
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.opts.threads {
        // only fails if a pool exists already, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }
    let format = if cli.opts.json {
        Format::Json
    } else if cli.opts.dot {
        Format::Dot
    } else {
        Format::Text
    };
    match run(&cli) {
        Ok(report) => {
            let text = report.render(format);
            let mut stdout = io::stdout().lock();
            if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(report.exit_code())
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
