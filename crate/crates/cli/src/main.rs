use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use optlcl::catalog::{self, NAMES};
use optlcl::classify::{threshold_report, Classification};
use optlcl::pipeline::{Pipeline, RunReport, CSV_HEADER};
use optlcl::problem::OptLcl;
use optlcl::scalar::parse_rational;
use optlcl::sim::{build_algorithm, IdPolicy, LocalAlgorithm};
use optlcl::synthesis::SynthesisPlan;
use optlcl::tables;
use optlcl::verify::{enum_budget, max_enumerable_n, opt_bruteforce, ENUM_BUDGET_VAR};
use optlcl::Rational;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "optlcl", version, about = "Classify, synthesize and simulate optimization LCLs on directed cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cycle parameters of a problem.
    Params {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Also print the witness walks.
        #[arg(long)]
        witness: bool,
        /// Print the de Bruijn graph as DOT instead.
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Complexity class and strategy for one alpha.
    Classify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        json: bool,
    },
    /// Classification over all alpha >= 1.
    Thresholds {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        json: bool,
    },
    /// Build the algorithm plan for one alpha.
    Synthesize {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, required_unless_present = "load")]
        alpha: Option<String>,
        /// Write the replayable plan text to a file.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Read a plan written by --dump instead of synthesizing.
        #[arg(long, conflicts_with = "dump")]
        load: Option<PathBuf>,
    },
    /// Simulate one run and evaluate it.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the labeling.
        #[arg(long)]
        labels: bool,
        #[arg(long)]
        json: bool,
    },
    /// Many runs as CSV.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Cycle lengths: `N`, `A,B,..`, `A..B` or `A..B:STEP`.
        #[arg(long)]
        n: String,
        /// Seeds 0..SEEDS per length.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Exact optimum by dynamic programming.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Cycle lengths: `N`, `A,B,..`, `A..B` or `A..B:STEP`.
        #[arg(long)]
        n: String,
        /// Cross-check against exhaustive enumeration.
        #[arg(long)]
        bruteforce: bool,
        /// CSV output even for a single length.
        #[arg(long)]
        csv: bool,
    },
    /// List the catalog, or print one entry.
    Examples { name: Option<String> },
    /// Parameter and threshold tables for the catalog.
    Tables {
        /// Compare with the expected tables and fail on any difference.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    file: Option<PathBuf>,
    /// Catalog problem name.
    #[arg(long)]
    example: Option<String>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, required_unless_present = "plan")]
    alpha: Option<String>,
    /// Use a plan written by `synthesize --dump`.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Model::Auto)]
    model: Model,
    #[arg(long, value_enum, default_value_t = Ids::Random)]
    ids: Ids,
    /// Run length for adversarial identifiers.
    #[arg(long, default_value_t = 16)]
    block: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Auto,
    Det,
    Rand,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ids {
    Random,
    Adversarial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn load_problem(args: &ProblemArgs) -> Result<OptLcl<Rational>> {
    if let Some(name) = &args.example {
        return catalog::example(name).ok_or_else(|| anyhow!("unknown example `{name}`; try one of {}", NAMES.join(", ")));
    }
    let path = args.file.as_ref().expect("clap requires a file or an example");
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    OptLcl::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn parse_alpha(text: &str) -> Result<Rational> {
    let alpha: Rational = parse_rational(text).map_err(|e| anyhow!("--alpha: {e}"))?;
    if alpha < Rational::from_integer(1) {
        bail!("alpha must be >= 1");
    }
    Ok(alpha)
}

fn parse_lengths(text: &str) -> Result<Vec<usize>> {
    let num = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad length `{s}`"));
    let lengths: Vec<usize> = if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (num(hi)?, Some(num(step)?)),
            None => (num(rest)?, None),
        };
        let lo = num(lo)?;
        if hi < lo {
            bail!("empty range `{text}`");
        }
        let step = step.unwrap_or_else(|| ((hi - lo) / 9).max(1));
        if step == 0 {
            bail!("step must be positive");
        }
        let mut v: Vec<usize> = (lo..=hi).step_by(step).collect();
        if v.last() != Some(&hi) {
            v.push(hi);
        }
        v
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    if lengths.contains(&0) {
        bail!("cycle lengths must be positive");
    }
    Ok(lengths)
}

fn class_json(c: &Classification) -> Value {
    json!({
        "class": c.class.to_string(),
        "strategy": c.strategy.key(),
        "det": c.class.deterministic(),
        "rand": c.class.randomized(),
        "matched": c.matched_condition,
        "lower_bound": c.lower_bound_note,
    })
}

fn opt_string(v: &Option<impl ToString>) -> Value {
    v.as_ref().map_or(Value::Null, |v| Value::String(v.to_string()))
}

fn report_json(r: &RunReport<Rational>) -> Value {
    json!({
        "n": r.n,
        "seed": r.seed,
        "strategy": r.strategy.key(),
        "measured_locality": r.locality,
        "value": opt_string(&r.value),
        "opt": r.opt.to_string(),
        "ratio": opt_string(&r.ratio),
        "valid": r.valid,
        "alpha_ok": r.alpha_ok,
        "fallback": r.fallback,
    })
}

/// The plan from `--plan` or freshly synthesized, and the alpha it targets.
fn plan_for(pipe: &Pipeline<Rational>, sim: &SimArgs) -> Result<(SynthesisPlan<Rational>, Rational)> {
    let plan = match &sim.plan {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SynthesisPlan::from_text(&pipe.problem, &text).map_err(|e| anyhow!("{}: {e}", path.display()))?
        }
        None => pipe.plan(&parse_alpha(sim.alpha.as_deref().expect("clap requires alpha or plan"))?)?,
    };
    if let (Some(_), Some(a)) = (&sim.plan, &sim.alpha) {
        if parse_alpha(a)? != plan.alpha {
            bail!("--alpha {a} differs from the plan's alpha {}", plan.alpha);
        }
    }
    let alpha = plan.alpha;
    Ok((plan, alpha))
}

fn algorithm_for(pipe: &Pipeline<Rational>, plan: &SynthesisPlan<Rational>, model: Model) -> Result<Box<dyn LocalAlgorithm>> {
    if model == Model::Det && plan.strategy.is_randomized() {
        bail!("strategy {} is randomized; use --model rand", plan.strategy);
    }
    Ok(build_algorithm(&pipe.problem, plan)?)
}

fn id_policy(sim: &SimArgs) -> IdPolicy {
    match sim.ids {
        Ids::Random => IdPolicy::RandomPermutation,
        Ids::Adversarial => IdPolicy::AdversarialBlocks(sim.block),
    }
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Params { problem, witness, dot, json } => {
            let pipe = Pipeline::new(load_problem(&problem)?);
            if dot {
                print!("{}", pipe.graph.to_dot(&pipe.problem));
            } else if json {
                let mut obj = serde_json::Map::new();
                for (key, value) in pipe.params.entries() {
                    let v = match value {
                        optlcl::params::ParamValue::Cost(c) => opt_string(c),
                        optlcl::params::ParamValue::Flag(d) => json!(d),
                    };
                    obj.insert(key.into(), v);
                }
                println!("{}", Value::Object(obj));
            } else {
                print!("{}", pipe.params.report(&pipe.problem, &pipe.graph, witness));
            }
        }
        Command::Classify { problem, alpha, json } => {
            let pipe = Pipeline::new(load_problem(&problem)?);
            let c = pipe.classify(&parse_alpha(&alpha)?)?;
            if json {
                println!("{}", class_json(&c));
            } else {
                print!("{}", c.report());
            }
        }
        Command::Thresholds { problem, json } => {
            let pipe = Pipeline::new(load_problem(&problem)?);
            let report = threshold_report(&pipe.params)?;
            if json {
                let pieces: Vec<Value> = report
                    .pieces
                    .iter()
                    .map(|(i, c)| {
                        let mut v = class_json(c);
                        v["alpha"] = json!(i.to_string());
                        v
                    })
                    .collect();
                println!("{}", Value::Array(pieces));
            } else {
                print!("{}", report.report());
            }
        }
        Command::Synthesize { problem, alpha, dump, load } => {
            let pipe = Pipeline::new(load_problem(&problem)?);
            let plan = match load {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    SynthesisPlan::from_text(&pipe.problem, &text).map_err(|e| anyhow!("{}: {e}", path.display()))?
                }
                None => pipe.plan(&parse_alpha(alpha.as_deref().expect("clap requires alpha"))?)?,
            };
            if let Some(path) = dump {
                fs::write(&path, plan.to_text(&pipe.problem)).with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}", plan.report(&pipe.problem));
        }
        Command::Run { problem, sim, n, seed, labels, json } => {
            if n == 0 {
                bail!("--n must be positive");
            }
            let pipe = Pipeline::new(load_problem(&problem)?);
            let (plan, alpha) = plan_for(&pipe, &sim)?;
            let alg = algorithm_for(&pipe, &plan, sim.model)?;
            let report = pipe.run_once(alg.as_ref(), n, seed, id_policy(&sim), &alpha)?;
            if json {
                let mut v = report_json(&report);
                if labels {
                    v["labels"] = json!(pipe.problem.format_labels(&report.labeling));
                }
                println!("{v}");
            } else {
                print!("{}", report.text());
                if labels {
                    println!("labels = {}", pipe.problem.format_labels(&report.labeling));
                }
            }
            if !report.valid {
                eprintln!("error: invalid labeling");
                return Ok(ExitCode::from(2));
            }
            if !plan.strategy.is_randomized() && report.alpha_ok == Some(false) {
                eprintln!("error: deterministic strategy missed the approximation ratio");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Sweep { problem, sim, n, seeds } => {
            let lengths = parse_lengths(&n)?;
            let pipe = Pipeline::new(load_problem(&problem)?);
            let (plan, alpha) = plan_for(&pipe, &sim)?;
            let alg = algorithm_for(&pipe, &plan, sim.model)?;
            let policy = id_policy(&sim);
            let cells: Vec<(usize, u64)> = lengths.iter().flat_map(|&n| (0..seeds).map(move |s| (n, s))).collect();
            let mut rows = cells
                .par_iter()
                .map(|&(n, s)| pipe.run_once(alg.as_ref(), n, s, policy, &alpha))
                .collect::<Result<Vec<_>, _>>()?;
            rows.sort_by_key(|r| (r.n, r.seed));
            println!("{CSV_HEADER}");
            for r in &rows {
                println!("{}", r.csv_row());
            }
            let ok = rows.iter().filter(|r| r.alpha_ok == Some(true)).count();
            let valid = rows.iter().filter(|r| r.valid).count();
            eprintln!("runs = {}, valid = {valid}, alpha_ok = {ok}/{} ({:.4})", rows.len(), rows.len(), ok as f64 / rows.len() as f64);
            if valid < rows.len() || (!plan.strategy.is_randomized() && ok < rows.len()) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Oracle { problem, n, bruteforce, csv } => {
            let lengths = parse_lengths(&n)?;
            let pipe = Pipeline::new(load_problem(&problem)?);
            let budget = enum_budget();
            if bruteforce {
                if let Some(&n) = lengths.iter().find(|&&n| n > max_enumerable_n(&pipe.problem, budget)) {
                    bail!("n = {n} exceeds the enumeration budget {budget} (set {ENUM_BUDGET_VAR} to raise it)");
                }
            }
            let csv = csv || lengths.len() > 1;
            if csv {
                println!("n,opt,witness");
            }
            for n in lengths {
                let opt = optlcl::verify::opt_dp_with_graph(&pipe.graph, n);
                if bruteforce {
                    let bf = opt_bruteforce(&pipe.problem, n, budget)?;
                    if bf != opt.value {
                        bail!("n = {n}: dynamic programming gives {}, enumeration gives {bf}", opt.value);
                    }
                }
                let witness = opt.witness.as_ref().map_or("-".to_string(), |w| pipe.problem.format_labels(w));
                if csv {
                    println!("{n},{},{witness}", opt.value);
                } else {
                    println!("n = {n}\nopt = {}\nwitness = {witness}", opt.value);
                }
            }
        }
        Command::Examples { name } => match name {
            Some(name) => {
                print!("{}", catalog::source(&name).ok_or_else(|| anyhow!("unknown example `{name}`"))?);
            }
            None => {
                for name in NAMES {
                    println!("{name}");
                }
            }
        },
        Command::Tables { check, format } => {
            let params = tables::param_rows::<Rational>();
            let ranges = tables::range_rows::<Rational>();
            match format {
                Format::Text => print!("{}\n{}", tables::render_params(&params), tables::render_ranges(&ranges)),
                Format::Csv => print!("{}", tables::ranges_csv(&ranges)),
            }
            if check {
                let problems = tables::check::<Rational>();
                for p in &problems {
                    eprintln!("mismatch: {p}");
                }
                if !problems.is_empty() {
                    return Ok(ExitCode::from(1));
                }
                eprintln!("tables match");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
