use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use csl_core::bounds::{graphical_lower_bound, info_lower_bound, upper_bound};
use csl_core::harness::{emit, emit_to_path, run_campaign, ExperimentConfig, OutputFormat, TruthModel};
use csl_core::learners::{run_learner, verify_report, LearnerParams, LearnerRegistry, Verdict};
use csl_core::oracle::AdversaryPolicy;
use csl_core::{CoalitionStructure, Error, Family, Result};

#[derive(Parser)]
#[command(name = "csl", version, about = "Learn hidden coalition structures from deviation observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a family over a parameter grid and emit one row per run.
    Run(RunArgs),
    /// Print round budgets next to the information lower bound.
    Bounds(BoundsArgs),
    /// Play one run and dump its transcript as JSON lines.
    Trace(TraceArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; replaces the grid flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    family: Option<Family>,
    /// Population sizes, e.g. `2..=64`, `8,16,32`.
    #[arg(long, value_parser = parse_sizes)]
    n: Option<Sizes>,
    /// Degree limits for graphical runs, e.g. `2,4,8`.
    #[arg(long, value_parser = parse_sizes)]
    d: Option<Sizes>,
    #[arg(long, default_value = "uniform")]
    truth_model: TruthModel,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated policies: `first`, `last`, `seeded:N`, or `seeds:K`
    /// for `seeded:0` through `seeded:K-1`.
    #[arg(long, default_value = "first", value_parser = parse_policies)]
    policies: Policies,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct BoundsArgs {
    /// Families to tabulate; all when absent.
    #[arg(long, value_delimiter = ',')]
    family: Vec<Family>,
    #[arg(long, value_parser = parse_sizes, default_value = "2,4,8,16,32,64")]
    n: Sizes,
    /// Degree limits for the graphical rows.
    #[arg(long, value_parser = parse_sizes, default_value = "2,4,8")]
    d: Sizes,
    /// Largest-coalition sizes for the bitwise auction rows.
    #[arg(long, value_parser = parse_sizes, default_value = "1,2,4")]
    c: Sizes,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Hidden partition as JSON, e.g. `[[1,4],[2,3]]`; drawn from
    /// `--truth-model` and `--seed` when absent.
    #[arg(long)]
    truth: Option<String>,
    #[arg(long, default_value = "uniform")]
    truth_model: TruthModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "first")]
    policy: AdversaryPolicy,
}

#[derive(Clone, Debug)]
struct Sizes(Vec<usize>);

#[derive(Clone, Debug)]
struct Policies(Vec<AdversaryPolicy>);

fn parse_sizes(s: &str) -> std::result::Result<Sizes, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad size `{t}` in `{s}`"));
        if let Some((a, b)) = part.split_once("..=") {
            out.extend(num(a)?..=num(b)?);
        } else if let Some((a, b)) = part.split_once("..") {
            out.extend(num(a)?..num(b)?);
        } else {
            out.push(num(part)?);
        }
    }
    Ok(Sizes(out))
}

fn parse_policies(s: &str) -> std::result::Result<Policies, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some(k) = part.strip_prefix("seeds:") {
            let k: u64 = k.parse().map_err(|_| format!("bad seed count in `{part}`"))?;
            out.extend((0..k).map(AdversaryPolicy::Seeded));
        } else {
            out.push(part.parse().map_err(|e: Error| e.to_string())?);
        }
    }
    Ok(Policies(out))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig {
            family: args.family.ok_or(Error::MissingParameter("family"))?,
            n_range: args.n.ok_or(Error::MissingParameter("n"))?.0,
            d_values: args.d.map(|d| d.0).unwrap_or_default(),
            truth_model: args.truth_model,
            policies: args.policies.0,
            repetitions: args.reps,
            seed: args.seed,
            output_path: args.out.clone(),
        },
    };
    let result = run_campaign(&cfg)?;
    match args.out.or(cfg.output_path) {
        Some(path) => emit_to_path(&result, args.format, &path),
        None => emit(&result, args.format, io::stdout().lock()),
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let families = if args.family.is_empty() {
        Family::ALL.to_vec()
    } else {
        args.family
    };
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["family", "n", "d", "c", "budget", "info_lower_bound", "graphical_lower_bound"])?;
    for family in families {
        for &n in &args.n.0 {
            let rows: Vec<(Option<usize>, Option<usize>)> = match family {
                Family::Graphical => args.d.0.iter().filter(|&&d| d <= n).map(|&d| (Some(d), None)).collect(),
                Family::AuctionBitwise => args.c.0.iter().filter(|&&c| c <= n).map(|&c| (None, Some(c))).collect(),
                _ => vec![(None, None)],
            };
            for (d, c) in rows {
                let budget = upper_bound(family, n, d, c)?;
                let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
                let glb = d.map(|d| graphical_lower_bound(n, d).to_string()).unwrap_or_default();
                w.write_record([
                    family.as_str().to_owned(),
                    n.to_string(),
                    opt(d),
                    opt(c),
                    budget.to_string(),
                    info_lower_bound(n).to_string(),
                    glb,
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<()> {
    let truth = match (&args.truth, args.n) {
        (Some(text), n) => {
            let t: CoalitionStructure = serde_json::from_str(text)?;
            if let Some(n) = n.filter(|&n| n != t.n()) {
                return Err(Error::PopulationMismatch { expected: n, found: t.n() });
            }
            t
        }
        (None, Some(n)) => args.truth_model.sample(n, 0, &mut ChaCha8Rng::seed_from_u64(args.seed))?,
        (None, None) => return Err(Error::MissingParameter("n")),
    };
    let learner = LearnerRegistry::with_defaults().create(args.family.as_str(), &LearnerParams { degree: args.d })?;
    let mut report = run_learner(learner.as_ref(), truth.clone(), args.policy)?;
    report.seed = Some(args.seed);
    report.transcript.write_jsonl(io::stdout().lock())?;
    let mut err = io::stderr().lock();
    serde_json::to_writer(&mut err, &report.summary())?;
    writeln!(err)?;
    match verify_report(&report, &truth, args.family, args.d) {
        Verdict::Pass => Ok(()),
        Verdict::Fail(v) => Err(Error::VerificationFailed {
            reason: v.to_string(),
            run: truth.to_string(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Trace(a) => cmd_trace(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
