//! Command-line front end: solve JSON models, run the worked
//! demonstrations, and benchmark naive vs compact encodings.
//!
//! Exit codes: 0 optimal, 2 infeasible, 3 node/time limit hit before
//! optimality was proven, 4 unbounded, 1 for usage or processing errors.

use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{ensure, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ilpkit::bench::{self, BenchConfig, BenchKind, EncodingChoice};
use ilpkit::demos::{self, SeqExtra, REL_NAMES, VERB_LABEL};
use ilpkit::oracles;
use ilpkit::recipes::encode_expr;
use ilpkit::soft::add_soft;
use ilpkit::{
    parse_constraint_file, solve_with, ConstraintLine, EncodeStrategy, Model, Solution,
    SolveStatus, SolverConfig,
};

#[derive(Parser)]
#[command(
    name = "ilpkit",
    version,
    about = "Compile Boolean constraints into 0-1 ILPs, solve them exactly, \
             and compare encodings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model from a JSON file
    Solve(SolveArgs),
    /// Sequence-labeling demonstration (emissions, transitions, agreement)
    DemoSeq(DemoSeqArgs),
    /// Event-relation demonstration (unique labels, antisymmetry, connectivity)
    DemoEvents(DemoEventsArgs),
    /// Benchmark naive vs compact encodings of random categorical implications
    BenchImplications(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Model file (JSON as written by this toolkit)
    model: PathBuf,
    /// Constraint file applied on top of the model: one expression per line,
    /// `#` comments, `soft <penalty> : <expr>` for penalized constraints.
    /// Variable names must already exist in the model.
    #[arg(long, value_name = "FILE")]
    constraints: Option<PathBuf>,
    /// Encoding strategy for constraint-file expressions
    #[arg(long, value_enum, default_value_t = EncodingArg::Compact)]
    encoding: EncodingArg,
    /// Stop after this many branch-and-bound nodes
    #[arg(long, value_name = "N")]
    node_limit: Option<u64>,
    /// Stop after this many seconds of search
    #[arg(long, value_name = "SECONDS")]
    time_limit_s: Option<f64>,
    /// Write the (augmented) model as LP text to this path, then solve
    #[arg(long, value_name = "PATH")]
    export_lp: Option<PathBuf>,
    /// Print the report as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DemoSeqArgs {
    /// Number of slots
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Number of labels (label 0 plays the verb role)
    #[arg(long, default_value_t = 3)]
    labels: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Extra requirement on top of the base model
    #[arg(long, value_enum, default_value_t = ExtraArg::None)]
    extra: ExtraArg,
    #[arg(long, value_name = "N")]
    node_limit: Option<u64>,
    #[arg(long, value_name = "SECONDS")]
    time_limit_s: Option<f64>,
    /// Write the model as LP text to this path, then solve
    #[arg(long, value_name = "PATH")]
    export_lp: Option<PathBuf>,
}

#[derive(Args)]
struct DemoEventsArgs {
    /// Number of events
    #[arg(long, default_value_t = 4)]
    n_events: usize,
    #[arg(long, default_value_t = 3)]
    seed: u64,
    #[arg(long, value_name = "N")]
    node_limit: Option<u64>,
    #[arg(long, value_name = "SECONDS")]
    time_limit_s: Option<f64>,
    /// Write the model as LP text to this path, then solve
    #[arg(long, value_name = "PATH")]
    export_lp: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Constraint shape
    #[arg(long, value_enum, default_value_t = KindArg::Disjunctive)]
    kind: KindArg,
    #[arg(long, default_value_t = 20)]
    n_categoricals: usize,
    #[arg(long, default_value_t = 8)]
    n_labels: usize,
    /// Fraction of the categoricals sampled into each constraint, in (0, 1]
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    #[arg(long, default_value_t = 10)]
    n_constraints: usize,
    /// Encodings to run per trial
    #[arg(long, value_enum, default_value_t = BenchEncodingArg::Both)]
    encoding: BenchEncodingArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-solve time limit in seconds (default 10)
    #[arg(long, value_name = "SECONDS")]
    time_limit_s: Option<f64>,
    #[arg(long, value_name = "N")]
    node_limit: Option<u64>,
    /// Leave the wall_ms column empty so the CSV is byte-reproducible
    #[arg(long)]
    omit_timing: bool,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write trial 0's model per encoding as `<PREFIX>.<encoding>.lp`
    #[arg(long, value_name = "PREFIX")]
    export_lp: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodingArg {
    Naive,
    Compact,
}

impl From<EncodingArg> for EncodeStrategy {
    fn from(arg: EncodingArg) -> Self {
        match arg {
            EncodingArg::Naive => EncodeStrategy::Naive,
            EncodingArg::Compact => EncodeStrategy::Compact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchEncodingArg {
    Naive,
    Compact,
    Both,
}

impl From<BenchEncodingArg> for EncodingChoice {
    fn from(arg: BenchEncodingArg) -> Self {
        match arg {
            BenchEncodingArg::Naive => EncodingChoice::Naive,
            BenchEncodingArg::Compact => EncodingChoice::Compact,
            BenchEncodingArg::Both => EncodingChoice::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Conjunctive,
    Disjunctive,
}

impl From<KindArg> for BenchKind {
    fn from(arg: KindArg) -> Self {
        match arg {
            KindArg::Conjunctive => BenchKind::Conjunctive,
            KindArg::Disjunctive => BenchKind::Disjunctive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtraArg {
    None,
    AtLeastOneVerb,
}

impl From<ExtraArg> for SeqExtra {
    fn from(arg: ExtraArg) -> Self {
        match arg {
            ExtraArg::None => SeqExtra::None,
            ExtraArg::AtLeastOneVerb => SeqExtra::AtLeastOneVerb,
        }
    }
}

/// Die quietly when stdout closes early (e.g. piping into `head`), like
/// other line-oriented tools, instead of panicking on the broken pipe.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too and must exit 0;
            // genuine usage errors exit 1 (2 is reserved for infeasibility).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::DemoSeq(args) => cmd_demo_seq(args),
        Command::DemoEvents(args) => cmd_demo_events(args),
        Command::BenchImplications(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::Infeasible => 2,
        SolveStatus::NodeLimit | SolveStatus::TimeLimit => 3,
        SolveStatus::Unbounded => 4,
    }
}

fn solver_config(
    time_limit_s: Option<f64>,
    node_limit: Option<u64>,
) -> anyhow::Result<SolverConfig> {
    if let Some(s) = time_limit_s {
        ensure!(
            s.is_finite() && s >= 0.0,
            "time limit must be a finite, non-negative number of seconds"
        );
    }
    Ok(SolverConfig {
        node_limit,
        time_limit: time_limit_s.map(Duration::from_secs_f64),
        ..SolverConfig::default()
    })
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_tag_histogram(model: &Model) {
    println!("rows by recipe:");
    for (tag, count) in model.tag_histogram() {
        println!("  {tag}: {count}");
    }
}

/// Prints feasibility of the returned point against every row and bound.
/// Returns false (after printing the details) when anything is violated.
fn print_validation(model: &Model, solution: &Solution) -> bool {
    let violations = model.check_feasible(&solution.values, 1e-6);
    if violations.is_empty() {
        println!(
            "validation: all {} rows hold at tolerance 1e-6",
            model.num_constraints()
        );
        true
    } else {
        println!("validation: {} violations", violations.len());
        for v in violations.iter().take(5) {
            println!("  {} (slack {})", v.message, v.slack);
        }
        false
    }
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<i32> {
    let mut model = Model::read_json(&read(&args.model)?)
        .with_context(|| format!("parsing {}", args.model.display()))?;

    let mut soft_count = 0usize;
    if let Some(path) = &args.constraints {
        let lines = parse_constraint_file(&read(path)?, &mut model)
            .with_context(|| format!("parsing {}", path.display()))?;
        for line in lines {
            match line {
                ConstraintLine::Hard(expr) => {
                    encode_expr(&mut model, &expr, args.encoding.into())?;
                }
                ConstraintLine::Soft { penalty, expr } => {
                    add_soft(&mut model, &expr, penalty)?;
                    soft_count += 1;
                }
            }
        }
    }

    if let Some(path) = &args.export_lp {
        fs::write(path, model.write_lp()).with_context(|| format!("writing {}", path.display()))?;
    }

    let solution = solve_with(&model, &solver_config(args.time_limit_s, args.node_limit)?)?;

    if args.json {
        let mut nonzero = serde_json::Map::new();
        for (i, v) in model.vars().iter().enumerate() {
            if !solution.values.is_empty() && solution.values[i].abs() > 1e-9 {
                nonzero.insert(v.name.clone(), serde_json::json!(solution.values[i]));
            }
        }
        let mut tags = serde_json::Map::new();
        for (tag, count) in model.tag_histogram() {
            tags.insert(tag, serde_json::json!(count));
        }
        let violations = if solution.values.is_empty() {
            0
        } else {
            model.check_feasible(&solution.values, 1e-6).len()
        };
        let report = serde_json::json!({
            "status": solution.status,
            "objective": if solution.values.is_empty() {
                serde_json::Value::Null
            } else {
                serde_json::json!(solution.objective)
            },
            "nodes": solution.nodes,
            "nonzero": nonzero,
            "rows_by_recipe": tags,
            "soft_constraints": soft_count,
            "violations": violations,
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(exit_code(solution.status));
    }

    println!(
        "model: {} variables, {} rows{}",
        model.num_vars(),
        model.num_constraints(),
        match soft_count {
            0 => String::new(),
            1 => " (1 soft constraint)".to_string(),
            n => format!(" ({n} soft constraints)"),
        }
    );
    print_tag_histogram(&model);
    println!("status: {}", solution.status);
    println!("nodes: {}", solution.nodes);
    if solution.values.is_empty() {
        return Ok(exit_code(solution.status));
    }
    println!("objective: {}", solution.objective);
    println!("nonzero assignment:");
    for (i, v) in model.vars().iter().enumerate() {
        if solution.values[i].abs() > 1e-9 {
            println!("  {} = {}", v.name, solution.values[i]);
        }
    }
    let ok = print_validation(&model, &solution);
    Ok(if ok { exit_code(solution.status) } else { 1 })
}

fn cmd_demo_seq(args: DemoSeqArgs) -> anyhow::Result<i32> {
    let extra: SeqExtra = args.extra.into();
    let seq = demos::build_sequence_model(args.n, args.labels, args.seed, extra)?;
    println!(
        "sequence labeling: {} slots, {} labels, seed {}, extra {}",
        args.n,
        args.labels,
        args.seed,
        match extra {
            SeqExtra::None => "none",
            SeqExtra::AtLeastOneVerb => "at-least-one-verb",
        }
    );
    println!(
        "model: {} variables, {} rows",
        seq.model.num_vars(),
        seq.model.num_constraints()
    );
    print_tag_histogram(&seq.model);

    if let Some(path) = &args.export_lp {
        fs::write(path, seq.model.write_lp())
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let solution = solve_with(
        &seq.model,
        &solver_config(args.time_limit_s, args.node_limit)?,
    )?;
    println!("status: {}", solution.status);
    if solution.values.is_empty() {
        return Ok(exit_code(solution.status));
    }

    let labels = demos::validate_sequence(&seq, &solution)?;
    println!("objective: {}", solution.objective);
    println!(
        "labels: {}",
        labels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    let feasible = print_validation(&seq.model, &solution);
    println!("semantic check: slot labels and pair variables agree");

    if solution.status != SolveStatus::Optimal {
        println!("reference comparison skipped: search stopped early");
        return Ok(exit_code(solution.status));
    }

    let achieved = demos::sequence_score(&seq.emission, &seq.transition, &labels);
    let reference = match extra {
        SeqExtra::None => {
            let (_, best) = oracles::viterbi(&seq.emission, &seq.transition)?;
            println!("reference (viterbi): {best}");
            Some(best)
        }
        SeqExtra::AtLeastOneVerb => {
            if (args.labels as f64).powi(args.n as i32) <= 2e6 {
                let (_, best) =
                    demos::sequence_bruteforce(&seq.emission, &seq.transition, Some(VERB_LABEL))
                        .context("no sequence satisfies the verb requirement")?;
                println!("reference (exhaustive with verb requirement): {best}");
                Some(best)
            } else {
                println!("reference comparison skipped: label space too large to enumerate");
                None
            }
        }
    };
    match reference {
        Some(best) => {
            let agree = achieved == best;
            println!("oracle agreement: {}", if agree { "yes" } else { "NO" });
            Ok(if agree && feasible { 0 } else { 1 })
        }
        None => Ok(if feasible { 0 } else { 1 }),
    }
}

fn cmd_demo_events(args: DemoEventsArgs) -> anyhow::Result<i32> {
    let ev = demos::build_events_model(args.n_events, args.seed)?;
    println!(
        "event relations: {} events, seed {}",
        args.n_events, args.seed
    );
    println!(
        "model: {} variables, {} rows",
        ev.model.num_vars(),
        ev.model.num_constraints()
    );
    print_tag_histogram(&ev.model);

    if let Some(path) = &args.export_lp {
        fs::write(path, ev.model.write_lp())
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let solution = solve_with(
        &ev.model,
        &solver_config(args.time_limit_s, args.node_limit)?,
    )?;
    println!("status: {}", solution.status);
    if solution.values.is_empty() {
        return Ok(exit_code(solution.status));
    }

    let matrix = demos::validate_events(&ev, &solution)?;
    println!("objective: {}", solution.objective);
    println!("relations:");
    for (i, j, r) in demos::nonnone_relations(&matrix) {
        println!("  e{i} -[{}]-> e{j}", REL_NAMES[r]);
    }
    let feasible = print_validation(&ev.model, &solution);
    println!("semantic check: labels unique, antisymmetric, and connected");

    if solution.status != SolveStatus::Optimal {
        println!("reference comparison skipped: search stopped early");
        return Ok(exit_code(solution.status));
    }

    if args.n_events <= 4 {
        let (_, best) = demos::events_bruteforce(&ev.scores)?;
        println!("reference (exhaustive over connected assignments): {best}");
        let agree = demos::events_score(&ev.scores, &matrix) == best;
        println!("oracle agreement: {}", if agree { "yes" } else { "NO" });
        Ok(if agree && feasible { 0 } else { 1 })
    } else {
        println!("reference comparison skipped: more than 4 events");
        Ok(if feasible { 0 } else { 1 })
    }
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<i32> {
    let mut cfg = BenchConfig {
        kind: args.kind.into(),
        n_categoricals: args.n_categoricals,
        n_labels: args.n_labels,
        density: args.density,
        n_constraints: args.n_constraints,
        encoding: args.encoding.into(),
        trials: args.trials,
        seed: args.seed,
        ..BenchConfig::default()
    };
    if let Some(s) = args.time_limit_s {
        ensure!(
            s.is_finite() && s >= 0.0,
            "time limit must be a finite, non-negative number of seconds"
        );
        cfg.time_limit = Some(Duration::from_secs_f64(s));
    }
    cfg.node_limit = args.node_limit;

    if let Some(prefix) = &args.export_lp {
        let instance = bench::generate_instance(&cfg, 0)?;
        for strategy in cfg.encoding.strategies() {
            let model = bench::build_bench_model(cfg.kind, &instance, strategy)?;
            let path = format!("{}.{strategy}.lp", prefix.display());
            fs::write(&path, model.write_lp()).with_context(|| format!("writing {path}"))?;
            eprintln!("wrote {path}");
        }
    }

    let rows = bench::run_bench(&cfg)?;
    let csv = bench::write_csv(&rows, !args.omit_timing);
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }

    eprintln!(
        "bench: kind={} categoricals={} labels={} density={} constraints={} trials={} seed={}",
        cfg.kind,
        cfg.n_categoricals,
        cfg.n_labels,
        cfg.density,
        cfg.n_constraints,
        cfg.trials,
        cfg.seed
    );
    for strategy in cfg.encoding.strategies() {
        if let Some(median) = bench::median_wall_ms(&rows, strategy) {
            let rows_of = rows
                .iter()
                .find(|r| r.encoding == strategy)
                .map(|r| r.n_rows)
                .unwrap_or(0);
            eprintln!("  {strategy}: {rows_of} rows/model, median wall {median:.3} ms");
        }
    }
    if cfg.encoding == EncodingChoice::Both {
        let mismatches = bench::paired_objective_mismatches(&rows);
        if mismatches.is_empty() {
            eprintln!("  objectives agree across encodings on every trial");
        } else {
            eprintln!("  OBJECTIVE MISMATCH on trials {mismatches:?}");
            return Ok(1);
        }
    }
    Ok(0)
}
