//! `repgen`: run representative generation games from scenario files.
//!
//! Exit codes: 0 when every checked property holds, 2 when one is violated,
//! 3 for configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use repgen_core::adversaries::{
    gc_witness_adversary, geometric_adversary, geometric_base, query_adversary, query_plugin,
    ViolationKind, ViolationReport, DEFAULT_QUERY_BUDGET,
};
use repgen_core::dimension::{group_closure_dimension, Condition, GcStatus};
use repgen_core::generators::{
    build_generator, is_feasible, Empirical, Generator, GeneratorKind, History, InLimit,
};
use repgen_core::groups::{BlockSizes, GroupCollection};
use repgen_core::harness::{emit_trace, load_scenario, run_game, ClassSpec, Scenario};
use repgen_core::hypothesis::{closure, Closure, Hypothesis, HypothesisClass};
use repgen_core::scalar::{format_rational, parse_rational};
use repgen_core::{Dist, Error, PeriodicSet, Rational};

#[derive(Parser)]
#[command(
    name = "repgen",
    version,
    about = "Representative generation games over periodic sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and report its summary.
    Run {
        scenario: PathBuf,
        /// Write the JSONL trace here (`-` for stdout).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Exit with status 2 when a property is violated.
        #[arg(long)]
        assert: bool,
    },
    /// Compute the group closure dimension of the scenario's class.
    GcDim { scenario: PathBuf },
    /// Closure of a prefix under the scenario's class.
    Closure {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<u64>,
    },
    /// Decide whether a hypothesis is feasible after a prefix.
    Feasible {
        scenario: PathBuf,
        #[arg(long)]
        hypothesis: String,
        #[arg(long, value_delimiter = ',', required = true)]
        prefix: Vec<u64>,
    },
    /// Run one of the impossibility adversaries.
    #[command(subcommand)]
    Adversary(AdversaryCommand),
}

#[derive(Subcommand)]
enum AdversaryCommand {
    /// Block adversary against generation in the limit, with α = 1 − 1/b.
    Geometric {
        #[arg(long, default_value = "1/2")]
        alpha: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// `empirical` or `inlimit`.
        #[arg(long, default_value = "empirical")]
        generator: String,
    },
    /// Membership-query adversary.
    Query {
        #[arg(long, default_value_t = 40)]
        steps: usize,
        /// One of probe, constant, empirical, seeker.
        #[arg(long, default_value = "probe")]
        generator: String,
        #[arg(long, default_value = "1/4")]
        alpha: String,
        #[arg(long, default_value_t = DEFAULT_QUERY_BUDGET)]
        budget: u64,
    },
    /// Play the least dimension witness against a generator.
    Witness(WitnessArgs),
}

#[derive(Args)]
struct WitnessArgs {
    scenario: PathBuf,
    /// Overrides the scenario's generator kind.
    #[arg(long)]
    generator: Option<String>,
    /// Overrides `d_star` for the uniform generator.
    #[arg(long)]
    d_star: Option<usize>,
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Holds,
    Violated,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Violated) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_configuration() { 3 } else { 2 })
        }
    }
}

fn dispatch(command: Command) -> Result<Verdict, Error> {
    match command {
        Command::Run {
            scenario,
            trace,
            assert,
        } => run(&scenario, trace.as_deref(), assert),
        Command::GcDim { scenario } => gc_dim(&load(&scenario)?),
        Command::Closure { scenario, prefix } => show_closure(&load(&scenario)?, &prefix),
        Command::Feasible {
            scenario,
            hypothesis,
            prefix,
        } => feasible(&load(&scenario)?, &hypothesis, &prefix),
        Command::Adversary(AdversaryCommand::Geometric {
            alpha,
            depth,
            generator,
        }) => geometric(&rational("--alpha", &alpha)?, depth, &generator),
        Command::Adversary(AdversaryCommand::Query {
            steps,
            generator,
            alpha,
            budget,
        }) => query(steps, &generator, &rational("--alpha", &alpha)?, budget),
        Command::Adversary(AdversaryCommand::Witness(args)) => witness(&args),
    }
}

fn load(path: &Path) -> Result<Scenario, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Unsupported(format!("reading {}: {e}", path.display())))?;
    load_scenario(&text)
}

fn rational(flag: &str, text: &str) -> Result<Rational, Error> {
    parse_rational(text).map_err(|e| Error::Unsupported(format!("{flag}: {e}")))
}

/// Long supports are cut after a few points.
fn fmt_dist(mu: &Dist) -> String {
    const SHOWN: usize = 6;
    let mut parts: Vec<String> = mu
        .iter()
        .take(SHOWN)
        .map(|(x, q)| format!("{x}:{}", format_rational(q)))
        .collect();
    if mu.len() > SHOWN {
        parts.push(format!("... {} points", mu.len()));
    }
    format!("{{{}}}", parts.join(", "))
}

fn fmt_condition(c: &Condition) -> String {
    match c {
        Condition::ExhaustedGroup { group, mass } => {
            format!(
                "group {group} exhausted with mass {}",
                format_rational(mass)
            )
        }
        Condition::MassBudget {
            exhausted,
            exhausted_mass,
            budget,
        } => format!(
            "groups {exhausted:?} exhausted with mass {} over budget {}",
            format_rational(exhausted_mass),
            format_rational(budget)
        ),
    }
}

fn run(path: &Path, trace_out: Option<&Path>, assert: bool) -> Result<Verdict, Error> {
    let s = load(path)?;
    let trace = run_game(&s)?;
    if let Some(out) = trace_out {
        let io = |e: std::io::Error| Error::Unsupported(format!("writing {}: {e}", out.display()));
        if out == Path::new("-") {
            emit_trace(&trace, &mut std::io::stdout().lock())?;
        } else {
            let mut file = fs::File::create(out).map_err(io)?;
            emit_trace(&trace, &mut file)?;
        }
    }
    let sum = &trace.summary;
    let first = sum
        .first_consistent_from
        .map_or("none".to_string(), |t| t.to_string());
    eprintln!(
        "{}: generator={} alpha={} T={} all_representative={} first_consistent_from={}",
        s.name,
        trace.header.generator.name(),
        format_rational(&trace.header.alpha),
        trace.header.horizon,
        sum.all_representative,
        first
    );
    for v in &sum.violations {
        eprintln!("violation: {v}");
    }
    Ok(if assert && !sum.violations.is_empty() {
        Verdict::Violated
    } else {
        Verdict::Holds
    })
}

fn listed(s: &Scenario, what: &str) -> Result<Vec<Hypothesis>, Error> {
    match &s.class {
        ClassSpec::Listed(h) => Ok(h.clone()),
        ClassSpec::Family { limit: Some(l), .. } => Ok(s.class.class().prefix(*l)),
        ClassSpec::Family { limit: None, .. } => Err(Error::Unsupported(format!(
            "{what} needs a finite class; set `family.limit`"
        ))),
    }
}

fn gc_dim(s: &Scenario) -> Result<Verdict, Error> {
    let hyps = listed(s, "gc-dim")?;
    let gc = group_closure_dimension(&hyps, &s.groups, &s.generator.alpha, &s.generator.gc_search)?;
    match &gc.status {
        GcStatus::Exact(d) => println!("GC = {d} (exact)"),
        GcStatus::AtLeast(d) => println!("GC >= {d} (search limit reached)"),
        GcStatus::InfiniteWitnessed {
            checked_up_to,
            family,
        } => {
            println!("GC unbounded: witnesses up to {checked_up_to} along {family}")
        }
    }
    if let Some(b) = gc.bound {
        println!("bound: {b}");
    }
    if let Some(w) = &gc.witness {
        println!("witness: {:?} ({})", w.tuple, fmt_condition(&w.condition));
    }
    Ok(Verdict::Holds)
}

fn show_closure(s: &Scenario, prefix: &[u64]) -> Result<Verdict, Error> {
    let class = s.class.class();
    let hyps = if class.is_finite() {
        class.members()?
    } else {
        class.prefix(prefix.len())
    };
    match closure(&hyps, prefix) {
        Closure::Bot => println!("bot"),
        Closure::Set(set) => println!("{set}"),
    }
    Ok(Verdict::Holds)
}

fn feasible(s: &Scenario, id: &str, prefix: &[u64]) -> Result<Verdict, Error> {
    let class = s.class.class();
    let h = (0..)
        .map_while(|i| class.get(i))
        .take(256)
        .find(|h| h.id() == id)
        .ok_or_else(|| Error::Unsupported(format!("no hypothesis `{id}`")))?;
    match is_feasible(
        &h,
        &s.groups,
        &History::from_slice(prefix),
        &s.generator.alpha,
    )? {
        Some(w) => println!("feasible: {}", fmt_dist(&w.dist)),
        None => println!("infeasible"),
    }
    Ok(Verdict::Holds)
}

fn print_report(r: &ViolationReport) {
    let what = match &r.kind {
        ViolationKind::Inconsistent { element, reason } => {
            format!("inconsistent {element} ({})", reason.name())
        }
        ViolationKind::Unrepresentative {
            group,
            distance,
            alpha,
        } => format!(
            "unrepresentative group {group}: distance {} > {}",
            format_rational(distance),
            format_rational(alpha)
        ),
        ViolationKind::QueryBudgetExceeded { budget } => format!("query budget {budget} exceeded"),
    };
    let mu = r.dist.as_ref().map_or("-".to_string(), fmt_dist);
    println!("t={} {what} mu={mu}", r.step);
}

fn verdict(failures: usize) -> Verdict {
    if failures == 0 {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

fn geometric(alpha: &Rational, depth: usize, generator: &str) -> Result<Verdict, Error> {
    let mut g: Box<dyn Generator> = match generator {
        "empirical" => Box::new(Empirical),
        "inlimit" => {
            let all = HypothesisClass::finite(vec![Hypothesis::new("all", PeriodicSet::all())?])?;
            let blocks = GroupCollection::blocks(BlockSizes::geometric(geometric_base(alpha)?, 1))?;
            Box::new(InLimit::with_blocks(all, blocks, alpha.clone())?)
        }
        other => {
            return Err(Error::Unsupported(format!(
                "--generator must be `empirical` or `inlimit`, not `{other}`"
            )))
        }
    };
    let run = geometric_adversary(&mut *g, alpha, depth)?;
    let mut failures = 0;
    for r in &run.reports {
        print_report(r);
        if let Err(e) = r.verify(&PeriodicSet::all(), &run.groups) {
            eprintln!("report does not verify: {e}");
            failures += 1;
        }
    }
    Ok(verdict(failures + depth - run.reports.len()))
}

fn query(steps: usize, plugin: &str, alpha: &Rational, budget: u64) -> Result<Verdict, Error> {
    let mut g = query_plugin(plugin)?;
    let run = query_adversary(&mut *g, alpha, steps, budget)?;
    let mut failures = 0;
    for (r, (support, groups)) in run.reports.iter().zip(&run.snapshots) {
        print_report(r);
        if let Err(e) = r.verify(support, groups) {
            eprintln!("report does not verify: {e}");
            failures += 1;
        }
    }
    Ok(verdict(failures))
}

fn witness(args: &WitnessArgs) -> Result<Verdict, Error> {
    let s = load(&args.scenario)?;
    let hyps = listed(&s, "the witness adversary")?;
    let mut config = s.generator.clone();
    if let Some(kind) = &args.generator {
        config.kind = kind.parse::<GeneratorKind>()?;
    }
    if args.d_star.is_some() {
        config.d_star = args.d_star;
    }
    let gc = group_closure_dimension(&hyps, &s.groups, &config.alpha, &config.gc_search)?;
    let Some(w) = gc.witness else {
        println!("no witness at α = {}", format_rational(&config.alpha));
        return Ok(Verdict::Holds);
    };
    let mut g = build_generator(&config, &s.class.class(), &s.groups)?;
    let outcome = gc_witness_adversary(&mut *g, &hyps, &s.groups, &config.alpha, &w.tuple)?;
    println!(
        "witness {:?}, target {}",
        w.tuple,
        hyps[outcome.target].id()
    );
    print_report(&outcome.report);
    match outcome
        .report
        .verify(hyps[outcome.target].support(), &s.groups)
    {
        Ok(()) => Ok(Verdict::Holds),
        Err(e) => {
            eprintln!("report does not verify: {e}");
            Ok(Verdict::Violated)
        }
    }
}
