use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lazylu::audit::{audit_asg, find_disagreement};
use lazylu::automaton::TimedAutomaton;
use lazylu::error::ReachError;
use lazylu::model::{format_transition, generate, parse, random_ta, serialize, FamilySpec, RandomParams};
use lazylu::reach::{run, Mode, Outcome, Run, RunConfig, SearchOrder, Verdict, Witness};
use serde::Serialize;
use sha2::{Digest, Sha256};

const UNREACHABLE: u8 = 0;
const REACHABLE: u8 = 1;
const ERROR: u8 = 2;
const DISAGREE: u8 = 3;

#[derive(Parser)]
#[command(name = "lazylu", version, about = "Timed automata reachability with lazily inferred LU bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide reachability of an accepting state.
    /// Exit 0: unreachable, 1: reachable, 2: error or timeout.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "lazy-disabled")]
        mode: Mode,
        #[arg(long, default_value = "dfs")]
        order: SearchOrder,
        #[command(flatten)]
        run: RunOpts,
        /// Audit the final graph when the verdict is unreachable.
        #[arg(long)]
        audit: bool,
    },
    /// Run several modes on one model and tabulate node counts.
    /// Exit 0 when all verdicts agree, 3 otherwise.
    Compare {
        #[command(flatten)]
        input: Input,
        /// Modes to run, in order (repeatable); all three by default.
        #[arg(long = "mode")]
        modes: Vec<Mode>,
        #[arg(long, default_value = "dfs")]
        order: SearchOrder,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Write a model file for a family or a random automaton.
    Gen {
        #[arg(long, value_name = "NAME:N", conflicts_with = "seed", required_unless_present = "seed")]
        family: Option<FamilySpec>,
        /// Generate a random automaton from this seed instead.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        params: RandomOpts,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Audit graph invariants for a model, or cross-check a random corpus.
    /// Exit 0 when clean, 1 on violations or disagreements, 2 on errors.
    Audit {
        #[command(flatten)]
        input: OptInput,
        /// Restrict to one mode; all modes by default.
        #[arg(long)]
        mode: Option<Mode>,
        /// Restrict to one order; both by default.
        #[arg(long)]
        order: Option<SearchOrder>,
        /// Cross-check random automata with seeds 0..N instead of a model.
        #[arg(long, value_name = "N", conflicts_with_all = ["model", "family"])]
        random: Option<u64>,
        #[command(flatten)]
        params: RandomOpts,
        #[command(flatten)]
        run: RunOpts,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Model file in the text format.
    model: Option<PathBuf>,
    /// Built-in family, e.g. `D:7`, `D':5`, `D'':7`.
    #[arg(long, value_name = "NAME:N")]
    family: Option<FamilySpec>,
}

#[derive(Args)]
#[group(multiple = false)]
struct OptInput {
    model: Option<PathBuf>,
    #[arg(long, value_name = "NAME:N")]
    family: Option<FamilySpec>,
}

#[derive(Args)]
struct RunOpts {
    /// Give up after this many seconds.
    #[arg(long, value_name = "SECONDS", default_value_t = 150.0)]
    time_limit: f64,
    /// Write one JSON stats record per run (JSON lines).
    #[arg(long, value_name = "PATH")]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct RandomOpts {
    #[arg(long, default_value_t = RandomParams::default().states)]
    states: u32,
    #[arg(long, default_value_t = RandomParams::default().clocks)]
    clocks: u32,
    #[arg(long, default_value_t = RandomParams::default().transitions)]
    transitions: u32,
    #[arg(long, default_value_t = RandomParams::default().max_const)]
    max_const: u32,
}

impl RandomOpts {
    fn params(&self) -> RandomParams {
        RandomParams {
            states: self.states.max(1),
            clocks: self.clocks,
            transitions: self.transitions,
            max_const: self.max_const,
            ..RandomParams::default()
        }
    }
}

#[derive(Serialize)]
struct StatsRecord<'a> {
    mode: Mode,
    order: SearchOrder,
    model_digest: String,
    verdict: &'static str,
    nodes_visited: u64,
    nodes_non_tentative: u64,
    nodes_tentative: u64,
    nodes_created: u64,
    propagations: u64,
    resolutions_reopened: u64,
    duration_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { input, mode, order, run, audit } => cmd_check(&input, mode, order, &run, audit),
        Command::Compare { input, modes, order, run } => cmd_compare(&input, modes, order, &run),
        Command::Gen { family, seed, params, output } => cmd_gen(family, seed, &params, output.as_deref()),
        Command::Audit { input, mode, order, random, params, run } => {
            cmd_audit(&input, mode, order, random, &params, &run)
        }
    };
    ExitCode::from(code)
}

fn fail(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    ERROR
}

fn load(model: Option<&Path>, family: Option<FamilySpec>) -> Result<(TimedAutomaton, String), String> {
    match (model, family) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let ta = parse(&text).map_err(|e| format!("{}:{e}", path.display()))?;
            Ok((ta, path.display().to_string()))
        }
        (None, Some(spec)) => Ok((generate(spec), spec.to_string())),
        (None, None) => Err("no model given".into()),
    }
}

fn digest(ta: &TimedAutomaton) -> String {
    hex::encode(Sha256::digest(serialize(ta).as_bytes()))
}

fn config(mode: Mode, order: SearchOrder, opts: &RunOpts) -> RunConfig {
    let limit = (opts.time_limit > 0.0).then(|| Duration::from_secs_f64(opts.time_limit));
    RunConfig { mode, order, time_limit: limit }
}

fn record<'a>(v: &Verdict, digest: &str, model: Option<&'a str>) -> StatsRecord<'a> {
    let s = &v.stats;
    StatsRecord {
        mode: v.mode,
        order: v.order,
        model_digest: digest.to_string(),
        verdict: if v.outcome.is_reachable() { "reachable" } else { "unreachable" },
        nodes_visited: s.nodes_visited,
        nodes_non_tentative: s.nodes_non_tentative,
        nodes_tentative: s.nodes_tentative,
        nodes_created: s.nodes_created,
        propagations: s.propagations,
        resolutions_reopened: s.resolutions_reopened,
        duration_ms: s.wall_time.as_secs_f64() * 1000.0,
        model,
    }
}

fn write_stats(path: &Path, records: &[StatsRecord]) -> Result<(), String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| e.to_string())?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_witness(ta: &TimedAutomaton, w: &Witness) {
    println!("witness ({} steps):", w.steps.len());
    println!("  {} {}", ta.state_name(ta.initial()), w.initial);
    for step in &w.steps {
        let t = ta.transition(step.transition);
        println!("  --{}--> {} {}", format_transition(ta, step.transition), ta.state_name(t.target), step.zone);
    }
}

fn print_stats(v: &Verdict) {
    let s = &v.stats;
    println!(
        "mode {} order {}: visited {} non-tentative {} tentative {} created {} propagations {} reopened {} time {:.3} ms",
        v.mode.label(),
        v.order,
        s.nodes_visited,
        s.nodes_non_tentative,
        s.nodes_tentative,
        s.nodes_created,
        s.propagations,
        s.resolutions_reopened,
        s.wall_time.as_secs_f64() * 1000.0
    );
}

fn execute(ta: &TimedAutomaton, cfg: &RunConfig) -> Result<Run, u8> {
    run(ta, cfg).map_err(|e| match e {
        ReachError::Timeout(_) => fail(format!("{} {}: {e}", cfg.mode, cfg.order)),
        other => fail(other),
    })
}

fn cmd_check(input: &Input, mode: Mode, order: SearchOrder, opts: &RunOpts, audit: bool) -> u8 {
    let (ta, name) = match load(input.model.as_deref(), input.family) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let r = match execute(&ta, &config(mode, order, opts)) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let v = &r.verdict;
    println!("{name}: {}", if v.outcome.is_reachable() { "reachable" } else { "unreachable" });
    if let Outcome::Reachable(w) = &v.outcome {
        print_witness(&r.automaton, w);
    }
    print_stats(v);
    if let Some(path) = &opts.stats {
        if let Err(e) = write_stats(path, &[record(v, &digest(&ta), Some(&name))]) {
            return fail(e);
        }
    }
    if audit && !v.outcome.is_reachable() {
        let rep = audit_asg(&r);
        println!("audit: {rep}");
        if !rep.is_clean() {
            return ERROR;
        }
    }
    if v.outcome.is_reachable() {
        REACHABLE
    } else {
        UNREACHABLE
    }
}

fn cmd_compare(input: &Input, modes: Vec<Mode>, order: SearchOrder, opts: &RunOpts) -> u8 {
    let (ta, name) = match load(input.model.as_deref(), input.family) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let modes = if modes.is_empty() { Mode::ALL.to_vec() } else { modes };
    let dig = digest(&ta);
    println!("{name} ({}), order {order}", &dig[..12]);
    println!("{:<16} {:>12} {:>10} {:>14} {:>10} {:>12}", "mode", "verdict", "visited", "non-tentative", "tentative", "time (ms)");
    let mut runs = Vec::new();
    for mode in modes {
        let r = match execute(&ta, &config(mode, order, opts)) {
            Ok(r) => r,
            Err(code) => return code,
        };
        let v = &r.verdict;
        println!(
            "{:<16} {:>12} {:>10} {:>14} {:>10} {:>12.3}",
            mode.label(),
            if v.outcome.is_reachable() { "reachable" } else { "unreachable" },
            v.stats.nodes_visited,
            v.stats.nodes_non_tentative,
            v.stats.nodes_tentative,
            v.stats.wall_time.as_secs_f64() * 1000.0
        );
        runs.push(r);
    }
    if let Some(path) = &opts.stats {
        let recs: Vec<_> = runs.iter().map(|r| record(&r.verdict, &dig, Some(&name))).collect();
        if let Err(e) = write_stats(path, &recs) {
            return fail(e);
        }
    }
    let first = runs[0].verdict.outcome.is_reachable();
    if runs.iter().all(|r| r.verdict.outcome.is_reachable() == first) {
        return UNREACHABLE;
    }
    println!("verdicts disagree");
    for r in &runs {
        let v = &r.verdict;
        match &v.outcome {
            Outcome::Reachable(w) => {
                println!("{}:", v.mode);
                print_witness(&r.automaton, w);
            }
            Outcome::Unreachable => {
                let graph = serde_json::to_string(&r.graph).unwrap_or_default();
                println!("{}: unreachable, graph digest {}", v.mode, hex::encode(Sha256::digest(graph.as_bytes())));
            }
        }
    }
    DISAGREE
}

fn cmd_gen(family: Option<FamilySpec>, seed: Option<u64>, params: &RandomOpts, output: Option<&Path>) -> u8 {
    let ta = match (family, seed) {
        (Some(spec), _) => generate(spec),
        (None, Some(seed)) => random_ta(seed, &params.params()),
        (None, None) => return fail("give --family or --seed"),
    };
    let text = serialize(&ta);
    match output {
        Some(path) => match fs::write(path, text) {
            Ok(()) => UNREACHABLE,
            Err(e) => fail(format!("{}: {e}", path.display())),
        },
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Ok(()) => UNREACHABLE,
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => UNREACHABLE,
            Err(e) => fail(e),
        },
    }
}

fn cmd_audit(
    input: &OptInput,
    mode: Option<Mode>,
    order: Option<SearchOrder>,
    random: Option<u64>,
    params: &RandomOpts,
    opts: &RunOpts,
) -> u8 {
    if let Some(n) = random {
        let bad = find_disagreement(0..n, &params.params(), true);
        println!("{n} random automata cross-checked, {} failing", bad.len());
        for d in &bad {
            println!("seed {}: shrunk to {} states, {} transitions", d.seed, d.shrunk.state_count(), d.shrunk.transitions().len());
            print!("{}", serialize(&d.shrunk));
            for r in &d.check.results {
                let audit = r.audit.as_ref().map(|a| a.to_string()).unwrap_or_default();
                println!("  {} {}: reachable {:?} witness ok {} {audit}", r.mode, r.order, r.reachable, r.witness_ok);
            }
        }
        return if bad.is_empty() { 0 } else { 1 };
    }
    let (ta, name) = match load(input.model.as_deref(), input.family) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let modes = mode.map_or(Mode::ALL.to_vec(), |m| vec![m]);
    let orders = order.map_or(SearchOrder::ALL.to_vec(), |o| vec![o]);
    let mut clean = true;
    let mut verdicts = Vec::new();
    for &m in &modes {
        for &o in &orders {
            let r = match execute(&ta, &config(m, o, opts)) {
                Ok(r) => r,
                Err(code) => return code,
            };
            let rep = audit_asg(&r);
            let reach = r.verdict.outcome.is_reachable();
            println!("{name} {} {o}: {} | {rep}", m.label(), if reach { "reachable" } else { "unreachable" });
            clean &= rep.is_clean();
            verdicts.push(reach);
        }
    }
    if !verdicts.iter().all(|&v| v == verdicts[0]) {
        println!("verdicts disagree");
        clean = false;
    }
    if clean {
        0
    } else {
        1
    }
}
