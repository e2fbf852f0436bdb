//! `tcreol`: run, explore and benchmark timed Creol models.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use tcreol_core::desugar::desugar;
use tcreol_core::explore::{explore, explore_until_witnessed, Bounds, Query};
use tcreol_core::runtime::init_configuration;
use tcreol_core::schedule::{run, Outcome, PolicyParams, PolicyRegistry, Trace};
use tcreol_core::validate::validate;
use tcreol_core::{parse, Configuration, Program, SourceModel};
use tcreol_sensornet::table::{build_table1, render, TableOptions};
use tcreol_sensornet::{build_model, metrics, CollisionRegistry, SinkMetrics, TopologyRegistry};

const EXIT_INVALID: u8 = 1;
const EXIT_FAULT: u8 = 2;
const EXIT_MAX_STEPS: u8 = 3;
const EXIT_NOT_FOUND: u8 = 4;

#[derive(Parser)]
#[command(name = "tcreol", version, about = "Timed Creol interpreter and simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a model; optionally print its syntax tree as JSON.
    Parse {
        model: PathBuf,
        #[arg(long)]
        dump_ast: bool,
        /// Dump the tree after call sugar has been expanded.
        #[arg(long)]
        desugared: bool,
    },
    /// Execute one schedule of a model.
    Run {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
        #[arg(long, default_value = "seeded")]
        policy: String,
        /// Choice indices for the script policy, comma separated.
        #[arg(long, value_delimiter = ',')]
        script: Vec<usize>,
        /// Write the trace as JSON lines to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: usize,
        /// Print the final configuration.
        #[arg(long)]
        snapshot: bool,
    },
    /// Search all schedules within bounds.
    Explore {
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
        #[arg(long, default_value_t = 100_000)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        states: usize,
        /// Terminal condition to find, e.g. "received=2,last=2".
        #[arg(long)]
        query: Option<String>,
        /// Where to write a witness trace (JSON lines).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Reproduce the sensor network timing table.
    BenchTable1 {
        /// Only these topologies, comma separated.
        #[arg(long, value_delimiter = ',')]
        topologies: Vec<String>,
        /// Seeded runs per cell for outcome distributions.
        #[arg(long, default_value_t = 0)]
        seeds: u64,
        /// Random schedules tried per cell before exhaustive search.
        #[arg(long, default_value_t = 200)]
        probes: u64,
        /// Also write the rows as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print a bundled sensor network model.
    EmitModel {
        #[arg(long)]
        collision: String,
        #[arg(long)]
        topology: String,
    },
}

/// Failure with a chosen exit status.
struct Exit(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        Exit(EXIT_INVALID, e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, Exit> {
    match cmd {
        Command::Parse {
            model,
            dump_ast,
            desugared,
        } => {
            let p = load_program(&model)?;
            if dump_ast {
                let p = if desugared { desugar(&p) } else { p };
                println!("{}", serde_json::to_string_pretty(&p)?);
            } else {
                println!("ok: {} interfaces, {} classes, main {}", p.interfaces.len(), p.classes.len(), p.main);
            }
            Ok(0)
        }
        Command::Run {
            model,
            seed,
            limit,
            policy,
            script,
            trace,
            max_steps,
            snapshot,
        } => cmd_run(&model, seed, limit, &policy, script, trace.as_deref(), max_steps, snapshot),
        Command::Explore {
            model,
            limit,
            depth,
            states,
            query,
            witness,
        } => cmd_explore(&model, limit, Bounds { depth, states }, query.as_deref(), witness.as_deref()),
        Command::BenchTable1 {
            topologies,
            seeds,
            probes,
            json,
        } => {
            let opts = TableOptions {
                topologies,
                seeds,
                probes,
                ..TableOptions::default()
            };
            let rows = build_table1(&opts)?;
            print!("{}", render(&rows));
            if let Some(path) = json {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                serde_json::to_writer_pretty(BufWriter::new(f), &rows)?;
                println!("rows written to {}", path.display());
            }
            Ok(0)
        }
        Command::EmitModel { collision, topology } => {
            let cr = CollisionRegistry::default();
            let tr = TopologyRegistry::default();
            let c = cr.get(&collision).with_context(|| format!("unknown collision behavior `{collision}`"))?;
            let t = tr.get(&topology).with_context(|| format!("unknown topology `{topology}`"))?;
            print!("{}", build_model(c, t).text);
            Ok(0)
        }
    }
}

/// Parses and validates; all failures map to exit status 1.
fn load_program(path: &Path) -> Result<Program> {
    let src = SourceModel::from_file(path).with_context(|| format!("reading {}", path.display()))?;
    let program = parse(&src).map_err(|e| anyhow::anyhow!("{}:{e}", src.origin))?;
    if let Err(diags) = validate(&program) {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", src.origin)).collect();
        bail!("{} problem(s)\n{}", diags.len(), lines.join("\n"));
    }
    Ok(program)
}

fn load_config(path: &Path, limit: u64) -> Result<Configuration> {
    let program = desugar(&load_program(path)?);
    Ok(init_configuration(&program, limit)?)
}

fn sink_metrics(cfg: &Configuration) -> Option<SinkMetrics> {
    metrics(cfg).ok()
}

fn write_trace(path: &Path, trace: &Trace) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    trace.write_jsonl(&mut w)?;
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    model: &Path,
    seed: u64,
    limit: u64,
    policy: &str,
    script: Vec<usize>,
    trace_path: Option<&Path>,
    max_steps: usize,
    snapshot: bool,
) -> Result<u8, Exit> {
    let cfg = load_config(model, limit)?;
    let mut pol = PolicyRegistry::default().build(policy, &PolicyParams { seed, script })?;
    let r = run(cfg, &mut *pol, max_steps);
    println!("model: {}", model.display());
    println!("policy: {policy} seed: {seed} limit: {limit} max-steps: {max_steps}");
    println!("status: {}", r.outcome);
    println!("final clock: {}", r.config.clock.time);
    println!("steps: {}", r.trace.len());
    if let Some(m) = sink_metrics(&r.config) {
        println!("sink: {m}");
    }
    if let Some(p) = trace_path {
        write_trace(p, &r.trace).map_err(|e| Exit(EXIT_INVALID, e))?;
        println!("trace: {}", p.display());
    }
    if snapshot {
        print!("{}", r.config.snapshot());
    }
    Ok(match r.outcome {
        Outcome::Terminated { .. } => 0,
        Outcome::MaxSteps => EXIT_MAX_STEPS,
        Outcome::Faulted(_) => EXIT_FAULT,
    })
}

/// Parses `received=K,last=T`; `last` may be `--` for "nothing received".
fn parse_query(q: &str) -> Result<impl Fn(&Option<SinkMetrics>) -> bool> {
    let mut received = None;
    let mut last: Option<Option<u64>> = None;
    for part in q.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .with_context(|| format!("malformed query term `{part}`"))?;
        match k.trim() {
            "received" => received = Some(v.trim().parse::<i64>().with_context(|| format!("bad count `{v}`"))?),
            "last" => {
                last = Some(match v.trim() {
                    "--" | "none" => None,
                    t => Some(t.parse::<u64>().with_context(|| format!("bad time `{t}`"))?),
                })
            }
            other => bail!("unknown query key `{other}` (expected received, last)"),
        }
    }
    if received.is_none() && last.is_none() {
        bail!("empty query");
    }
    Ok(move |m: &Option<SinkMetrics>| match m {
        Some(m) => received.is_none_or(|r| m.received == r) && last.is_none_or(|l| m.last == l),
        None => false,
    })
}

fn cmd_explore(
    model: &Path,
    limit: u64,
    bounds: Bounds,
    query: Option<&str>,
    witness_path: Option<&Path>,
) -> Result<u8, Exit> {
    let pred = query.map(parse_query).transpose()?;
    let cfg = load_config(model, limit)?;
    let metric = |c: &Configuration| sink_metrics(c);
    let show = |m: &Option<SinkMetrics>| m.map_or("-".to_string(), |m| m.to_string());
    let res = match &pred {
        Some(p) => {
            let q = [Query {
                name: "query".to_string(),
                predicate: p,
            }];
            explore_until_witnessed(&cfg, bounds, &metric, &q)
        }
        None => explore(&cfg, bounds, &metric, &[]),
    };
    println!("model: {}", model.display());
    println!("limit: {limit} depth: {} states: {}", bounds.depth, bounds.states);
    println!("terminals: {}", res.terminals.len());
    println!("visited: {}", res.states_visited);
    println!("truncated: {}", res.truncated);
    if res.faults > 0 {
        println!("faulting transitions: {}", res.faults);
    }
    for t in res.terminals.values() {
        println!("  {:016x} time={} pending={} {}", t.hash, t.time, t.pending, show(&t.metrics));
    }
    if pred.is_none() {
        return Ok(0);
    }
    match res.witnesses.get("query") {
        Some(w) => {
            println!("witness: {} steps", w.len());
            if let Some(p) = witness_path {
                write_trace(p, w).map_err(|e| Exit(EXIT_INVALID, e))?;
                println!("witness trace: {}", p.display());
            }
            Ok(0)
        }
        None => {
            println!("not found within bounds");
            Ok(EXIT_NOT_FOUND)
        }
    }
}
