//! Scheduling policies and the single-run driver.
//!
//! Policies are registered by name in a [`PolicyRegistry`] and picked at
//! runtime; each one resolves the nondeterminism of a run by choosing among
//! the sorted applicable transitions.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::runtime::{Configuration, Fault};
use crate::semantics::{applicable, apply_in_place, Rule, Subject, Transition};

pub trait SchedulingPolicy {
    fn name(&self) -> &str;
    /// Index into `options`, which is nonempty and sorted.
    fn choose(&mut self, cfg: &Configuration, options: &[Transition]) -> usize;
}

/// Uniform choice driven by a seeded ChaCha stream.
pub struct Seeded {
    rng: ChaCha8Rng,
}

impl Seeded {
    pub fn new(seed: u64) -> Self {
        Seeded {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl SchedulingPolicy for Seeded {
    fn name(&self) -> &str {
        "seeded"
    }

    fn choose(&mut self, _: &Configuration, options: &[Transition]) -> usize {
        if options.len() == 1 {
            0
        } else {
            self.rng.gen_range(0..options.len())
        }
    }
}

/// Always the first transition in enumeration order.
pub struct Fifo;

impl SchedulingPolicy for Fifo {
    fn name(&self) -> &str {
        "fifo"
    }

    fn choose(&mut self, _: &Configuration, _: &[Transition]) -> usize {
        0
    }
}

/// Replays a list of choice indices; falls back to the first transition
/// once the list is exhausted.
pub struct Script {
    choices: Vec<usize>,
    at: usize,
}

impl Script {
    pub fn new(choices: Vec<usize>) -> Self {
        Script { choices, at: 0 }
    }
}

impl SchedulingPolicy for Script {
    fn name(&self) -> &str {
        "script"
    }

    fn choose(&mut self, _: &Configuration, options: &[Transition]) -> usize {
        let c = self.choices.get(self.at).copied().unwrap_or(0);
        self.at += 1;
        c.min(options.len() - 1)
    }
}

/// Parameters a policy constructor may read.
#[derive(Clone, Debug, Default)]
pub struct PolicyParams {
    pub seed: u64,
    pub script: Vec<usize>,
}

#[derive(Debug, Error)]
#[error("unknown policy `{name}` (known: {known})")]
pub struct UnknownPolicy {
    pub name: String,
    pub known: String,
}

type PolicyCtor = fn(&PolicyParams) -> Box<dyn SchedulingPolicy>;

pub struct PolicyRegistry {
    ctors: BTreeMap<&'static str, PolicyCtor>,
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        let mut r = PolicyRegistry {
            ctors: BTreeMap::new(),
        };
        r.register("seeded", |p| Box::new(Seeded::new(p.seed)));
        r.register("fifo", |_| Box::new(Fifo));
        r.register("script", |p| Box::new(Script::new(p.script.clone())));
        r
    }
}

impl PolicyRegistry {
    pub fn register(&mut self, name: &'static str, ctor: PolicyCtor) {
        self.ctors.insert(name, ctor);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.ctors.keys().copied()
    }

    pub fn build(&self, name: &str, params: &PolicyParams) -> Result<Box<dyn SchedulingPolicy>, UnknownPolicy> {
        match self.ctors.get(name) {
            Some(ctor) => Ok(ctor(params)),
            None => Err(UnknownPolicy {
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

impl Serialize for Subject {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One executed transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    /// Clock value before the step.
    pub time: u64,
    pub rule: Rule,
    pub subject: Subject,
    pub detail: u32,
}

impl TraceRecord {
    pub fn transition(&self) -> Transition {
        Transition {
            rule: self.rule,
            subject: self.subject,
            detail: self.detail,
        }
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// No transition applicable; `pending` processes or messages remain.
    Terminated { at_limit: bool, pending: usize },
    MaxSteps,
    Faulted(Fault),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Terminated { .. } => "terminated",
            Outcome::MaxSteps => "max-steps",
            Outcome::Faulted(_) => "faulted",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Terminated { at_limit, pending } => write!(
                f,
                "terminated ({}; {pending} pending)",
                if *at_limit { "clock limit" } else { "deadlock" }
            ),
            Outcome::MaxSteps => f.write_str("max steps reached"),
            Outcome::Faulted(e) => write!(f, "faulted: {e}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    /// Index chosen among the applicable transitions at each step.
    pub choices: Vec<usize>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Line-delimited JSON, one record per line.
    pub fn write_jsonl(&self, w: &mut dyn Write) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut *w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

pub struct RunResult {
    pub config: Configuration,
    pub trace: Trace,
    pub outcome: Outcome,
}

/// Number of processes and messages still outstanding.
pub fn pending_work(cfg: &Configuration) -> usize {
    cfg.messages.len()
        + cfg
            .objects
            .iter()
            .map(|o| o.queue.len() + usize::from(o.active.is_some()))
            .sum::<usize>()
}

/// Runs until no transition is applicable or `max_steps` steps were taken.
pub fn run(cfg: Configuration, policy: &mut dyn SchedulingPolicy, max_steps: usize) -> RunResult {
    run_observed(cfg, policy, max_steps, &mut |_, _, _| {})
}

/// Like [`run`], calling `observe(before, options, taken)` before each step.
pub fn run_observed(
    mut cfg: Configuration,
    policy: &mut dyn SchedulingPolicy,
    max_steps: usize,
    observe: &mut dyn FnMut(&Configuration, &[Transition], &Transition),
) -> RunResult {
    let mut trace = Trace::default();
    loop {
        let options = applicable(&cfg);
        if options.is_empty() {
            let outcome = Outcome::Terminated {
                at_limit: cfg.clock.time >= cfg.clock.limit,
                pending: pending_work(&cfg),
            };
            return RunResult {
                config: cfg,
                trace,
                outcome,
            };
        }
        if trace.len() >= max_steps {
            return RunResult {
                config: cfg,
                trace,
                outcome: Outcome::MaxSteps,
            };
        }
        let i = policy.choose(&cfg, &options);
        let t = options[i];
        observe(&cfg, &options, &t);
        trace.records.push(TraceRecord {
            step: trace.records.len(),
            time: cfg.clock.time,
            rule: t.rule,
            subject: t.subject,
            detail: t.detail,
        });
        trace.choices.push(i);
        if let Err(f) = apply_in_place(&mut cfg, &t) {
            return RunResult {
                config: cfg,
                trace,
                outcome: Outcome::Faulted(f),
            };
        }
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("step {step}: transition `{transition}` is not applicable")]
    NotApplicable { step: usize, transition: Transition },
    #[error("step {step}: {fault}")]
    Fault { step: usize, fault: Fault },
}

/// Re-executes a recorded transition sequence, checking applicability.
pub fn replay(mut cfg: Configuration, steps: &[Transition]) -> Result<Configuration, ReplayError> {
    for (step, t) in steps.iter().enumerate() {
        if !applicable(&cfg).contains(t) {
            return Err(ReplayError::NotApplicable { step, transition: *t });
        }
        apply_in_place(&mut cfg, t).map_err(|fault| ReplayError::Fault { step, fault })?;
    }
    Ok(cfg)
}
