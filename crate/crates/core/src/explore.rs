//! Bounded exhaustive exploration and witness search.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::runtime::Configuration;
use crate::schedule::{pending_work, Trace, TraceRecord};
use crate::semantics::{applicable, apply, apply_in_place, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub depth: usize,
    pub states: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            depth: 100_000,
            states: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Terminal<M> {
    pub hash: u64,
    pub metrics: M,
    pub time: u64,
    /// Processes and messages left over.
    pub pending: usize,
}

#[derive(Clone, Debug)]
pub struct ExplorationResult<M> {
    /// Distinct terminal states, ordered by hash.
    pub terminals: BTreeMap<u64, Terminal<M>>,
    pub states_visited: usize,
    pub truncated: bool,
    /// Transitions that faulted; the faulting branch is not followed.
    pub faults: usize,
    pub witnesses: BTreeMap<String, Trace>,
    /// Search ended as soon as every query had a witness.
    pub stopped_early: bool,
}

impl<M: fmt::Display> fmt::Display for ExplorationResult<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "terminals: {}", self.terminals.len())?;
        writeln!(f, "visited: {}", self.states_visited)?;
        writeln!(f, "truncated: {}", self.truncated)?;
        writeln!(f, "faults: {}", self.faults)?;
        if self.stopped_early {
            writeln!(f, "stopped early: every query has a witness")?;
        }
        for t in self.terminals.values() {
            writeln!(
                f,
                "  {:016x} time={} pending={} {}",
                t.hash, t.time, t.pending, t.metrics
            )?;
        }
        Ok(())
    }
}

/// A query over terminal metrics, named for reporting.
pub struct Query<'a, M> {
    pub name: String,
    pub predicate: &'a dyn Fn(&M) -> bool,
}

/// Search tree node: how a state was first reached.
struct Node {
    parent: u32,
    via: Transition,
    choice: u32,
}

struct Dfs<'a, M> {
    metrics: &'a dyn Fn(&Configuration) -> M,
    queries: &'a [Query<'a, M>],
    stop_on_witness: bool,
}

impl<'a, M: Clone> Dfs<'a, M> {
    fn run(&self, root: &Configuration, bounds: Bounds) -> ExplorationResult<M> {
        let mut res = ExplorationResult {
            terminals: BTreeMap::new(),
            states_visited: 0,
            truncated: false,
            faults: 0,
            witnesses: BTreeMap::new(),
            stopped_early: false,
        };
        let mut nodes: Vec<Node> = Vec::new();
        let mut visited: HashSet<u64> = HashSet::new();
        visited.insert(root.state_hash());
        nodes.push(Node {
            parent: u32::MAX,
            via: Transition::tick(),
            choice: 0,
        });
        let mut stack: Vec<(Configuration, u32, usize)> = vec![(root.clone(), 0, 0)];
        while let Some((cfg, node, depth)) = stack.pop() {
            let options = applicable(&cfg);
            if options.is_empty() {
                let hash = cfg.state_hash();
                let m = (self.metrics)(&cfg);
                for q in self.queries {
                    if !res.witnesses.contains_key(&q.name) && (q.predicate)(&m) {
                        res.witnesses.insert(q.name.clone(), path(&nodes, node, root));
                    }
                }
                res.terminals.entry(hash).or_insert(Terminal {
                    hash,
                    metrics: m,
                    time: cfg.clock.time,
                    pending: pending_work(&cfg),
                });
                if self.stop_on_witness && !self.queries.is_empty() && res.witnesses.len() == self.queries.len() {
                    res.stopped_early = true;
                    break;
                }
                continue;
            }
            if depth >= bounds.depth {
                res.truncated = true;
                continue;
            }
            for (i, t) in options.iter().enumerate().rev() {
                let next = match apply(&cfg, t) {
                    Ok(n) => n,
                    Err(_) => {
                        res.faults += 1;
                        continue;
                    }
                };
                let h = next.state_hash();
                if visited.contains(&h) {
                    continue;
                }
                if visited.len() >= bounds.states {
                    res.truncated = true;
                    continue;
                }
                visited.insert(h);
                nodes.push(Node {
                    parent: node,
                    via: *t,
                    choice: i as u32,
                });
                stack.push((next, (nodes.len() - 1) as u32, depth + 1));
            }
        }
        res.states_visited = visited.len();
        res
    }
}

/// Rebuilds the trace from the root to `node`.
fn path(nodes: &[Node], mut node: u32, root: &Configuration) -> Trace {
    let mut steps = Vec::new();
    while nodes[node as usize].parent != u32::MAX {
        let n = &nodes[node as usize];
        steps.push((n.via, n.choice as usize));
        node = n.parent;
    }
    steps.reverse();
    trace_of(root, &steps)
}

/// Replays `steps` from `root`, recording clock values.
fn trace_of(root: &Configuration, steps: &[(Transition, usize)]) -> Trace {
    let mut cfg = root.clone();
    let mut trace = Trace::default();
    for (i, (t, c)) in steps.iter().enumerate() {
        trace.records.push(TraceRecord {
            step: i,
            time: cfg.clock.time,
            rule: t.rule,
            subject: t.subject,
            detail: t.detail,
        });
        trace.choices.push(*c);
        apply_in_place(&mut cfg, t).expect("recorded steps were applied without fault");
    }
    trace
}

/// Depth- and state-bounded search over every schedule from `root`.
/// Duplicate states are pruned by snapshot hash.
pub fn explore<M: Clone>(
    root: &Configuration,
    bounds: Bounds,
    metrics: &dyn Fn(&Configuration) -> M,
    queries: &[Query<'_, M>],
) -> ExplorationResult<M> {
    Dfs {
        metrics,
        queries,
        stop_on_witness: false,
    }
    .run(root, bounds)
}

/// Like [`explore`], but stops once every query has a witness.
pub fn explore_until_witnessed<M: Clone>(
    root: &Configuration,
    bounds: Bounds,
    metrics: &dyn Fn(&Configuration) -> M,
    queries: &[Query<'_, M>],
) -> ExplorationResult<M> {
    Dfs {
        metrics,
        queries,
        stop_on_witness: true,
    }
    .run(root, bounds)
}

/// A way of looking for a schedule whose terminal metrics satisfy a predicate.
pub trait WitnessSearch<M> {
    fn name(&self) -> &str;
    fn search(
        &self,
        root: &Configuration,
        predicate: &dyn Fn(&M) -> bool,
        metrics: &dyn Fn(&Configuration) -> M,
        bounds: Bounds,
    ) -> Option<Trace>;
}

/// Exhaustive depth-first search, stopping at the first witness.
pub struct DepthFirst;

impl<M: Clone> WitnessSearch<M> for DepthFirst {
    fn name(&self) -> &str {
        "dfs"
    }

    fn search(
        &self,
        root: &Configuration,
        predicate: &dyn Fn(&M) -> bool,
        metrics: &dyn Fn(&Configuration) -> M,
        bounds: Bounds,
    ) -> Option<Trace> {
        let q = [Query {
            name: "q".into(),
            predicate,
        }];
        let mut r = Dfs {
            metrics,
            queries: &q,
            stop_on_witness: true,
        }
        .run(root, bounds);
        r.witnesses.remove("q")
    }
}

/// Independent random schedules from a fixed seed range.
pub struct RandomProbes {
    pub first_seed: u64,
    pub runs: u64,
}

impl<M> WitnessSearch<M> for RandomProbes {
    fn name(&self) -> &str {
        "random"
    }

    fn search(
        &self,
        root: &Configuration,
        predicate: &dyn Fn(&M) -> bool,
        metrics: &dyn Fn(&Configuration) -> M,
        bounds: Bounds,
    ) -> Option<Trace> {
        for seed in self.first_seed..self.first_seed + self.runs {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cfg = root.clone();
            let mut steps = Vec::new();
            loop {
                let options = applicable(&cfg);
                if options.is_empty() {
                    if predicate(&metrics(&cfg)) {
                        return Some(trace_of(root, &steps));
                    }
                    break;
                }
                if steps.len() >= bounds.depth {
                    break;
                }
                let i = if options.len() == 1 { 0 } else { rng.gen_range(0..options.len()) };
                if apply_in_place(&mut cfg, &options[i]).is_err() {
                    break;
                }
                steps.push((options[i], i));
            }
        }
        None
    }
}

/// Tries each strategy in turn.
pub struct Portfolio<M> {
    pub strategies: Vec<Box<dyn WitnessSearch<M>>>,
}

impl<M> WitnessSearch<M> for Portfolio<M> {
    fn name(&self) -> &str {
        "portfolio"
    }

    fn search(
        &self,
        root: &Configuration,
        predicate: &dyn Fn(&M) -> bool,
        metrics: &dyn Fn(&Configuration) -> M,
        bounds: Bounds,
    ) -> Option<Trace> {
        self.strategies
            .iter()
            .find_map(|s| s.search(root, predicate, metrics, bounds))
    }
}

/// First trace (per `strategy`) to a terminal state satisfying `predicate`.
pub fn check_achievable<M>(
    root: &Configuration,
    predicate: &dyn Fn(&M) -> bool,
    metrics: &dyn Fn(&Configuration) -> M,
    bounds: Bounds,
    strategy: &dyn WitnessSearch<M>,
) -> Option<Trace> {
    strategy.search(root, predicate, metrics, bounds)
}
