mod common;

use tcreol_core::explore::{check_achievable, explore, Bounds, DepthFirst, Portfolio, Query, RandomProbes};
use tcreol_core::schedule::{replay, run, Outcome, PolicyParams, PolicyRegistry, Script, Seeded};
use tcreol_core::semantics::{Rule, Subject, Transition};
use tcreol_core::{Configuration, ObjId, Value};

use common::{config, model_config};

fn attr(cfg: &Configuration, class: &str, name: &str) -> Value {
    cfg.find_object(class).unwrap().attrs.get(name).unwrap().clone()
}

fn ample() -> Bounds {
    Bounds::default()
}

#[test]
fn empty_model_only_ticks() {
    let r = run(config("class Main() begin end", 3), &mut Seeded::new(0), 100);
    let rules: Vec<Rule> = r.trace.records.iter().map(|t| t.rule).collect();
    assert_eq!(rules, [Rule::Tick; 3]);
    assert_eq!(r.config.clock.time, 3);
    assert_eq!(r.outcome, Outcome::Terminated { at_limit: true, pending: 0 });
}

#[test]
fn equal_seeds_give_equal_traces() {
    for model in ["ping", "tick-block", "star-resend"] {
        for seed in [0, 1, 99] {
            let a = run(model_config(model, 200), &mut Seeded::new(seed), 1_000_000);
            let b = run(model_config(model, 200), &mut Seeded::new(seed), 1_000_000);
            assert_eq!(a.trace.to_jsonl(), b.trace.to_jsonl(), "{model} seed {seed}");
        }
    }
}

#[test]
fn ping_steps_follow_the_causal_order() {
    for seed in 0..20 {
        let r = run(model_config("ping", 5), &mut Seeded::new(seed), 10_000);
        let main = Subject::Object(ObjId(0));
        let pong = Subject::Object(ObjId(1));
        let pos = |rule: Rule, who: Subject| {
            r.trace
                .records
                .iter()
                .position(|t| t.rule == rule && t.subject == who)
                .unwrap_or_else(|| panic!("no {rule} by {who}"))
        };
        let call = pos(Rule::AsyncCall, main);
        let recv = pos(Rule::MessageReceive, pong);
        let ret = pos(Rule::Return, pong);
        let reply = pos(Rule::Reply, main);
        assert!(call < recv && recv < ret && ret < reply, "seed {seed}");
        assert_eq!(attr(&r.config, "Main", "r"), Value::Int(2));
        assert_eq!(attr(&r.config, "Main", "count"), Value::Int(2));
    }
}

#[test]
fn max_steps_stops_a_run() {
    let r = run(model_config("ping", 5), &mut Seeded::new(0), 2);
    assert_eq!(r.outcome, Outcome::MaxSteps);
    assert_eq!(r.trace.len(), 2);
}

#[test]
fn faults_end_a_run() {
    let src = "class W() begin op m == skip end class Main() begin var w: W; op run == !w.m() end";
    let r = run(config(src, 5), &mut Seeded::new(0), 100);
    assert!(matches!(r.outcome, Outcome::Faulted(_)), "{}", r.outcome);
}

#[test]
fn policies_are_looked_up_by_name() {
    let reg = PolicyRegistry::default();
    let names: Vec<_> = reg.names().collect();
    assert_eq!(names, ["fifo", "script", "seeded"]);
    assert!(reg.build("nope", &PolicyParams::default()).is_err());
    let mut p = reg.build("fifo", &PolicyParams::default()).unwrap();
    let r = run(model_config("ping", 2), &mut *p, 10_000);
    assert!(r.trace.choices.iter().all(|&c| c == 0));
}

#[test]
fn scripted_replay_reproduces_a_seeded_run() {
    let seeded = run(model_config("tick-block", 4), &mut Seeded::new(3), 10_000);
    let scripted = run(model_config("tick-block", 4), &mut Script::new(seeded.trace.choices.clone()), 10_000);
    assert_eq!(seeded.trace, scripted.trace);
    let steps: Vec<Transition> = seeded.trace.records.iter().map(|r| r.transition()).collect();
    let replayed = replay(model_config("tick-block", 4), &steps).unwrap();
    assert_eq!(replayed.snapshot(), seeded.config.snapshot());
    let bogus = [Transition::tick()];
    assert!(replay(model_config("tick-block", 4), &bogus).is_err());
}

#[test]
fn trace_lines_have_the_documented_fields() {
    let r = run(model_config("ping", 1), &mut Seeded::new(0), 10_000);
    let jsonl = r.trace.to_jsonl();
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(first["step"], 0);
    assert_eq!(first["time"], 0);
    assert_eq!(first["rule"], "activate");
    assert_eq!(first["subject"], "o0");
    assert_eq!(first["detail"], 0);
    assert!(jsonl.lines().last().unwrap().contains("\"clock\""));
}

#[test]
fn a_choice_yields_two_terminals() {
    let cfg = config("class Main() begin var x: Int; op run == x := 1 [] x := 2 end", 0);
    let r = explore(&cfg, ample(), &|c: &Configuration| attr(c, "Main", "x"), &[]);
    assert_eq!(r.terminals.len(), 2);
    assert!(!r.truncated);
    let mut xs: Vec<Value> = r.terminals.values().map(|t| t.metrics.clone()).collect();
    xs.sort();
    assert_eq!(xs, [Value::Int(1), Value::Int(2)]);
}

const TWO_WRITERS: &str = "
class A()
begin
  var x: Int;
  op run == x := 1
end

class Main()
begin
  var a: A;
  var b: A;
  op run == a := new A(); b := new A()
end";

#[test]
fn independent_interleavings_converge() {
    let cfg = config(TWO_WRITERS, 0);
    let r = explore(&cfg, ample(), &|_: &Configuration| (), &[]);
    assert_eq!(r.terminals.len(), 1);
    // both orders of the two writers, by hand
    let mut base = cfg.clone();
    while base.objects.len() < 3 || base.object(ObjId(0)).active.is_some() {
        let t = tcreol_core::applicable(&base)
            .into_iter()
            .find(|t| t.subject == Subject::Object(ObjId(0)))
            .unwrap();
        tcreol_core::apply_in_place(&mut base, &t).unwrap();
    }
    let finish = |order: [u32; 2]| {
        let mut c = base.clone();
        for o in order {
            for rule in [Rule::Activate, Rule::Assign, Rule::Return] {
                let t = tcreol_core::applicable(&c)
                    .into_iter()
                    .find(|t| t.rule == rule && t.subject == Subject::Object(ObjId(o)))
                    .unwrap();
                tcreol_core::apply_in_place(&mut c, &t).unwrap();
            }
        }
        c.state_hash()
    };
    let ab = finish([1, 2]);
    assert_eq!(ab, finish([2, 1]));
    assert!(r.terminals.contains_key(&ab));
}

#[test]
fn single_object_without_choice_is_one_path() {
    let src = "class Main() begin var x: Int; \
               op run == x := 1; x := x + 1; skip; await now >= 2; x := 3 end";
    let cfg = config(src, 3);
    let r = explore(&cfg, ample(), &|_: &Configuration| (), &[]);
    let trace = run(cfg, &mut Seeded::new(0), 1000).trace;
    assert_eq!(r.terminals.len(), 1);
    assert_eq!(r.states_visited, trace.len() + 1);
}

#[test]
fn bounds_truncate() {
    let cfg = model_config("ping", 1);
    let r = explore(&cfg, Bounds { depth: 1, states: 1000 }, &|_: &Configuration| (), &[]);
    assert!(r.truncated);
    assert!(r.terminals.is_empty());
    let r = explore(&cfg, Bounds { depth: 1000, states: 5 }, &|_: &Configuration| (), &[]);
    assert!(r.truncated);
    assert!(r.states_visited <= 5);
}

#[test]
fn witnesses_replay_to_their_metrics() {
    let cfg = model_config("tick-block", 3);
    let metric = |c: &Configuration| attr(c, "Main", "events");
    let all = explore(&cfg, ample(), &metric, &[]);
    for t in all.terminals.values() {
        let want = t.metrics.clone();
        let pred = move |m: &Value| *m == want;
        let q = [Query {
            name: "it".into(),
            predicate: &pred,
        }];
        let r = explore(&cfg, ample(), &metric, &q);
        let w = &r.witnesses["it"];
        let again = run(cfg.clone(), &mut Script::new(w.choices.clone()), 10_000);
        assert_eq!(metric(&again.config), t.metrics);
        assert_eq!(&again.trace, w);
    }
}

#[test]
fn impossible_predicates_have_no_witness() {
    let cfg = model_config("ping", 2);
    let never = |_: &Value| false;
    let metric = |c: &Configuration| attr(c, "Main", "r");
    let portfolio = Portfolio {
        strategies: vec![Box::new(RandomProbes { first_seed: 0, runs: 5 }), Box::new(DepthFirst)],
    };
    assert!(check_achievable(&cfg, &never, &metric, ample(), &portfolio).is_none());
    let two = |v: &Value| *v == Value::Int(2);
    let w = check_achievable(&cfg, &two, &metric, ample(), &DepthFirst).unwrap();
    assert!(!w.is_empty());
}

#[test]
fn timeout_idiom_takes_the_expected_branch() {
    for (model, expected) in [("timeout-normal", "normal"), ("timeout-late", "timeout")] {
        let cfg = model_config(model, 30);
        let r = explore(&cfg, ample(), &|c: &Configuration| attr(c, "Main", "outcome"), &[]);
        assert!(!r.truncated);
        assert!(!r.terminals.is_empty());
        for t in r.terminals.values() {
            assert_eq!(t.metrics, Value::Str(expected.into()), "{model}");
        }
    }
}
