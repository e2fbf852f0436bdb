//! Small-step transition rules: which steps are applicable in a
//! configuration, and the effect of applying one.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::ast::*;
use crate::eval::{eval, eval_guard};
use crate::runtime::{local_callee, ConcObject, Configuration, Fault, Invoc, Process, CALLER, RESULT};
use crate::value::{Env, ObjId, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Activate,
    Assign,
    AsyncCall,
    Await,
    Choice,
    If,
    LocalReply,
    MessageReceive,
    New,
    Reply,
    Return,
    Skip,
    Suspend,
    Tick,
    While,
}

impl Rule {
    pub const ALL: [Rule; 15] = [
        Rule::Activate,
        Rule::Assign,
        Rule::AsyncCall,
        Rule::Await,
        Rule::Choice,
        Rule::If,
        Rule::LocalReply,
        Rule::MessageReceive,
        Rule::New,
        Rule::Reply,
        Rule::Return,
        Rule::Skip,
        Rule::Suspend,
        Rule::Tick,
        Rule::While,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Activate => "activate",
            Rule::Assign => "assign",
            Rule::AsyncCall => "async-call",
            Rule::Await => "await",
            Rule::Choice => "choice",
            Rule::If => "if",
            Rule::LocalReply => "local-reply",
            Rule::MessageReceive => "message-receive",
            Rule::New => "new",
            Rule::Reply => "reply",
            Rule::Return => "return",
            Rule::Skip => "skip",
            Rule::Suspend => "suspend",
            Rule::Tick => "tick",
            Rule::While => "while",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Object(ObjId),
    Clock,
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Object(o) => write!(f, "{o}"),
            Subject::Clock => f.write_str("clock"),
        }
    }
}

/// One applicable rule instance. `detail` is the consumed invocation's
/// future id for message-receive, the queue position for activate, the
/// alternative index for choice, and 0 otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub rule: Rule,
    pub subject: Subject,
    pub detail: u32,
}

impl Transition {
    pub fn on(rule: Rule, o: ObjId, detail: u32) -> Self {
        Transition {
            rule,
            subject: Subject::Object(o),
            detail,
        }
    }

    pub fn tick() -> Self {
        Transition {
            rule: Rule::Tick,
            subject: Subject::Clock,
            detail: 0,
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.rule, self.subject, self.detail)
    }
}

/// Flattens nested choices into their alternatives, left to right.
pub fn alternatives(s: &Arc<Stmt>) -> Vec<Arc<Stmt>> {
    let mut out = Vec::new();
    fn go(s: &Arc<Stmt>, out: &mut Vec<Arc<Stmt>>) {
        match &s.kind {
            StmtKind::Choice(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => out.push(s.clone()),
        }
    }
    go(s, &mut out);
    out
}

/// Every applicable transition, in (rule name, subject, detail) order.
pub fn applicable(cfg: &Configuration) -> Vec<Transition> {
    let mut out = step_transitions(cfg);
    if out.is_empty() && cfg.clock.time < cfg.clock.limit && cfg.can_advance() {
        out.push(Transition::tick());
    }
    out.sort();
    out
}

/// All applicable transitions other than tick, unsorted.
pub fn step_transitions(cfg: &Configuration) -> Vec<Transition> {
    let mut out = Vec::new();
    for m in &cfg.messages {
        out.push(Transition::on(Rule::MessageReceive, m.callee, m.future.0));
    }
    for o in &cfg.objects {
        let id = o.id;
        let Some(p) = &o.active else {
            for (i, q) in o.queue.iter().enumerate() {
                if cfg.enabled(o, q) {
                    out.push(Transition::on(Rule::Activate, id, i as u32));
                }
            }
            continue;
        };
        let Some(head) = p.head() else {
            out.push(Transition::on(Rule::Return, id, 0));
            continue;
        };
        let rule = match &head.kind {
            StmtKind::Assign(..) => Rule::Assign,
            StmtKind::New { .. } => Rule::New,
            StmtKind::If { .. } => Rule::If,
            StmtKind::While { .. } => Rule::While,
            StmtKind::Skip => Rule::Skip,
            StmtKind::AsyncCall { .. } => Rule::AsyncCall,
            StmtKind::Await(g) => {
                if eval_guard(g, &cfg.env(o, p), &cfg.futures, cfg.clock.time) {
                    Rule::Await
                } else if p.caller_frame.is_none() {
                    Rule::Suspend
                } else {
                    continue;
                }
            }
            StmtKind::Reply { tag, .. } => match lookup(o, p, tag) {
                Some(Value::Fut(f)) if cfg.futures[f.0 as usize].completed => Rule::Reply,
                Some(Value::Fut(f)) if local_callee(o, *f).is_some() => Rule::LocalReply,
                _ => continue,
            },
            StmtKind::Choice(..) => {
                let mut any = false;
                for (i, alt) in alternatives(head).iter().enumerate() {
                    if cfg.stmt_enabled(o, p, alt) {
                        any = true;
                        out.push(Transition::on(Rule::Choice, id, i as u32));
                    }
                }
                if !any && cfg.suspendable(o, p) {
                    out.push(Transition::on(Rule::Suspend, id, 0));
                }
                continue;
            }
            StmtKind::Seq(_) | StmtKind::BlockingCall { .. } | StmtKind::AwaitCall { .. } => {
                unreachable!("process bodies hold desugared, flattened statements")
            }
        };
        out.push(Transition::on(rule, id, 0));
    }
    out
}

fn lookup<'a>(o: &'a ConcObject, p: &'a Process, n: &str) -> Option<&'a Value> {
    p.locals.get(n).or_else(|| o.attrs.get(n))
}

/// Applies `t` to a copy of `cfg`.
pub fn apply(cfg: &Configuration, t: &Transition) -> Result<Configuration, Fault> {
    let mut next = cfg.clone();
    apply_in_place(&mut next, t)?;
    Ok(next)
}

/// Applies `t` to `cfg`. On a fault `cfg` may be partially updated.
pub fn apply_in_place(cfg: &mut Configuration, t: &Transition) -> Result<(), Fault> {
    let id = match t.subject {
        Subject::Clock => {
            debug_assert_eq!(t.rule, Rule::Tick);
            cfg.clock.time += 1;
            return Ok(());
        }
        Subject::Object(id) => id,
    };
    match t.rule {
        Rule::MessageReceive => receive(cfg, id, t.detail),
        Rule::Activate => {
            let obj = cfg.object_mut(id);
            let p = obj.queue.remove(t.detail as usize);
            obj.active = Some(p);
            Ok(())
        }
        Rule::Return => finish(cfg, id),
        Rule::Suspend => {
            let obj = cfg.object_mut(id);
            let p = obj.active.take().expect("suspend needs an active process");
            obj.queue.push(p);
            Ok(())
        }
        Rule::LocalReply => {
            let obj = cfg.object_mut(id);
            let caller = obj.active.take().expect("local-reply needs an active process");
            let f = match caller.head().map(|s| &s.kind) {
                Some(StmtKind::Reply { tag, .. }) => match lookup(obj, &caller, tag) {
                    Some(Value::Fut(f)) => *f,
                    _ => unreachable!("local-reply needs a bound tag"),
                },
                _ => unreachable!("local-reply needs a join at the head"),
            };
            let at = local_callee(obj, f).expect("local-reply needs a queued callee");
            let mut callee = obj.queue.remove(at);
            callee.caller_frame = Some(Box::new(caller));
            obj.active = Some(callee);
            Ok(())
        }
        Rule::Tick => unreachable!("tick has the clock as subject"),
        _ => {
            let mut p = cfg
                .object_mut(id)
                .active
                .take()
                .expect("statement rules need an active process");
            let r = step(cfg, id, &mut p, t);
            cfg.object_mut(id).active = Some(p);
            r
        }
    }
}

fn receive(cfg: &mut Configuration, id: ObjId, future: u32) -> Result<(), Fault> {
    let pos = cfg
        .messages
        .iter()
        .position(|m| m.future.0 == future)
        .expect("message-receive names an in-flight invocation");
    let m = cfg.messages.remove(pos);
    debug_assert_eq!(m.callee, id);
    let classes = cfg.classes.clone();
    let class = cfg.object(id).class.clone();
    let decl = classes.method(&class, &m.method).ok_or_else(|| {
        Fault::new(id, Span::default(), format!("`{class}` has no method `{}`", m.method))
    })?;
    let p = cfg.bind_process(id, decl, m.args, m.caller, m.future)?;
    cfg.object_mut(id).queue.push(p);
    Ok(())
}

fn finish(cfg: &mut Configuration, id: ObjId) -> Result<(), Fault> {
    let classes = cfg.classes.clone();
    let obj = cfg.object_mut(id);
    let p = obj.active.take().expect("return needs an active process");
    let class = obj.class.clone();
    let decl = classes
        .method(&class, &p.method)
        .expect("processes run declared methods");
    let values: Vec<Value> = decl
        .sig
        .outs
        .iter()
        .map(|o| p.locals.get(&o.name).cloned().unwrap_or(Value::Null))
        .collect();
    let fut = p.result_future().expect("every process has a result future");
    cfg.retain(&values);
    let f = &mut cfg.futures[fut.0 as usize];
    f.completed = true;
    f.values = values;
    if p.emits_run && classes.method(&class, "run").is_some() {
        let n = cfg.new_future();
        cfg.messages.push(Invoc {
            callee: id,
            method: name("run"),
            args: Vec::new(),
            caller: id,
            future: n,
        });
    }
    cfg.object_mut(id).active = p.caller_frame.map(|b| *b);
    Ok(())
}

/// Whether `n` may not be assigned by process `p`.
fn read_only(cfg: &Configuration, class: &str, p: &Process, n: &str) -> bool {
    if n == CALLER || n == RESULT {
        return true;
    }
    let Some(c) = cfg.classes.class(class) else {
        return false;
    };
    let local = p.locals.contains(n);
    if local {
        c.method(&p.method)
            .is_some_and(|m| m.sig.ins.iter().any(|i| &*i.name == n))
    } else {
        c.params.iter().any(|i| &*i.name == n)
    }
}

fn assign(cfg: &mut Configuration, id: ObjId, p: &mut Process, n: &Name, v: Value, span: Span) -> Result<(), Fault> {
    let class = cfg.object(id).class.clone();
    if read_only(cfg, &class, p, n) {
        return Err(Fault::new(id, span, format!("`{n}` is read-only")));
    }
    if p.locals.contains(n) {
        p.locals.set(n, v);
        return Ok(());
    }
    if cfg.object_mut(id).attrs.set(n, v.clone()) {
        return Ok(());
    }
    if n.starts_with(crate::lexer::RESERVED_TAG_PREFIX) {
        p.locals.insert(n.clone(), v);
        return Ok(());
    }
    Err(Fault::new(id, span, format!("undeclared variable `{n}`")))
}

fn eval_in(cfg: &Configuration, id: ObjId, p: &Process, e: &Expr, span: Span) -> Result<Value, Fault> {
    let obj = cfg.object(id);
    eval(e, &Env::new(Some(id), &obj.attrs, &p.locals), cfg.clock.time).map_err(|err| Fault::eval(id, span, err))
}

fn eval_all(cfg: &Configuration, id: ObjId, p: &Process, es: &[Expr], span: Span) -> Result<Vec<Value>, Fault> {
    es.iter().map(|e| eval_in(cfg, id, p, e, span)).collect()
}

fn eval_bool(cfg: &Configuration, id: ObjId, p: &Process, e: &Expr, span: Span) -> Result<bool, Fault> {
    match eval_in(cfg, id, p, e, span)? {
        Value::Bool(b) => Ok(b),
        other => Err(Fault::new(id, span, format!("condition evaluated to {}", other.kind()))),
    }
}

/// Executes one statement-level rule on the (detached) active process.
fn step(cfg: &mut Configuration, id: ObjId, p: &mut Process, t: &Transition) -> Result<(), Fault> {
    let head = p.head().cloned().expect("statement rules need a statement");
    let span = head.span;
    match (&head.kind, t.rule) {
        (StmtKind::Skip, Rule::Skip) | (StmtKind::Await(_), Rule::Await) => {
            p.pop();
        }
        (StmtKind::Assign(targets, values), Rule::Assign) => {
            let vs = eval_all(cfg, id, p, values, span)?;
            if vs.len() != targets.len() {
                return Err(Fault::new(id, span, "assignment arity mismatch"));
            }
            p.pop();
            for (n, v) in targets.iter().zip(vs) {
                assign(cfg, id, p, n, v, span)?;
            }
        }
        (StmtKind::New { target, class, args }, Rule::New) => {
            let vs = eval_all(cfg, id, p, args, span)?;
            let obj = cfg.instantiate(class, vs, id, span)?;
            p.pop();
            assign(cfg, id, p, target, Value::Obj(obj), span)?;
        }
        (StmtKind::If { cond, then, otherwise }, Rule::If) => {
            let c = eval_bool(cfg, id, p, cond, span)?;
            p.pop();
            if c {
                p.push(then);
            } else if let Some(o) = otherwise {
                p.push(o);
            }
        }
        (StmtKind::While { cond, body }, Rule::While) => {
            if eval_bool(cfg, id, p, cond, span)? {
                p.push(body);
            } else {
                p.pop();
            }
        }
        (StmtKind::Choice(..), Rule::Choice) => {
            let alts = alternatives(&head);
            let alt = alts
                .get(t.detail as usize)
                .cloned()
                .ok_or_else(|| Fault::new(id, span, "no such alternative"))?;
            p.pop();
            p.push(&alt);
        }
        (StmtKind::AsyncCall { tag, callee, method, args }, Rule::AsyncCall) => {
            let target = match callee {
                Some(e) => eval_in(cfg, id, p, e, span)?,
                None => Value::Obj(id),
            };
            let callee = match target {
                Value::Obj(o) => o,
                Value::Null => return Err(Fault::new(id, span, format!("call of `{method}` on null"))),
                other => {
                    return Err(Fault::new(id, span, format!("call of `{method}` on a {}", other.kind())))
                }
            };
            let vs = eval_all(cfg, id, p, args, span)?;
            let fut = cfg.new_future();
            cfg.retain(&vs);
            p.pop();
            if let Some(t) = tag {
                assign(cfg, id, p, t, Value::Fut(fut), span)?;
            }
            cfg.messages.push(Invoc {
                callee,
                method: method.clone(),
                args: vs,
                caller: id,
                future: fut,
            });
        }
        (StmtKind::Reply { tag, outs }, Rule::Reply) => {
            let Some(Value::Fut(f)) = lookup(cfg.object(id), p, tag).cloned() else {
                return Err(Fault::new(id, span, format!("`{tag}` is not bound to a call")));
            };
            let values = cfg.futures[f.0 as usize].values.clone();
            if values.len() != outs.len() {
                return Err(Fault::new(
                    id,
                    span,
                    format!("join expects {} values, call returned {}", outs.len(), values.len()),
                ));
            }
            p.pop();
            cfg.retain(&values);
            for (n, v) in outs.iter().zip(values) {
                assign(cfg, id, p, n, v, span)?;
            }
        }
        (kind, rule) => unreachable!("rule {rule} does not apply to {kind:?}"),
    }
    Ok(())
}
