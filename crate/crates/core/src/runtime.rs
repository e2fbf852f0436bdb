//! The configuration: objects, processes, futures, in-flight invocations and
//! the global clock, together with the enabledness and quiescence predicates.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hasher;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::*;
use crate::eval::{eval, eval_guard, EvalError, FutureView};
use crate::value::{Bindings, Env, FutId, ObjId, Value};

/// Local bound to the invoking object in every method process.
pub const CALLER: &str = "caller";
/// Local bound to the future that receives a method's out values.
pub const RESULT: &str = ".result";

/// A runtime fault: halts the run.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("runtime fault in {object} at {span}: {message}")]
pub struct Fault {
    pub object: ObjId,
    pub span: Span,
    pub message: String,
}

impl Fault {
    pub fn new(object: ObjId, span: Span, message: impl Into<String>) -> Self {
        Fault {
            object,
            span,
            message: message.into(),
        }
    }

    pub(crate) fn eval(object: ObjId, span: Span, e: EvalError) -> Self {
        Fault::new(object, span, e.to_string())
    }
}

#[derive(Debug, Error)]
pub enum InitError {
    #[error("main class `{0}` is not declared")]
    MissingMain(String),
    #[error("main class `{0}` must not take parameters")]
    ParameterizedMain(String),
    #[error(transparent)]
    Fault(#[from] Fault),
}

/// Desugared program with name lookups precomputed. Shared by every
/// configuration derived from one initial state; never part of the state.
#[derive(Debug)]
pub struct ClassTable {
    pub program: Program,
    index: HashMap<Name, usize>,
}

impl ClassTable {
    pub fn new(program: Program) -> Self {
        let index = program
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.clone(), i))
            .collect();
        ClassTable { program, index }
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.index.get(name).map(|&i| &self.program.classes[i])
    }

    pub fn method(&self, class: &str, method: &str) -> Option<&MethodDecl> {
        self.class(class)?.method(method)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clock {
    pub time: u64,
    pub limit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Future {
    pub id: FutId,
    pub completed: bool,
    pub refcount: u32,
    pub values: Vec<Value>,
}

/// An activation of a method.
#[derive(Clone, Debug)]
pub struct Process {
    pub method: Name,
    pub locals: Bindings,
    /// Remaining statements, next statement LAST. Never holds a `Seq` node.
    pub body: Vec<Arc<Stmt>>,
    /// Set while this process runs on behalf of a synchronous local call:
    /// the caller, blocked at its join, resumes when this frame returns.
    pub caller_frame: Option<Box<Process>>,
    /// An init process: returning emits the object's `run` invocation.
    pub emits_run: bool,
}

impl Process {
    pub fn new(method: Name, locals: Bindings, body: &Arc<Stmt>) -> Self {
        let mut p = Process {
            method,
            locals,
            body: Vec::new(),
            caller_frame: None,
            emits_run: false,
        };
        p.push(body);
        p
    }

    pub fn head(&self) -> Option<&Arc<Stmt>> {
        self.body.last()
    }

    /// Places `stmt` in front of the remaining body, flattening sequences.
    pub fn push(&mut self, stmt: &Arc<Stmt>) {
        match &stmt.kind {
            StmtKind::Seq(items) => items.iter().rev().for_each(|s| self.push(s)),
            _ => self.body.push(stmt.clone()),
        }
    }

    pub fn pop(&mut self) -> Option<Arc<Stmt>> {
        self.body.pop()
    }

    pub fn result_future(&self) -> Option<FutId> {
        match self.locals.get(RESULT) {
            Some(Value::Fut(f)) => Some(*f),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConcObject {
    pub id: ObjId,
    pub class: Name,
    pub attrs: Bindings,
    pub active: Option<Process>,
    pub queue: Vec<Process>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invoc {
    pub callee: ObjId,
    pub method: Name,
    pub args: Vec<Value>,
    pub caller: ObjId,
    pub future: FutId,
}

/// The global state. Objects are shared copy-on-write so that cloning a
/// configuration for exploration is cheap.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub classes: Arc<ClassTable>,
    pub objects: Vec<Arc<ConcObject>>,
    pub futures: Vec<Future>,
    /// In-flight invocations, ordered by future id.
    pub messages: Vec<Invoc>,
    pub clock: Clock,
}

impl FutureView for Vec<Future> {
    fn is_completed(&self, id: FutId) -> bool {
        self.get(id.0 as usize).is_some_and(|f| f.completed)
    }
}

/// Builds the initial configuration: one instance of the main class.
pub fn init_configuration(program: &Program, limit: u64) -> Result<Configuration, InitError> {
    let main = program.main.clone();
    match program.class(&main) {
        None => return Err(InitError::MissingMain(main.to_string())),
        Some(c) if !c.params.is_empty() => return Err(InitError::ParameterizedMain(main.to_string())),
        Some(_) => {}
    }
    let mut cfg = Configuration {
        classes: Arc::new(ClassTable::new(program.clone())),
        objects: Vec::new(),
        futures: Vec::new(),
        messages: Vec::new(),
        clock: Clock { time: 0, limit },
    };
    let id = ObjId(0);
    cfg.instantiate(&main, Vec::new(), id, Span::default())?;
    Ok(cfg)
}

impl Configuration {
    pub fn object(&self, id: ObjId) -> &ConcObject {
        &self.objects[id.0 as usize]
    }

    pub fn object_mut(&mut self, id: ObjId) -> &mut ConcObject {
        Arc::make_mut(&mut self.objects[id.0 as usize])
    }

    pub fn future(&self, id: FutId) -> Option<&Future> {
        self.futures.get(id.0 as usize)
    }

    pub fn next_object_id(&self) -> ObjId {
        ObjId(self.objects.len() as u32)
    }

    pub fn next_future_id(&self) -> FutId {
        FutId(self.futures.len() as u32)
    }

    pub fn new_future(&mut self) -> FutId {
        let id = self.next_future_id();
        self.futures.push(Future {
            id,
            completed: false,
            refcount: 1,
            values: Vec::new(),
        });
        id
    }

    /// Counts copies of future references carried by `values`.
    pub fn retain(&mut self, values: &[Value]) {
        for v in values {
            v.for_each_future(&mut |f| {
                if let Some(fut) = self.futures.get_mut(f.0 as usize) {
                    fut.refcount += 1;
                }
            });
        }
    }

    /// First object whose class is `class`, by id.
    pub fn find_object(&self, class: &str) -> Option<&ConcObject> {
        self.objects.iter().map(|o| &**o).find(|o| &*o.class == class)
    }

    /// Binds a method's parameters and locals into a fresh process.
    pub fn bind_process(
        &self,
        callee: ObjId,
        method: &MethodDecl,
        args: Vec<Value>,
        caller: ObjId,
        future: FutId,
    ) -> Result<Process, Fault> {
        if args.len() != method.sig.ins.len() {
            return Err(Fault::new(
                callee,
                method.sig.span,
                format!(
                    "`{}` expects {} arguments, received {}",
                    method.sig.name,
                    method.sig.ins.len(),
                    args.len()
                ),
            ));
        }
        let mut locals = Bindings::new();
        locals.insert(name(CALLER), Value::Obj(caller));
        locals.insert(name(RESULT), Value::Fut(future));
        for (p, v) in method.sig.ins.iter().zip(args) {
            locals.insert(p.name.clone(), v);
        }
        for p in &method.sig.outs {
            locals.insert(p.name.clone(), Value::default_for(&p.ty));
        }
        let attrs = &self.object(callee).attrs;
        for l in &method.locals {
            let v = match &l.init {
                Some(e) => eval(e, &Env::new(Some(callee), attrs, &locals), self.clock.time)
                    .map_err(|e| Fault::eval(callee, l.span, e))?,
                None => Value::default_for(&l.ty),
            };
            locals.insert(l.name.clone(), v);
        }
        Ok(Process::new(method.sig.name.clone(), locals, &method.body))
    }

    /// Creates an object of `class`: parameters become read-only attributes,
    /// attribute initializers run in order, then `init` becomes the active
    /// process (or `run` is queued when there is no `init`).
    pub fn instantiate(
        &mut self,
        class: &str,
        args: Vec<Value>,
        creator: ObjId,
        span: Span,
    ) -> Result<ObjId, Fault> {
        let classes = self.classes.clone();
        let decl = classes
            .class(class)
            .ok_or_else(|| Fault::new(creator, span, format!("unknown class `{class}`")))?;
        if decl.params.len() != args.len() {
            return Err(Fault::new(
                creator,
                span,
                format!("`{class}` expects {} arguments, given {}", decl.params.len(), args.len()),
            ));
        }
        let id = self.next_object_id();
        let mut attrs = Bindings::new();
        for (p, v) in decl.params.iter().zip(args) {
            attrs.insert(p.name.clone(), v);
        }
        let empty = Bindings::new();
        for a in &decl.attrs {
            let v = match &a.init {
                Some(e) => eval(e, &Env::new(Some(id), &attrs, &empty), self.clock.time)
                    .map_err(|e| Fault::eval(id, a.span, e))?,
                None => Value::default_for(&a.ty),
            };
            attrs.insert(a.name.clone(), v);
        }
        self.objects.push(Arc::new(ConcObject {
            id,
            class: decl.name.clone(),
            attrs,
            active: None,
            queue: Vec::new(),
        }));
        if let Some(init) = decl.method("init") {
            let fut = self.new_future();
            let mut p = self.bind_process(id, init, Vec::new(), creator, fut)?;
            p.emits_run = decl.method("run").is_some();
            self.object_mut(id).active = Some(p);
        } else if let Some(run) = decl.method("run") {
            let fut = self.new_future();
            let p = self.bind_process(id, run, Vec::new(), id, fut)?;
            self.object_mut(id).queue.push(p);
        }
        Ok(id)
    }

    pub fn env<'a>(&'a self, obj: &'a ConcObject, p: &'a Process) -> Env<'a> {
        Env::new(Some(obj.id), &obj.attrs, &p.locals)
    }

    /// Whether the next statement of `p` (running in `obj`) can execute now.
    pub fn enabled(&self, obj: &ConcObject, p: &Process) -> bool {
        match p.head() {
            None => true,
            Some(s) => self.stmt_enabled(obj, p, s),
        }
    }

    /// Enabledness of statement `s` as the next statement of `p`.
    pub fn stmt_enabled(&self, obj: &ConcObject, p: &Process, s: &Stmt) -> bool {
        match &s.kind {
            StmtKind::Await(g) => eval_guard(g, &self.env(obj, p), &self.futures, self.clock.time),
            StmtKind::Reply { tag, .. } => match p.locals.get(tag).or_else(|| obj.attrs.get(tag)) {
                Some(Value::Fut(f)) => {
                    self.futures.is_completed(*f) || local_callee(obj, *f).is_some()
                }
                _ => false,
            },
            StmtKind::Choice(a, b) => self.stmt_enabled(obj, p, a) || self.stmt_enabled(obj, p, b),
            StmtKind::Seq(items) => items.first().is_none_or(|f| self.stmt_enabled(obj, p, f)),
            _ => true,
        }
    }

    /// A disabled process that would release the processor: a bottom frame
    /// whose next statement is an await (or a choice of awaits).
    pub fn suspendable(&self, obj: &ConcObject, p: &Process) -> bool {
        p.caller_frame.is_none()
            && p.head().is_some_and(|s| awaits_only(s))
            && !self.enabled(obj, p)
    }

    /// The clock may advance: no active or activatable process is enabled
    /// and no invocation is in flight. A blocked active process does not
    /// hold the clock back, though [`crate::semantics::applicable`] offers
    /// the tick only once it has been suspended.
    pub fn can_advance(&self) -> bool {
        if !self.messages.is_empty() {
            return false;
        }
        self.objects.iter().all(|o| match &o.active {
            Some(p) => !self.enabled(o, p),
            None => o.queue.iter().all(|p| !self.enabled(o, p)),
        })
    }

    /// Canonical text form. Statement bodies are listed by statement id.
    pub fn write_snapshot(&self, w: &mut dyn fmt::Write) -> fmt::Result {
        writeln!(
            w,
            "clock {}/{} next o{} f{}",
            self.clock.time,
            self.clock.limit,
            self.objects.len(),
            self.futures.len()
        )?;
        for o in &self.objects {
            writeln!(w, "object {} {} {}", o.id, o.class, o.attrs)?;
            match &o.active {
                Some(p) => {
                    w.write_str("  active ")?;
                    write_process(w, p)?;
                }
                None => w.write_str("  idle\n")?,
            }
            for p in &o.queue {
                w.write_str("  queued ")?;
                write_process(w, p)?;
            }
        }
        for f in &self.futures {
            write!(w, "future {} {} ref {} [", f.id, if f.completed { "done" } else { "open" }, f.refcount)?;
            for (i, v) in f.values.iter().enumerate() {
                if i > 0 {
                    w.write_str(",")?;
                }
                write!(w, "{v}")?;
            }
            w.write_str("]\n")?;
        }
        for m in &self.messages {
            write!(w, "invoc {} {}.{}(", m.future, m.callee, m.method)?;
            for (i, v) in m.args.iter().enumerate() {
                if i > 0 {
                    w.write_str(",")?;
                }
                write!(w, "{v}")?;
            }
            writeln!(w, ") from {}", m.caller)?;
        }
        Ok(())
    }

    pub fn snapshot(&self) -> String {
        let mut s = String::new();
        self.write_snapshot(&mut s).expect("writing to a String cannot fail");
        s
    }

    /// Hash of the canonical snapshot, computed without materializing it.
    pub fn state_hash(&self) -> u64 {
        let mut h = HashWriter(DefaultHasher::new());
        self.write_snapshot(&mut h).expect("hashing cannot fail");
        h.0.finish()
    }
}

struct HashWriter(DefaultHasher);

impl fmt::Write for HashWriter {
    fn write_str(&mut self, s: &str) -> fmt::Result {
        self.0.write(s.as_bytes());
        Ok(())
    }
}

fn write_process(w: &mut dyn fmt::Write, p: &Process) -> fmt::Result {
    write!(w, "{}{} {} [", p.method, if p.emits_run { "*" } else { "" }, p.locals)?;
    for (i, s) in p.body.iter().rev().enumerate() {
        if i > 0 {
            w.write_str(",")?;
        }
        write!(w, "{}", s.id)?;
    }
    w.write_str("]\n")?;
    if let Some(c) = &p.caller_frame {
        w.write_str("    for ")?;
        write_process(w, c)?;
    }
    Ok(())
}

/// Whether every alternative of `s` starts with an await.
pub fn awaits_only(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Await(_) => true,
        StmtKind::Choice(a, b) => awaits_only(a) && awaits_only(b),
        StmtKind::Seq(items) => items.first().is_some_and(|f| awaits_only(f)),
        _ => false,
    }
}

/// Position in `obj`'s queue of the process computing future `f`, i.e. the
/// callee of a local call that has been received but not yet joined.
pub fn local_callee(obj: &ConcObject, f: FutId) -> Option<usize> {
    obj.queue.iter().position(|q| q.result_future() == Some(f))
}
