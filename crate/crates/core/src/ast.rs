//! Abstract syntax of the modeling language.
//!
//! Statement nodes are shared through [`Arc`] so that process bodies held by
//! a running configuration are cheap pointers into the program rather than
//! copies of it.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Interned identifier.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Source position (1-based).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Program {
    pub interfaces: Vec<InterfaceDecl>,
    pub classes: Vec<ClassDecl>,
    /// Class instantiated at start-up.
    pub main: Name,
}

impl Program {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| &*c.name == name)
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        self.interfaces.iter().find(|i| &*i.name == name)
    }

    /// Picks the class called `Main`, falling back to the last class.
    pub fn default_main(classes: &[ClassDecl]) -> Name {
        classes
            .iter()
            .find(|c| &*c.name == "Main")
            .or_else(|| classes.last())
            .map(|c| c.name.clone())
            .unwrap_or_else(|| name("Main"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterfaceDecl {
    pub name: Name,
    pub span: Span,
    pub groups: Vec<SignatureGroup>,
}

impl InterfaceDecl {
    pub fn signatures(&self) -> impl Iterator<Item = &Signature> {
        self.groups.iter().flat_map(|g| g.signatures.iter())
    }
}

/// Signatures sharing one co-interface (`with I`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureGroup {
    pub cointerface: Option<Name>,
    pub signatures: Vec<Signature>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Signature {
    pub name: Name,
    pub span: Span,
    pub ins: Vec<Param>,
    pub outs: Vec<Param>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Param {
    pub name: Name,
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarDecl {
    pub name: Name,
    pub span: Span,
    pub ty: Type,
    pub init: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassDecl {
    pub name: Name,
    pub span: Span,
    pub params: Vec<Param>,
    pub implements: Vec<Name>,
    pub attrs: Vec<VarDecl>,
    pub methods: Vec<MethodDecl>,
}

impl ClassDecl {
    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| &*m.sig.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodDecl {
    pub sig: Signature,
    pub cointerface: Option<Name>,
    pub locals: Vec<VarDecl>,
    pub body: Arc<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Type {
    Int,
    Bool,
    String,
    Time,
    Tag,
    List(Box<Type>),
    Set(Box<Type>),
    Map(Box<Type>, Box<Type>),
    Tuple(Vec<Type>),
    /// Interface or class name (including `Any`).
    Named(Name),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stmt {
    /// Pre-order number within the program; stable across runs.
    pub id: u32,
    pub span: Span,
    pub kind: StmtKind,
}

impl Stmt {
    pub fn new(span: Span, kind: StmtKind) -> Self {
        Stmt { id: 0, span, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StmtKind {
    Seq(Vec<Arc<Stmt>>),
    Choice(Arc<Stmt>, Arc<Stmt>),
    Assign(Vec<Name>, Vec<Expr>),
    New {
        target: Name,
        class: Name,
        args: Vec<Expr>,
    },
    If {
        cond: Expr,
        then: Arc<Stmt>,
        otherwise: Option<Arc<Stmt>>,
    },
    While {
        cond: Expr,
        body: Arc<Stmt>,
    },
    Await(Guard),
    /// `t!o.m(e)`; a `None` callee is a local call (sugar until desugared).
    AsyncCall {
        tag: Option<Name>,
        callee: Option<Expr>,
        method: Name,
        args: Vec<Expr>,
    },
    Reply {
        tag: Name,
        outs: Vec<Name>,
    },
    Skip,
    /// Sugar: `o.m(e;x)`.
    BlockingCall {
        callee: Option<Expr>,
        method: Name,
        args: Vec<Expr>,
        outs: Vec<Name>,
    },
    /// Sugar: `await o.m(e;x)`.
    AwaitCall {
        callee: Option<Expr>,
        method: Name,
        args: Vec<Expr>,
        outs: Vec<Name>,
    },
}

impl StmtKind {
    pub fn is_sugar(&self) -> bool {
        matches!(
            self,
            StmtKind::BlockingCall { .. }
                | StmtKind::AwaitCall { .. }
                | StmtKind::AsyncCall { callee: None, .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Guard {
    Bool(Expr),
    Tag(Name),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnOp {
    Not,
    Neg,
    Len,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Add,
    Sub,
    Append,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::Eq => "=",
            BinOp::Ne => "/=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::In => "in",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Append => "|-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }
}

/// Built-in functions of the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Builtin {
    Head,
    Tail,
    IsEmpty,
    Insert,
    Get,
    Remove,
    Empty,
}

impl Builtin {
    pub fn from_name(s: &str) -> Option<Builtin> {
        Some(match s {
            "head" => Builtin::Head,
            "tail" => Builtin::Tail,
            "isempty" => Builtin::IsEmpty,
            "insert" => Builtin::Insert,
            "get" => Builtin::Get,
            "remove" => Builtin::Remove,
            "empty" => Builtin::Empty,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Head => "head",
            Builtin::Tail => "tail",
            Builtin::IsEmpty => "isempty",
            Builtin::Insert => "insert",
            Builtin::Get => "get",
            Builtin::Remove => "remove",
            Builtin::Empty => "empty",
        }
    }

    /// Accepted argument counts.
    pub fn arities(self) -> &'static [usize] {
        match self {
            Builtin::Head | Builtin::Tail | Builtin::IsEmpty => &[1],
            Builtin::Insert => &[2, 3],
            Builtin::Get | Builtin::Remove => &[2],
            Builtin::Empty => &[0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    Now,
    This,
    Var(Name),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Apply(Builtin, Vec<Expr>),
    List(Vec<Expr>),
    Set(Vec<Expr>),
    Tuple(Vec<Expr>),
}

impl Expr {
    pub fn var(s: &str) -> Expr {
        Expr::Var(name(s))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Calls `f` on every variable name read by this expression.
    pub fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Name)) {
        match self {
            Expr::Var(n) => f(n),
            Expr::Unary(_, e) => e.visit_vars(f),
            Expr::Binary(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            Expr::Apply(_, args) | Expr::List(args) | Expr::Set(args) | Expr::Tuple(args) => {
                for a in args {
                    a.visit_vars(f);
                }
            }
            Expr::Int(_) | Expr::Bool(_) | Expr::Str(_) | Expr::Null | Expr::Now | Expr::This => {}
        }
    }
}

/// Assigns pre-order statement ids across the whole program.
pub fn renumber(program: &mut Program) {
    let mut next = 0u32;
    for class in &mut program.classes {
        for method in &mut class.methods {
            method.body = renumber_stmt(&method.body, &mut next);
        }
    }
}

fn renumber_stmt(stmt: &Arc<Stmt>, next: &mut u32) -> Arc<Stmt> {
    let id = *next;
    *next += 1;
    let kind = match &stmt.kind {
        StmtKind::Seq(items) => StmtKind::Seq(items.iter().map(|s| renumber_stmt(s, next)).collect()),
        StmtKind::Choice(a, b) => {
            let a = renumber_stmt(a, next);
            StmtKind::Choice(a, renumber_stmt(b, next))
        }
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => {
            let then = renumber_stmt(then, next);
            StmtKind::If {
                cond: cond.clone(),
                then,
                otherwise: otherwise.as_ref().map(|s| renumber_stmt(s, next)),
            }
        }
        StmtKind::While { cond, body } => StmtKind::While {
            cond: cond.clone(),
            body: renumber_stmt(body, next),
        },
        other => other.clone(),
    };
    Arc::new(Stmt {
        id,
        span: stmt.span,
        kind,
    })
}

/// Visits every statement node in pre-order.
pub fn walk_stmts<'a>(stmt: &'a Stmt, f: &mut dyn FnMut(&'a Stmt)) {
    f(stmt);
    match &stmt.kind {
        StmtKind::Seq(items) => items.iter().for_each(|s| walk_stmts(s, f)),
        StmtKind::Choice(a, b) => {
            walk_stmts(a, f);
            walk_stmts(b, f);
        }
        StmtKind::If {
            then, otherwise, ..
        } => {
            walk_stmts(then, f);
            if let Some(o) = otherwise {
                walk_stmts(o, f);
            }
        }
        StmtKind::While { body, .. } => walk_stmts(body, f),
        _ => {}
    }
}

impl Program {
    /// Copy with every source position cleared, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        for i in &mut p.interfaces {
            i.span = Span::default();
            for g in &mut i.groups {
                for s in &mut g.signatures {
                    s.span = Span::default();
                }
            }
        }
        for c in &mut p.classes {
            c.span = Span::default();
            for a in &mut c.attrs {
                a.span = Span::default();
            }
            for m in &mut c.methods {
                m.sig.span = Span::default();
                for l in &mut m.locals {
                    l.span = Span::default();
                }
                m.body = strip_stmt(&m.body);
            }
        }
        p
    }
}

fn strip_stmt(s: &Arc<Stmt>) -> Arc<Stmt> {
    let kind = match &s.kind {
        StmtKind::Seq(items) => StmtKind::Seq(items.iter().map(strip_stmt).collect()),
        StmtKind::Choice(a, b) => StmtKind::Choice(strip_stmt(a), strip_stmt(b)),
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => StmtKind::If {
            cond: cond.clone(),
            then: strip_stmt(then),
            otherwise: otherwise.as_ref().map(strip_stmt),
        },
        StmtKind::While { cond, body } => StmtKind::While {
            cond: cond.clone(),
            body: strip_stmt(body),
        },
        other => other.clone(),
    };
    Arc::new(Stmt {
        id: s.id,
        span: Span::default(),
        kind,
    })
}
