//! Name- and arity-level static checks.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::ast::*;
use crate::lexer::RESERVED_TAG_PREFIX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Category {
    DuplicateDeclaration,
    UndeclaredVariable,
    UnknownClass,
    UnknownInterface,
    UnknownType,
    UnknownMethod,
    ArityMismatch,
    ReadOnlyAssignment,
    MainClass,
}

impl Category {
    pub fn describe(self) -> &'static str {
        match self {
            Category::DuplicateDeclaration => "duplicate declaration",
            Category::UndeclaredVariable => "undeclared variable",
            Category::UnknownClass => "unknown class",
            Category::UnknownInterface => "unknown interface",
            Category::UnknownType => "unknown type",
            Category::UnknownMethod => "unknown method",
            Category::ArityMismatch => "arity mismatch",
            Category::ReadOnlyAssignment => "assignment to read-only name",
            Category::MainClass => "invalid main class",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub span: Span,
    pub category: Category,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.category.describe(), self.message)
    }
}

/// Checks a parsed program. Sugar forms are accepted.
pub fn validate(program: &Program) -> Result<(), Vec<Diagnostic>> {
    let mut v = Validator {
        program,
        diags: Vec::new(),
    };
    v.run();
    if v.diags.is_empty() {
        Ok(())
    } else {
        Err(v.diags)
    }
}

struct Validator<'a> {
    program: &'a Program,
    diags: Vec<Diagnostic>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Access {
    ReadWrite,
    ReadOnly,
}

struct Scope<'a> {
    class: &'a ClassDecl,
    vars: HashMap<&'a str, (Access, &'a Type)>,
}

const ANY: &str = "Any";

impl<'a> Validator<'a> {
    fn report(&mut self, span: Span, category: Category, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            span,
            category,
            message: message.into(),
        });
    }

    fn run(&mut self) {
        let p = self.program;
        let mut seen = HashSet::new();
        for i in &p.interfaces {
            if !seen.insert(&*i.name) {
                self.report(i.span, Category::DuplicateDeclaration, format!("interface `{}`", i.name));
            }
            let mut sigs = HashSet::new();
            for s in i.signatures() {
                if !sigs.insert(&*s.name) {
                    self.report(s.span, Category::DuplicateDeclaration, format!("method `{}`", s.name));
                }
                self.check_params(s.span, s.ins.iter().chain(&s.outs));
            }
            for g in &i.groups {
                if let Some(co) = &g.cointerface {
                    self.check_interface_name(co, i.span);
                }
            }
        }
        let mut seen = HashSet::new();
        for c in &p.classes {
            if !seen.insert(&*c.name) {
                self.report(c.span, Category::DuplicateDeclaration, format!("class `{}`", c.name));
            }
        }
        for c in &p.classes {
            self.check_class(c);
        }
        match p.class(&p.main) {
            None => self.report(
                Span::default(),
                Category::MainClass,
                format!("main class `{}` is not declared", p.main),
            ),
            Some(c) if !c.params.is_empty() => self.report(
                c.span,
                Category::MainClass,
                format!("main class `{}` must not take parameters", c.name),
            ),
            Some(_) => {}
        }
    }

    fn check_interface_name(&mut self, n: &Name, span: Span) {
        if &**n != ANY && self.program.interface(n).is_none() {
            self.report(span, Category::UnknownInterface, format!("`{n}`"));
        }
    }

    fn check_type(&mut self, ty: &Type, span: Span) {
        match ty {
            Type::List(t) | Type::Set(t) => self.check_type(t, span),
            Type::Map(k, v) => {
                self.check_type(k, span);
                self.check_type(v, span);
            }
            Type::Tuple(items) => items.iter().for_each(|t| self.check_type(t, span)),
            Type::Named(n)
                if &**n != ANY && self.program.interface(n).is_none() && self.program.class(n).is_none() => {
                    self.report(span, Category::UnknownType, format!("`{n}`"));
                }
            _ => {}
        }
    }

    fn check_params<'p>(&mut self, span: Span, params: impl Iterator<Item = &'p Param>) {
        let mut seen = HashSet::new();
        for prm in params {
            if !seen.insert(prm.name.clone()) {
                self.report(span, Category::DuplicateDeclaration, format!("parameter `{}`", prm.name));
            }
            self.check_type(&prm.ty, span);
        }
    }

    fn check_class(&mut self, c: &'a ClassDecl) {
        for i in &c.implements {
            self.check_interface_name(i, c.span);
        }
        let mut scope = Scope {
            class: c,
            vars: HashMap::new(),
        };
        for prm in &c.params {
            self.check_type(&prm.ty, c.span);
            if scope.vars.insert(&prm.name, (Access::ReadOnly, &prm.ty)).is_some() {
                self.report(c.span, Category::DuplicateDeclaration, format!("`{}`", prm.name));
            }
        }
        for a in &c.attrs {
            self.check_type(&a.ty, a.span);
            if let Some(init) = &a.init {
                self.check_expr(init, &scope, a.span);
            }
            if scope.vars.insert(&a.name, (Access::ReadWrite, &a.ty)).is_some() {
                self.report(a.span, Category::DuplicateDeclaration, format!("attribute `{}`", a.name));
            }
        }
        let mut methods = HashSet::new();
        for m in &c.methods {
            if !methods.insert(&*m.sig.name) {
                self.report(m.sig.span, Category::DuplicateDeclaration, format!("method `{}`", m.sig.name));
            }
            if let Some(co) = &m.cointerface {
                self.check_interface_name(co, m.sig.span);
            }
            self.check_method(m, &scope);
        }
    }

    fn check_method(&mut self, m: &'a MethodDecl, class_scope: &Scope<'a>) {
        let mut scope = Scope {
            class: class_scope.class,
            vars: class_scope.vars.clone(),
        };
        let mut local_names = HashSet::new();
        let mut declare = |v: &mut Self, n: &'a Name, span: Span, acc: Access, ty: &'a Type| {
            if !local_names.insert(&**n) {
                v.report(span, Category::DuplicateDeclaration, format!("`{n}`"));
            }
            scope.vars.insert(n, (acc, ty));
        };
        for prm in &m.sig.ins {
            self.check_type(&prm.ty, m.sig.span);
            declare(self, &prm.name, m.sig.span, Access::ReadOnly, &prm.ty);
        }
        for prm in &m.sig.outs {
            self.check_type(&prm.ty, m.sig.span);
            declare(self, &prm.name, m.sig.span, Access::ReadWrite, &prm.ty);
        }
        for l in &m.locals {
            self.check_type(&l.ty, l.span);
            declare(self, &l.name, l.span, Access::ReadWrite, &l.ty);
        }
        // Initializers may refer to earlier locals; checked against the full scope.
        for l in &m.locals {
            if let Some(init) = &l.init {
                self.check_expr(init, &scope, l.span);
            }
        }
        self.check_stmt(&m.body, &scope);
    }

    fn check_var(&mut self, n: &Name, scope: &Scope<'_>, span: Span) {
        if &**n == "caller" || n.starts_with(RESERVED_TAG_PREFIX) {
            return;
        }
        if !scope.vars.contains_key(&**n) {
            self.report(span, Category::UndeclaredVariable, format!("`{n}`"));
        }
    }

    fn check_expr(&mut self, e: &Expr, scope: &Scope<'_>, span: Span) {
        let mut names = Vec::new();
        e.visit_vars(&mut |n| names.push(n.clone()));
        for n in names {
            self.check_var(&n, scope, span);
        }
        self.check_builtin_arity(e, span);
    }

    fn check_builtin_arity(&mut self, e: &Expr, span: Span) {
        match e {
            Expr::Apply(f, args) => {
                if !f.arities().contains(&args.len()) {
                    self.report(
                        span,
                        Category::ArityMismatch,
                        format!("`{}` takes {:?} arguments, given {}", f.name(), f.arities(), args.len()),
                    );
                }
                args.iter().for_each(|a| self.check_builtin_arity(a, span));
            }
            Expr::Unary(_, x) => self.check_builtin_arity(x, span),
            Expr::Binary(_, l, r) => {
                self.check_builtin_arity(l, span);
                self.check_builtin_arity(r, span);
            }
            Expr::List(xs) | Expr::Set(xs) | Expr::Tuple(xs) => {
                xs.iter().for_each(|a| self.check_builtin_arity(a, span))
            }
            _ => {}
        }
    }

    fn check_target(&mut self, n: &Name, scope: &Scope<'_>, span: Span) {
        if &**n == "caller" {
            self.report(span, Category::ReadOnlyAssignment, "`caller`");
            return;
        }
        match scope.vars.get(&**n) {
            None if n.starts_with(RESERVED_TAG_PREFIX) => {}
            None => self.report(span, Category::UndeclaredVariable, format!("`{n}`")),
            Some((Access::ReadOnly, _)) => {
                self.report(span, Category::ReadOnlyAssignment, format!("`{n}`"))
            }
            Some(_) => {}
        }
    }

    fn check_guard(&mut self, g: &Guard, scope: &Scope<'_>, span: Span) {
        match g {
            Guard::Bool(e) => self.check_expr(e, scope, span),
            Guard::Tag(t) => self.check_var(t, scope, span),
            Guard::And(a, b) | Guard::Or(a, b) => {
                self.check_guard(a, scope, span);
                self.check_guard(b, scope, span);
            }
        }
    }

    fn check_stmt(&mut self, s: &Stmt, scope: &Scope<'_>) {
        let span = s.span;
        match &s.kind {
            StmtKind::Seq(items) => items.iter().for_each(|i| self.check_stmt(i, scope)),
            StmtKind::Choice(a, b) => {
                self.check_stmt(a, scope);
                self.check_stmt(b, scope);
            }
            StmtKind::Assign(targets, values) => {
                values.iter().for_each(|v| self.check_expr(v, scope, span));
                targets.iter().for_each(|t| self.check_target(t, scope, span));
            }
            StmtKind::New {
                target,
                class,
                args,
            } => {
                args.iter().for_each(|a| self.check_expr(a, scope, span));
                self.check_target(target, scope, span);
                match self.program.class(class) {
                    None => self.report(span, Category::UnknownClass, format!("`{class}`")),
                    Some(c) if c.params.len() != args.len() => self.report(
                        span,
                        Category::ArityMismatch,
                        format!(
                            "`new {class}` expects {} arguments, given {}",
                            c.params.len(),
                            args.len()
                        ),
                    ),
                    Some(_) => {}
                }
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                self.check_expr(cond, scope, span);
                self.check_stmt(then, scope);
                if let Some(o) = otherwise {
                    self.check_stmt(o, scope);
                }
            }
            StmtKind::While { cond, body } => {
                self.check_expr(cond, scope, span);
                self.check_stmt(body, scope);
            }
            StmtKind::Await(g) => self.check_guard(g, scope, span),
            StmtKind::AsyncCall {
                tag,
                callee,
                method,
                args,
            } => {
                if let Some(t) = tag {
                    self.check_target(t, scope, span);
                }
                self.check_call(callee.as_ref(), method, args, None, scope, span);
            }
            StmtKind::Reply { tag, outs } => {
                self.check_var(tag, scope, span);
                outs.iter().for_each(|o| self.check_target(o, scope, span));
            }
            StmtKind::Skip => {}
            StmtKind::BlockingCall {
                callee,
                method,
                args,
                outs,
            }
            | StmtKind::AwaitCall {
                callee,
                method,
                args,
                outs,
            } => {
                outs.iter().for_each(|o| self.check_target(o, scope, span));
                self.check_call(callee.as_ref(), method, args, Some(outs.len()), scope, span);
            }
        }
    }

    fn check_call(
        &mut self,
        callee: Option<&Expr>,
        method: &Name,
        args: &[Expr],
        outs: Option<usize>,
        scope: &Scope<'_>,
        span: Span,
    ) {
        if let Some(c) = callee {
            self.check_expr(c, scope, span);
        }
        args.iter().for_each(|a| self.check_expr(a, scope, span));
        let sigs = self.resolve(callee, method, scope);
        match sigs {
            Resolution::Unknown(owner) => self.report(
                span,
                Category::UnknownMethod,
                format!("`{method}` is not declared by `{owner}`"),
            ),
            Resolution::Found(arities) => {
                let ok = arities
                    .iter()
                    .any(|(i, o)| *i == args.len() && outs.is_none_or(|n| n == *o));
                if !ok {
                    let (i, o) = arities[0];
                    self.report(
                        span,
                        Category::ArityMismatch,
                        format!(
                            "`{method}` takes {i} input(s) and {o} output(s), called with {} input(s){}",
                            args.len(),
                            outs.map(|n| format!(" and {n} output(s)")).unwrap_or_default()
                        ),
                    );
                }
            }
        }
    }

    fn resolve(&self, callee: Option<&Expr>, method: &str, scope: &Scope<'_>) -> Resolution {
        let of_sig = |s: &Signature| (s.ins.len(), s.outs.len());
        let in_class = |c: &ClassDecl| c.method(method).map(|m| vec![of_sig(&m.sig)]);
        let anywhere = || -> Resolution {
            let found: Vec<_> = self
                .program
                .classes
                .iter()
                .filter_map(|c| c.method(method))
                .map(|m| of_sig(&m.sig))
                .collect();
            if found.is_empty() {
                Resolution::Unknown("any class".into())
            } else {
                Resolution::Found(found)
            }
        };
        let type_name: Option<String> = match callee {
            None | Some(Expr::This) => Some(scope.class.name.to_string()),
            Some(Expr::Var(n)) => match scope.vars.get(&**n) {
                Some((_, Type::Named(t))) => Some(t.to_string()),
                _ => None,
            },
            _ => None,
        };
        let Some(t) = type_name else {
            return anywhere();
        };
        if t == ANY {
            return anywhere();
        }
        if let Some(c) = self.program.class(&t) {
            return match in_class(c) {
                Some(a) => Resolution::Found(a),
                None => Resolution::Unknown(t),
            };
        }
        if let Some(i) = self.program.interface(&t) {
            let found: Vec<_> = i.signatures().filter(|s| &*s.name == method).map(of_sig).collect();
            return if found.is_empty() {
                Resolution::Unknown(t)
            } else {
                Resolution::Found(found)
            };
        }
        anywhere()
    }
}

enum Resolution {
    Found(Vec<(usize, usize)>),
    Unknown(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, SourceModel};

    fn diags(src: &str) -> Vec<Diagnostic> {
        validate(&parse(&SourceModel::inline(src)).unwrap())
            .err()
            .unwrap_or_default()
    }

    #[test]
    fn unknown_method() {
        let d = diags("class Main() begin op run == frob(;) end");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].category, Category::UnknownMethod);
        assert_eq!(d[0].span.line, 1);
    }

    #[test]
    fn duplicate_attribute() {
        let d = diags("class Main() begin var x: Int; var x: Int; end");
        assert_eq!(d[0].category, Category::DuplicateDeclaration);
    }

    #[test]
    fn undeclared_variable() {
        let d = diags("class Main() begin op run == x := y end");
        assert!(d.iter().all(|d| d.category == Category::UndeclaredVariable));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn arity_mismatch() {
        let d = diags(
            "class P() begin op ping(in x: Int out y: Int) == y := x end \
             class Main() begin var p: P; var r: Int; op run == p := new P(); p.ping(1, 2; r) end",
        );
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].category, Category::ArityMismatch);
    }

    #[test]
    fn read_only_parameters() {
        let d = diags("class Main() begin op m(in x: Int) == x := 1 end");
        assert_eq!(d[0].category, Category::ReadOnlyAssignment);
        let d = diags("class C(k: Int) begin op m == k := 1 end class Main() begin end");
        assert_eq!(d[0].category, Category::ReadOnlyAssignment);
    }

    #[test]
    fn unknown_class_and_interface() {
        let d = diags("class Main() implements Nope begin var o: Any; op run == o := new Q() end");
        let cats: Vec<_> = d.iter().map(|d| d.category).collect();
        assert!(cats.contains(&Category::UnknownInterface));
        assert!(cats.contains(&Category::UnknownClass));
    }

    #[test]
    fn main_class_must_be_parameterless() {
        let d = diags("class Main(x: Int) begin end");
        assert_eq!(d[0].category, Category::MainClass);
    }

    #[test]
    fn interface_typed_call_checks_signatures() {
        let src = "interface I begin with Any op m(in x: Int) end \
                   class K() implements I begin op m(in x: Int) == skip end \
                   class Main() begin var i: I; op run == i := new K(); !i.m(1); !i.zap() end";
        let d = diags(src);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].category, Category::UnknownMethod);
    }
}
