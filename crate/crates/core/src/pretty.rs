//! Source-form printing. Output reparses to a structurally identical AST.

use std::fmt::{self, Write};

use crate::ast::*;

pub fn program_to_string(p: &Program) -> String {
    let mut out = String::new();
    write_program(&mut out, p).expect("writing to a String cannot fail");
    out
}

pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, s, 0).expect("writing to a String cannot fail");
    out
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e).expect("writing to a String cannot fail");
    out
}

fn indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

pub fn write_program(out: &mut String, p: &Program) -> fmt::Result {
    for i in &p.interfaces {
        writeln!(out, "interface {}\nbegin", i.name)?;
        for g in &i.groups {
            if let Some(co) = &g.cointerface {
                writeln!(out, "  with {co}")?;
            }
            for s in &g.signatures {
                out.push_str("    ");
                write_signature(out, s)?;
                out.push('\n');
            }
        }
        writeln!(out, "end\n")?;
    }
    for c in &p.classes {
        write!(out, "class {}", c.name)?;
        out.push('(');
        write_params(out, &c.params)?;
        out.push(')');
        if !c.implements.is_empty() {
            let names: Vec<&str> = c.implements.iter().map(|n| &**n).collect();
            write!(out, "\nimplements {}", names.join(", "))?;
        }
        out.push_str("\nbegin\n");
        for a in &c.attrs {
            indent(out, 1);
            write_var_decl(out, a)?;
            out.push_str(";\n");
        }
        let mut current: Option<&Name> = None;
        for m in &c.methods {
            if m.cointerface.as_ref() != current {
                if let Some(co) = &m.cointerface {
                    writeln!(out, "  with {co}")?;
                }
                current = m.cointerface.as_ref();
            }
            out.push_str("\n  ");
            write_signature(out, &m.sig)?;
            out.push_str(" ==\n");
            for l in &m.locals {
                indent(out, 2);
                write_var_decl(out, l)?;
                out.push_str(";\n");
            }
            indent(out, 2);
            write_stmt(out, &m.body, 2)?;
            out.push('\n');
        }
        writeln!(out, "end\n")?;
    }
    Ok(())
}

fn write_params(out: &mut String, params: &[Param]) -> fmt::Result {
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{}: ", p.name)?;
        write_type(out, &p.ty)?;
    }
    Ok(())
}

fn write_signature(out: &mut String, s: &Signature) -> fmt::Result {
    write!(out, "op {}", s.name)?;
    if s.ins.is_empty() && s.outs.is_empty() {
        return Ok(());
    }
    out.push('(');
    if !s.ins.is_empty() {
        out.push_str("in ");
        write_params(out, &s.ins)?;
    }
    if !s.outs.is_empty() {
        if !s.ins.is_empty() {
            out.push(' ');
        }
        out.push_str("out ");
        write_params(out, &s.outs)?;
    }
    out.push(')');
    Ok(())
}

fn write_var_decl(out: &mut String, v: &VarDecl) -> fmt::Result {
    write!(out, "var {}: ", v.name)?;
    write_type(out, &v.ty)?;
    if let Some(e) = &v.init {
        out.push_str(" := ");
        write_expr(out, e)?;
    }
    Ok(())
}

pub fn write_type(out: &mut String, t: &Type) -> fmt::Result {
    match t {
        Type::Int => out.push_str("Int"),
        Type::Bool => out.push_str("Bool"),
        Type::String => out.push_str("String"),
        Type::Time => out.push_str("Time"),
        Type::Tag => out.push_str("Tag[ ]"),
        Type::List(t) => {
            out.push_str("List[");
            write_type(out, t)?;
            out.push(']');
        }
        Type::Set(t) => {
            out.push_str("Set[");
            write_type(out, t)?;
            out.push(']');
        }
        Type::Map(k, v) => {
            out.push_str("Map[");
            write_type(out, k)?;
            out.push(',');
            write_type(out, v)?;
            out.push(']');
        }
        Type::Tuple(items) => {
            out.push('[');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_type(out, it)?;
            }
            out.push(']');
        }
        Type::Named(n) => out.push_str(n),
    }
    Ok(())
}

fn write_stmt(out: &mut String, s: &Stmt, depth: usize) -> fmt::Result {
    match &s.kind {
        StmtKind::Seq(items) => {
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(";\n");
                    indent(out, depth);
                }
                let group = matches!(it.kind, StmtKind::Seq(_) | StmtKind::Choice(..));
                if group {
                    out.push('(');
                }
                write_stmt(out, it, depth)?;
                if group {
                    out.push(')');
                }
            }
        }
        StmtKind::Choice(a, b) => {
            let group = matches!(a.kind, StmtKind::Choice(..));
            if group {
                out.push('(');
            }
            write_stmt(out, a, depth)?;
            if group {
                out.push(')');
            }
            out.push('\n');
            indent(out, depth);
            out.push_str("[]\n");
            indent(out, depth);
            write_stmt(out, b, depth)?;
        }
        StmtKind::Assign(targets, values) => {
            out.push_str(&join_names(targets));
            out.push_str(" := ");
            write_exprs(out, values)?;
        }
        StmtKind::New {
            target,
            class,
            args,
        } => {
            write!(out, "{target} := new {class}(")?;
            write_exprs(out, args)?;
            out.push(')');
        }
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => {
            out.push_str("if ");
            write_expr(out, cond)?;
            out.push_str(" then\n");
            indent(out, depth + 1);
            write_stmt(out, then, depth + 1)?;
            if let Some(o) = otherwise {
                out.push('\n');
                indent(out, depth);
                out.push_str("else\n");
                indent(out, depth + 1);
                write_stmt(out, o, depth + 1)?;
            }
            out.push('\n');
            indent(out, depth);
            out.push_str("end");
        }
        StmtKind::While { cond, body } => {
            out.push_str("while ");
            write_expr(out, cond)?;
            out.push_str(" do\n");
            indent(out, depth + 1);
            write_stmt(out, body, depth + 1)?;
            out.push('\n');
            indent(out, depth);
            out.push_str("end");
        }
        StmtKind::Await(g) => {
            out.push_str("await ");
            write_guard(out, g)?;
        }
        StmtKind::AsyncCall {
            tag,
            callee,
            method,
            args,
        } => {
            if let Some(t) = tag {
                out.push_str(t);
            }
            out.push('!');
            write_callee(out, callee)?;
            write!(out, "{method}(")?;
            write_exprs(out, args)?;
            out.push(')');
        }
        StmtKind::Reply { tag, outs } => {
            write!(out, "{tag}?")?;
            if !outs.is_empty() {
                write!(out, "({})", join_names(outs))?;
            }
        }
        StmtKind::Skip => out.push_str("skip"),
        StmtKind::BlockingCall {
            callee,
            method,
            args,
            outs,
        } => write_sync_call(out, callee, method, args, outs)?,
        StmtKind::AwaitCall {
            callee,
            method,
            args,
            outs,
        } => {
            out.push_str("await ");
            write_sync_call(out, callee, method, args, outs)?;
        }
    }
    Ok(())
}

fn write_callee(out: &mut String, callee: &Option<Expr>) -> fmt::Result {
    if let Some(c) = callee {
        write_expr(out, c)?;
        out.push('.');
    }
    Ok(())
}

fn write_sync_call(
    out: &mut String,
    callee: &Option<Expr>,
    method: &Name,
    args: &[Expr],
    outs: &[Name],
) -> fmt::Result {
    write_callee(out, callee)?;
    write!(out, "{method}(")?;
    write_exprs(out, args)?;
    out.push(';');
    out.push_str(&join_names(outs));
    out.push(')');
    Ok(())
}

fn join_names(names: &[Name]) -> String {
    names.iter().map(|n| &**n).collect::<Vec<_>>().join(", ")
}

fn write_guard(out: &mut String, g: &Guard) -> fmt::Result {
    match g {
        Guard::Tag(t) => write!(out, "{t}?"),
        Guard::Bool(e) => {
            let group = matches!(e, Expr::Binary(BinOp::And | BinOp::Or, ..));
            if group {
                out.push('(');
            }
            write_expr(out, e)?;
            if group {
                out.push(')');
            }
            Ok(())
        }
        Guard::And(a, b) => {
            write_guard(out, a)?;
            out.push_str(" && ");
            write_guard(out, b)
        }
        Guard::Or(a, b) => {
            write_guard(out, a)?;
            out.push_str(" || ");
            write_guard(out, b)
        }
    }
}

fn write_exprs(out: &mut String, es: &[Expr]) -> fmt::Result {
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, e)?;
    }
    Ok(())
}

fn write_operand(out: &mut String, e: &Expr) -> fmt::Result {
    if matches!(e, Expr::Binary(..)) {
        out.push('(');
        write_expr(out, e)?;
        out.push(')');
        Ok(())
    } else {
        write_expr(out, e)
    }
}

pub fn write_expr(out: &mut String, e: &Expr) -> fmt::Result {
    match e {
        Expr::Int(i) => write!(out, "{i}"),
        Expr::Bool(b) => write!(out, "{b}"),
        Expr::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
            Ok(())
        }
        Expr::Null => write!(out, "null"),
        Expr::Now => write!(out, "now"),
        Expr::This => write!(out, "this"),
        Expr::Var(n) => write!(out, "{n}"),
        Expr::Unary(op, inner) => {
            out.push(match op {
                UnOp::Not => '~',
                UnOp::Neg => '-',
                UnOp::Len => '#',
            });
            write_operand(out, inner)
        }
        Expr::Binary(op, l, r) => {
            write_operand(out, l)?;
            write!(out, " {} ", op.symbol())?;
            write_operand(out, r)
        }
        Expr::Apply(f, args) => {
            write!(out, "{}(", f.name())?;
            write_exprs(out, args)?;
            out.push(')');
            Ok(())
        }
        Expr::List(items) if items.is_empty() => write!(out, "nil"),
        Expr::List(items) => {
            out.push('[');
            write_exprs(out, items)?;
            out.push(']');
            Ok(())
        }
        Expr::Set(items) => {
            out.push('{');
            write_exprs(out, items)?;
            out.push('}');
            Ok(())
        }
        Expr::Tuple(items) => {
            out.push('(');
            write_exprs(out, items)?;
            out.push(')');
            Ok(())
        }
    }
}
