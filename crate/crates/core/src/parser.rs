//! Recursive-descent parser for `.tcreol` model files.
//!
//! Precedence of statement composition: `;` binds tighter than `[]`, so
//! `a; b [] c; d` is a choice between two sequences. Parentheses group a
//! statement where a different nesting is needed.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::*;
use crate::lexer::{lex, Tok, Token};

/// Model text plus where it came from.
#[derive(Clone, Debug)]
pub struct SourceModel {
    pub text: String,
    pub origin: String,
}

impl SourceModel {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceModel {
            text: text.into(),
            origin: origin.into(),
        }
    }

    pub fn inline(text: impl Into<String>) -> Self {
        SourceModel::new(text, "<inline>")
    }

    pub fn from_file(path: &std::path::Path) -> std::io::Result<Self> {
        Ok(SourceModel::new(
            std::fs::read_to_string(path)?,
            path.display().to_string(),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    /// Tokens that would have been accepted at `span`.
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

pub fn parse(source: &SourceModel) -> Result<Program, ParseError> {
    let tokens = lex(&source.text)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut program = p.program()?;
    renumber(&mut program);
    Ok(program)
}

/// Parses a single statement; used by tests and tooling.
pub fn parse_stmt(text: &str) -> Result<Stmt, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let s = p.stmt()?;
    p.expect_eof()?;
    Ok(Arc::try_unwrap(s).unwrap_or_else(|a| (*a).clone()))
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn kw(k: &'static str) -> Tok {
    Tok::Kw(k)
}

fn sym(s: &'static str) -> Tok {
    Tok::Sym(s)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            span: self.span(),
            message: format!("unexpected {}", self.peek()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<Token, ParseError> {
        if self.at(&t) {
            Ok(self.advance())
        } else {
            Err(self.error(&[&t.to_string()]))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at(&Tok::Eof) {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn ident(&mut self) -> Result<(Name, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.advance().span;
                Ok((name(&s), span))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    // ---------------------------------------------------------------- decls

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut interfaces = Vec::new();
        let mut classes = Vec::new();
        loop {
            match self.peek() {
                Tok::Kw("interface") => interfaces.push(self.interface()?),
                Tok::Kw("class") => classes.push(self.class()?),
                Tok::Eof => break,
                _ => return Err(self.error(&["`interface`", "`class`", "end of input"])),
            }
        }
        let main = Program::default_main(&classes);
        Ok(Program {
            interfaces,
            classes,
            main,
        })
    }

    fn reject_inheritance(&self) -> Result<(), ParseError> {
        if self.at(&kw("inherits")) {
            return Err(ParseError::new(
                self.span(),
                "inheritance is not supported by this interpreter",
            ));
        }
        Ok(())
    }

    fn interface(&mut self) -> Result<InterfaceDecl, ParseError> {
        let span = self.expect(kw("interface"))?.span;
        let (iname, _) = self.ident()?;
        self.reject_inheritance()?;
        self.expect(kw("begin"))?;
        let mut groups: Vec<SignatureGroup> = Vec::new();
        loop {
            match self.peek() {
                Tok::Kw("with") => {
                    self.advance();
                    let (co, _) = self.ident()?;
                    groups.push(SignatureGroup {
                        cointerface: Some(co),
                        signatures: Vec::new(),
                    });
                }
                Tok::Kw("op") => {
                    let sig = self.signature()?;
                    if groups.is_empty() {
                        groups.push(SignatureGroup {
                            cointerface: None,
                            signatures: Vec::new(),
                        });
                    }
                    groups.last_mut().unwrap().signatures.push(sig);
                }
                Tok::Kw("end") => {
                    self.advance();
                    break;
                }
                _ => return Err(self.error(&["`with`", "`op`", "`end`"])),
            }
        }
        Ok(InterfaceDecl {
            name: iname,
            span,
            groups,
        })
    }

    fn class(&mut self) -> Result<ClassDecl, ParseError> {
        let span = self.expect(kw("class"))?.span;
        let (cname, _) = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&sym("(")) {
            if !self.at(&sym(")")) {
                params = self.params()?;
            }
            self.expect(sym(")"))?;
        }
        self.reject_inheritance()?;
        let mut implements = Vec::new();
        if self.eat(&kw("implements")) {
            implements.push(self.ident()?.0);
            while self.eat(&sym(",")) {
                implements.push(self.ident()?.0);
            }
        }
        self.reject_inheritance()?;
        self.expect(kw("begin"))?;
        let mut attrs = Vec::new();
        while self.at(&kw("var")) {
            attrs.extend(self.var_decls()?);
            self.eat(&sym(";"));
        }
        let mut methods = Vec::new();
        let mut cointerface = None;
        loop {
            match self.peek() {
                Tok::Kw("with") => {
                    self.advance();
                    cointerface = Some(self.ident()?.0);
                }
                Tok::Kw("op") => methods.push(self.method(cointerface.clone())?),
                Tok::Kw("end") => {
                    self.advance();
                    break;
                }
                _ => return Err(self.error(&["`with`", "`op`", "`end`"])),
            }
        }
        Ok(ClassDecl {
            name: cname,
            span,
            params,
            implements,
            attrs,
            methods,
        })
    }

    /// `x: T, y: T` (also `x, y: T`).
    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        let mut out = Vec::new();
        loop {
            let mut names = vec![self.ident()?.0];
            while self.eat(&sym(",")) {
                names.push(self.ident()?.0);
            }
            self.expect(sym(":"))?;
            let ty = self.ty()?;
            for n in names {
                out.push(Param {
                    name: n,
                    ty: ty.clone(),
                });
            }
            if !self.eat(&sym(",")) {
                break;
            }
            if !matches!(self.peek(), Tok::Ident(_)) {
                return Err(self.error(&["identifier"]));
            }
        }
        Ok(out)
    }

    fn signature(&mut self) -> Result<Signature, ParseError> {
        self.expect(kw("op"))?;
        let (mname, span) = self.ident()?;
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        if self.eat(&sym("(")) {
            if self.eat(&kw("in")) {
                ins = self.params()?;
            }
            if self.eat(&kw("out")) {
                outs = self.params()?;
            }
            self.expect(sym(")"))?;
        }
        Ok(Signature {
            name: mname,
            span,
            ins,
            outs,
        })
    }

    fn method(&mut self, cointerface: Option<Name>) -> Result<MethodDecl, ParseError> {
        let sig = self.signature()?;
        let span = self.expect(sym("=="))?.span;
        let mut locals = Vec::new();
        while self.at(&kw("var")) {
            locals.extend(self.var_decls()?);
            if !self.eat(&sym(";")) && !self.at_body_end() {
                return Err(self.error(&["`;`"]));
            }
        }
        let body = if self.at_body_end() {
            Arc::new(Stmt::new(span, StmtKind::Skip))
        } else {
            self.stmt()?
        };
        Ok(MethodDecl {
            sig,
            cointerface,
            locals,
            body,
        })
    }

    fn at_body_end(&self) -> bool {
        matches!(self.peek(), Tok::Kw("op") | Tok::Kw("with") | Tok::Kw("end") | Tok::Eof)
    }

    /// `var x: T [:= e]` or `var x, y: T`.
    fn var_decls(&mut self) -> Result<Vec<VarDecl>, ParseError> {
        self.expect(kw("var"))?;
        let mut names = vec![self.ident()?];
        while self.eat(&sym(",")) {
            names.push(self.ident()?);
        }
        self.expect(sym(":"))?;
        let ty = self.ty()?;
        let init = if self.eat(&sym(":=")) {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(names
            .into_iter()
            .map(|(n, span)| VarDecl {
                name: n,
                span,
                ty: ty.clone(),
                init: init.clone(),
            })
            .collect())
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        if self.eat(&sym("[")) {
            let mut items = vec![self.ty()?];
            while self.eat(&sym(",")) {
                items.push(self.ty()?);
            }
            self.expect(sym("]"))?;
            return Ok(Type::Tuple(items));
        }
        let (n, _) = self.ident()?;
        let ty = match &*n {
            "Int" => Type::Int,
            "Bool" => Type::Bool,
            "String" => Type::String,
            "Time" => Type::Time,
            "Tag" => {
                // `Tag[ ]` and `Tag[]` both name the tag type.
                if !self.eat(&sym("[]")) && self.at(&sym("[")) && self.peek_at(1) == &sym("]") {
                    self.advance();
                    self.advance();
                }
                Type::Tag
            }
            "List" | "Set" => {
                self.expect(sym("["))?;
                let inner = Box::new(self.ty()?);
                self.expect(sym("]"))?;
                if &*n == "List" {
                    Type::List(inner)
                } else {
                    Type::Set(inner)
                }
            }
            "Map" => {
                self.expect(sym("["))?;
                let k = self.ty()?;
                self.expect(sym(","))?;
                let v = self.ty()?;
                self.expect(sym("]"))?;
                Type::Map(Box::new(k), Box::new(v))
            }
            _ => Type::Named(n),
        };
        Ok(ty)
    }

    // ----------------------------------------------------------- statements

    fn stmt(&mut self) -> Result<Arc<Stmt>, ParseError> {
        let span = self.span();
        let first = self.seq()?;
        if self.eat(&sym("[]")) {
            let rest = self.stmt()?;
            return Ok(Arc::new(Stmt::new(span, StmtKind::Choice(first, rest))));
        }
        Ok(first)
    }

    fn seq(&mut self) -> Result<Arc<Stmt>, ParseError> {
        let span = self.span();
        let mut items = vec![self.atom()?];
        while self.eat(&sym(";")) {
            if self.at_stmt_end() {
                break;
            }
            items.push(self.atom()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Arc::new(Stmt::new(span, StmtKind::Seq(items)))
        })
    }

    fn at_stmt_end(&self) -> bool {
        self.at_body_end()
            || matches!(
                self.peek(),
                Tok::Kw("else") | Tok::Sym("[]") | Tok::Sym(")")
            )
    }

    fn atom(&mut self) -> Result<Arc<Stmt>, ParseError> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Sym("(") => {
                self.advance();
                let s = self.stmt()?;
                self.expect(sym(")"))?;
                return Ok(s);
            }
            Tok::Kw("skip") => {
                self.advance();
                StmtKind::Skip
            }
            Tok::Kw("if") => {
                self.advance();
                let cond = self.expr()?;
                self.expect(kw("then"))?;
                let then = self.stmt()?;
                let otherwise = if self.eat(&kw("else")) {
                    Some(self.stmt()?)
                } else {
                    None
                };
                self.expect(kw("end"))?;
                StmtKind::If {
                    cond,
                    then,
                    otherwise,
                }
            }
            Tok::Kw("while") => {
                self.advance();
                let cond = self.expr()?;
                self.expect(kw("do"))?;
                let body = self.stmt()?;
                self.expect(kw("end"))?;
                StmtKind::While { cond, body }
            }
            Tok::Kw("await") => {
                self.advance();
                if self.at_call_sugar() {
                    let (callee, method, args, outs) = self.sync_call()?;
                    StmtKind::AwaitCall {
                        callee,
                        method,
                        args,
                        outs,
                    }
                } else {
                    StmtKind::Await(self.guard()?)
                }
            }
            Tok::Sym("!") => {
                self.advance();
                self.async_call(None)?
            }
            Tok::Ident(id) => match self.peek_at(1).clone() {
                Tok::Sym("!") => {
                    self.advance();
                    self.advance();
                    self.async_call(Some(name(&id)))?
                }
                Tok::Sym("?") => {
                    self.advance();
                    self.advance();
                    let mut outs = Vec::new();
                    if self.eat(&sym("(")) {
                        if !self.at(&sym(")")) {
                            outs = self.ident_list()?;
                        }
                        self.expect(sym(")"))?;
                    }
                    StmtKind::Reply {
                        tag: name(&id),
                        outs,
                    }
                }
                Tok::Sym(":=") | Tok::Sym(",") => self.assignment()?,
                Tok::Sym("(") | Tok::Sym(".") => {
                    let (callee, method, args, outs) = self.sync_call()?;
                    StmtKind::BlockingCall {
                        callee,
                        method,
                        args,
                        outs,
                    }
                }
                _ => {
                    self.advance();
                    return Err(self.error(&["`:=`", "`!`", "`?`", "`(`", "`.`"]));
                }
            },
            Tok::Kw("this") if self.peek_at(1) == &sym(".") => {
                let (callee, method, args, outs) = self.sync_call()?;
                StmtKind::BlockingCall {
                    callee,
                    method,
                    args,
                    outs,
                }
            }
            _ => {
                return Err(self.error(&[
                    "statement",
                    "`await`",
                    "`if`",
                    "`while`",
                    "`skip`",
                    "`!`",
                    "identifier",
                ]))
            }
        };
        Ok(Arc::new(Stmt::new(span, kind)))
    }

    fn ident_list(&mut self) -> Result<Vec<Name>, ParseError> {
        let mut out = vec![self.ident()?.0];
        while self.eat(&sym(",")) {
            out.push(self.ident()?.0);
        }
        Ok(out)
    }

    fn assignment(&mut self) -> Result<StmtKind, ParseError> {
        let targets = self.ident_list()?;
        self.expect(sym(":="))?;
        if self.eat(&kw("new")) {
            if targets.len() != 1 {
                return Err(ParseError::new(self.span(), "`new` assigns exactly one variable"));
            }
            let (class, _) = self.ident()?;
            let mut args = Vec::new();
            if self.eat(&sym("(")) {
                if !self.at(&sym(")")) {
                    args = self.expr_list()?;
                }
                self.expect(sym(")"))?;
            }
            return Ok(StmtKind::New {
                target: targets.into_iter().next().unwrap(),
                class,
                args,
            });
        }
        let values = self.expr_list()?;
        if values.len() != targets.len() {
            return Err(ParseError::new(
                self.span(),
                format!(
                    "assignment has {} targets but {} values",
                    targets.len(),
                    values.len()
                ),
            ));
        }
        Ok(StmtKind::Assign(targets, values))
    }

    /// Looks ahead for `[o.]m(... ; ...)` after `await`.
    fn at_call_sugar(&self) -> bool {
        let mut k = 0;
        match self.peek_at(0) {
            Tok::Ident(_) | Tok::Kw("this") => {}
            _ => return false,
        }
        if self.peek_at(1) == &sym(".") {
            if !matches!(self.peek_at(2), Tok::Ident(_)) {
                return false;
            }
            k = 2;
        }
        if self.peek_at(k + 1) != &sym("(") {
            return false;
        }
        let mut depth = 0i32;
        let mut i = k + 1;
        loop {
            match self.peek_at(i) {
                Tok::Sym("(") | Tok::Sym("[") | Tok::Sym("{") => depth += 1,
                Tok::Sym(")") | Tok::Sym("]") | Tok::Sym("}") => {
                    depth -= 1;
                    if depth == 0 {
                        return false;
                    }
                }
                Tok::Sym(";") if depth == 1 => return true,
                Tok::Eof => return false,
                _ => {}
            }
            i += 1;
        }
    }

    fn callee_and_method(&mut self) -> Result<(Option<Expr>, Name), ParseError> {
        if self.eat(&kw("this")) {
            self.expect(sym("."))?;
            return Ok((Some(Expr::This), self.ident()?.0));
        }
        let (first, _) = self.ident()?;
        if self.eat(&sym(".")) {
            let (m, _) = self.ident()?;
            Ok((Some(Expr::Var(first)), m))
        } else {
            Ok((None, first))
        }
    }

    fn async_call(&mut self, tag: Option<Name>) -> Result<StmtKind, ParseError> {
        let (callee, method) = self.callee_and_method()?;
        self.expect(sym("("))?;
        let args = if self.at(&sym(")")) {
            Vec::new()
        } else {
            self.expr_list()?
        };
        self.expect(sym(")"))?;
        Ok(StmtKind::AsyncCall {
            tag,
            callee,
            method,
            args,
        })
    }

    #[allow(clippy::type_complexity)]
    fn sync_call(&mut self) -> Result<(Option<Expr>, Name, Vec<Expr>, Vec<Name>), ParseError> {
        let (callee, method) = self.callee_and_method()?;
        self.expect(sym("("))?;
        let args = if self.at(&sym(";")) {
            Vec::new()
        } else {
            self.expr_list()?
        };
        if !self.eat(&sym(";")) {
            return Err(ParseError {
                span: self.span(),
                message: "synchronous calls separate inputs and outputs with `;`".into(),
                expected: vec!["`;`".into()],
            });
        }
        let outs = if self.at(&sym(")")) {
            Vec::new()
        } else {
            self.ident_list()?
        };
        self.expect(sym(")"))?;
        Ok((callee, method, args, outs))
    }

    // --------------------------------------------------------------- guards

    fn guard(&mut self) -> Result<Guard, ParseError> {
        let mut g = self.guard_and()?;
        while self.eat(&sym("||")) {
            g = Guard::Or(Box::new(g), Box::new(self.guard_and()?));
        }
        Ok(g)
    }

    fn guard_and(&mut self) -> Result<Guard, ParseError> {
        let mut g = self.guard_atom()?;
        while self.eat(&sym("&&")) {
            g = Guard::And(Box::new(g), Box::new(self.guard_atom()?));
        }
        Ok(g)
    }

    fn guard_atom(&mut self) -> Result<Guard, ParseError> {
        if let Tok::Ident(id) = self.peek().clone() {
            if self.peek_at(1) == &sym("?") {
                self.advance();
                self.advance();
                return Ok(Guard::Tag(name(&id)));
            }
        }
        Ok(Guard::Bool(self.comparison()?))
    }

    // ---------------------------------------------------------- expressions

    fn expr_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = vec![self.expr()?];
        while self.eat(&sym(",")) {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.conjunction()?;
        while self.eat(&sym("||")) {
            e = Expr::binary(BinOp::Or, e, self.conjunction()?);
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.comparison()?;
        while self.eat(&sym("&&")) {
            e = Expr::binary(BinOp::And, e, self.comparison()?);
        }
        Ok(e)
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let e = self.additive()?;
        let op = match self.peek() {
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("/=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Kw("in") => BinOp::In,
            _ => return Ok(e),
        };
        self.advance();
        Ok(Expr::binary(op, e, self.additive()?))
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                Tok::Sym("|-") => BinOp::Append,
                _ => return Ok(e),
            };
            self.advance();
            e = Expr::binary(op, e, self.multiplicative()?);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                Tok::Sym("%") => BinOp::Mod,
                _ => return Ok(e),
            };
            self.advance();
            e = Expr::binary(op, e, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let op = match self.peek() {
            Tok::Sym("~") => UnOp::Not,
            Tok::Sym("-") => UnOp::Neg,
            Tok::Sym("#") => UnOp::Len,
            _ => return self.primary(),
        };
        self.advance();
        Ok(Expr::Unary(op, Box::new(self.unary()?)))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        let e = match tok {
            Tok::Int(i) => {
                self.advance();
                Expr::Int(i)
            }
            Tok::Str(s) => {
                self.advance();
                Expr::Str(s)
            }
            Tok::Kw("true") => {
                self.advance();
                Expr::Bool(true)
            }
            Tok::Kw("false") => {
                self.advance();
                Expr::Bool(false)
            }
            Tok::Kw("null") => {
                self.advance();
                Expr::Null
            }
            Tok::Kw("nil") | Tok::Sym("[]") => {
                self.advance();
                Expr::List(Vec::new())
            }
            Tok::Kw("now") => {
                self.advance();
                Expr::Now
            }
            Tok::Kw("this") => {
                self.advance();
                Expr::This
            }
            Tok::Ident(id) => {
                let span = self.advance().span;
                if self.at(&sym("(")) {
                    let f = Builtin::from_name(&id).ok_or_else(|| {
                        ParseError::new(span, format!("unknown function `{id}`"))
                    })?;
                    self.advance();
                    let args = if self.at(&sym(")")) {
                        Vec::new()
                    } else {
                        self.expr_list()?
                    };
                    self.expect(sym(")"))?;
                    Expr::Apply(f, args)
                } else {
                    Expr::Var(name(&id))
                }
            }
            Tok::Sym("(") => {
                self.advance();
                let first = self.expr()?;
                if self.eat(&sym(",")) {
                    let mut items = vec![first];
                    items.extend(self.expr_list()?);
                    self.expect(sym(")"))?;
                    Expr::Tuple(items)
                } else {
                    self.expect(sym(")"))?;
                    first
                }
            }
            Tok::Sym("[") => {
                self.advance();
                let items = if self.at(&sym("]")) {
                    Vec::new()
                } else {
                    self.expr_list()?
                };
                self.expect(sym("]"))?;
                Expr::List(items)
            }
            Tok::Sym("{") => {
                self.advance();
                let items = if self.at(&sym("}")) {
                    Vec::new()
                } else {
                    self.expr_list()?
                };
                self.expect(sym("}"))?;
                Expr::Set(items)
            }
            _ => return Err(self.error(&["expression"])),
        };
        Ok(e)
    }
}
