//! Rewrites call sugar into core statements.
//!
//! * `o.m(e;x)`        becomes `$tN!o.m(e); $tN?(x)`
//! * `await o.m(e;x)`  becomes `$tN!o.m(e); await $tN?; $tN?(x)`
//! * `t!m(e)`          becomes `t!this.m(e)`
//!
//! Fresh tags are declared as method locals of type `Tag`.

use std::sync::Arc;

use crate::ast::*;
use crate::lexer::RESERVED_TAG_PREFIX;

pub fn desugar(program: &Program) -> Program {
    let mut out = program.clone();
    for class in &mut out.classes {
        for method in &mut class.methods {
            let mut fresh = Fresh {
                next: method
                    .locals
                    .iter()
                    .filter_map(|l| l.name.strip_prefix(RESERVED_TAG_PREFIX)?.parse::<u32>().ok())
                    .map(|n| n + 1)
                    .max()
                    .unwrap_or(0),
                introduced: Vec::new(),
            };
            method.body = rewrite(&method.body, &mut fresh);
            for (tag, span) in fresh.introduced {
                method.locals.push(VarDecl {
                    name: tag,
                    span,
                    ty: Type::Tag,
                    init: None,
                });
            }
        }
    }
    renumber(&mut out);
    out
}

struct Fresh {
    next: u32,
    introduced: Vec<(Name, Span)>,
}

impl Fresh {
    fn tag(&mut self, span: Span) -> Name {
        let t = name(&format!("{RESERVED_TAG_PREFIX}{}", self.next));
        self.next += 1;
        self.introduced.push((t.clone(), span));
        t
    }
}

fn callee_or_self(callee: &Option<Expr>) -> Option<Expr> {
    Some(callee.clone().unwrap_or(Expr::This))
}

fn node(span: Span, kind: StmtKind) -> Arc<Stmt> {
    Arc::new(Stmt::new(span, kind))
}

fn rewrite(stmt: &Arc<Stmt>, fresh: &mut Fresh) -> Arc<Stmt> {
    let span = stmt.span;
    let kind = match &stmt.kind {
        StmtKind::Seq(items) => {
            let mut flat = Vec::with_capacity(items.len());
            for it in items {
                let r = rewrite(it, fresh);
                match &r.kind {
                    StmtKind::Seq(inner) => flat.extend(inner.iter().cloned()),
                    _ => flat.push(r),
                }
            }
            StmtKind::Seq(flat)
        }
        StmtKind::Choice(a, b) => StmtKind::Choice(rewrite(a, fresh), rewrite(b, fresh)),
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => StmtKind::If {
            cond: cond.clone(),
            then: rewrite(then, fresh),
            otherwise: otherwise.as_ref().map(|o| rewrite(o, fresh)),
        },
        StmtKind::While { cond, body } => StmtKind::While {
            cond: cond.clone(),
            body: rewrite(body, fresh),
        },
        StmtKind::AsyncCall {
            tag,
            callee: None,
            method,
            args,
        } => StmtKind::AsyncCall {
            tag: tag.clone(),
            callee: Some(Expr::This),
            method: method.clone(),
            args: args.clone(),
        },
        StmtKind::BlockingCall {
            callee,
            method,
            args,
            outs,
        } => {
            let t = fresh.tag(span);
            StmtKind::Seq(vec![
                node(
                    span,
                    StmtKind::AsyncCall {
                        tag: Some(t.clone()),
                        callee: callee_or_self(callee),
                        method: method.clone(),
                        args: args.clone(),
                    },
                ),
                node(
                    span,
                    StmtKind::Reply {
                        tag: t,
                        outs: outs.clone(),
                    },
                ),
            ])
        }
        StmtKind::AwaitCall {
            callee,
            method,
            args,
            outs,
        } => {
            let t = fresh.tag(span);
            StmtKind::Seq(vec![
                node(
                    span,
                    StmtKind::AsyncCall {
                        tag: Some(t.clone()),
                        callee: callee_or_self(callee),
                        method: method.clone(),
                        args: args.clone(),
                    },
                ),
                node(span, StmtKind::Await(Guard::Tag(t.clone()))),
                node(
                    span,
                    StmtKind::Reply {
                        tag: t,
                        outs: outs.clone(),
                    },
                ),
            ])
        }
        _ => return stmt.clone(),
    };
    node(span, kind)
}

/// True when no sugar node kind remains anywhere in the program.
pub fn is_core(program: &Program) -> bool {
    let mut ok = true;
    for c in &program.classes {
        for m in &c.methods {
            walk_stmts(&m.body, &mut |s| ok &= !s.kind.is_sugar());
        }
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, SourceModel};

    fn body_of(src: &str) -> (Arc<Stmt>, Vec<VarDecl>) {
        let p = desugar(&parse(&SourceModel::inline(src)).unwrap());
        let m = &p.classes[0].methods[0];
        (m.body.clone(), m.locals.clone())
    }

    #[test]
    fn blocking_remote_call() {
        let (body, locals) = body_of("class C(nw: Any) begin op m == nw.register(1, [2,3];) end");
        match &body.kind {
            StmtKind::Seq(items) => {
                assert!(matches!(
                    &items[0].kind,
                    StmtKind::AsyncCall { tag: Some(t), callee: Some(Expr::Var(o)), method, .. }
                        if &**t == "$t0" && &**o == "nw" && &**method == "register"
                ));
                assert!(matches!(
                    &items[1].kind,
                    StmtKind::Reply { tag, outs } if &**tag == "$t0" && outs.is_empty()
                ));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(locals.len(), 1);
        assert_eq!(locals[0].ty, Type::Tag);
    }

    #[test]
    fn tagged_async_call_unchanged() {
        let src = "class C(network: Any) begin op m == var l: Tag[ ]; var q: List[Int]; \
                   l!network.broadcast(head(q)) end";
        let p = parse(&SourceModel::inline(src)).unwrap();
        let before = p.classes[0].methods[0].body.kind.clone();
        let (after, _) = body_of(src);
        assert_eq!(before, after.kind);
    }

    #[test]
    fn local_blocking_call_targets_self() {
        let p = desugar(&parse(&SourceModel::inline(
            "class C() begin op sense == skip op run == sense(;) end",
        ))
        .unwrap());
        match &p.classes[0].methods[1].body.kind {
            StmtKind::Seq(items) => assert!(matches!(
                &items[0].kind,
                StmtKind::AsyncCall { callee: Some(Expr::This), method, args, .. }
                    if &**method == "sense" && args.is_empty()
            )),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn await_call_expands_to_three_statements() {
        let (body, _) = body_of("class C(o: Any) begin op m == var x: Int; await o.get(;x) end");
        match &body.kind {
            StmtKind::Seq(items) => {
                assert_eq!(items.len(), 3);
                assert!(matches!(items[1].kind, StmtKind::Await(Guard::Tag(_))));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn idempotent_and_sugar_free() {
        let src = "class C(o: Any) begin op m == var x: Int; o.a(;); await o.b(1;x); \
                   !c(); x := 1 [] t!o.d() op c == skip end";
        let once = desugar(&parse(&SourceModel::inline(src)).unwrap());
        assert!(is_core(&once));
        assert_eq!(desugar(&once), once);
    }
}
