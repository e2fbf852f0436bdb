mod common;

use proptest::prelude::*;
use tcreol_core::ast::{walk_stmts, BinOp, Expr, Guard, StmtKind, UnOp};
use tcreol_core::desugar::{desugar, is_core};
use tcreol_core::parser::{parse_expr, parse_stmt};
use tcreol_core::pretty::{expr_to_string, program_to_string};
use tcreol_core::validate::{validate, Category};
use tcreol_core::{parse, SourceModel};

use common::{bundled_models, program};

#[test]
fn bundled_models_round_trip_through_the_printer() {
    for (name, src) in bundled_models() {
        let p = parse(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = program_to_string(&p);
        let again = parse(&SourceModel::inline(printed.clone())).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(again.without_spans(), p.without_spans(), "{name}");
        assert_eq!(program_to_string(&again), printed, "{name}: printing is not a fixpoint");
    }
}

#[test]
fn bundled_models_validate() {
    for (name, src) in bundled_models() {
        let p = parse(&src).unwrap();
        if let Err(d) = validate(&p) {
            panic!("{name}: {d:?}");
        }
    }
}

#[test]
fn desugaring_bundled_models_is_idempotent_and_sugar_free() {
    for (name, src) in bundled_models() {
        let once = desugar(&parse(&src).unwrap());
        assert!(is_core(&once), "{name}");
        assert_eq!(desugar(&once), once, "{name}");
        for c in &once.classes {
            for m in &c.methods {
                walk_stmts(&m.body, &mut |s| assert!(!s.kind.is_sugar(), "{name}: {s:?}"));
            }
        }
    }
}

#[test]
fn interface_with_cointerface_and_tuple_parameter() {
    let p = program(
        "interface Node begin with Network op receive(in data: [Int,Int]) end \
         interface Network begin end",
    );
    let node = p.interface("Node").unwrap();
    assert_eq!(node.groups.len(), 1);
    assert_eq!(node.groups[0].cointerface.as_deref(), Some("Network"));
    let sigs: Vec<_> = node.signatures().collect();
    assert_eq!(sigs.len(), 1);
    assert_eq!(&*sigs[0].name, "receive");
}

#[test]
fn await_on_time() {
    let s = parse_stmt("await now > t").unwrap();
    match s.kind {
        StmtKind::Await(Guard::Bool(Expr::Binary(BinOp::Gt, l, r))) => {
            assert_eq!(*l, Expr::Now);
            assert_eq!(*r, Expr::var("t"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_class() {
    let p = program("class C() begin end");
    let c = p.class("C").unwrap();
    assert!(c.attrs.is_empty() && c.methods.is_empty());
}

#[test]
fn blocking_calls_desugar_to_call_and_join() {
    let p = desugar(&program(
        "class C(nw: Any, n1: Any, n2: Any, n3: Any) begin \
         op run == nw.register(n1, [n2, n3];); sense(;) \
         op sense == skip end",
    ));
    let run = p.class("C").unwrap().method("run").unwrap();
    let StmtKind::Seq(items) = &run.body.kind else { panic!() };
    let kinds: Vec<_> = items.iter().map(|s| &s.kind).collect();
    assert_eq!(kinds.len(), 4);
    let (StmtKind::AsyncCall { tag: Some(t1), callee: Some(Expr::Var(nw)), method, .. }, StmtKind::Reply { tag: r1, outs }) =
        (kinds[0], kinds[1])
    else {
        panic!("{kinds:?}")
    };
    assert_eq!((&**nw, &**method), ("nw", "register"));
    assert_eq!(t1, r1);
    assert!(outs.is_empty());
    let (StmtKind::AsyncCall { tag: Some(t2), callee: Some(Expr::This), method, .. }, StmtKind::Reply { tag: r2, .. }) =
        (kinds[2], kinds[3])
    else {
        panic!("{kinds:?}")
    };
    assert_eq!(&**method, "sense");
    assert_eq!(t2, r2);
    assert_ne!(t1, t2);
}

#[test]
fn tagged_async_call_is_left_alone() {
    let src = "class C(network: Any) begin var sendqueue: List[[Int,Int]]; \
               op run == var l: Tag[ ]; l!network.broadcast(head(sendqueue)) end";
    let p = program(src);
    assert_eq!(desugar(&p).without_spans(), p.without_spans());
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse(&SourceModel::inline("class C()\nbegin\n  op m == x := \nend")).unwrap_err();
    assert_eq!(err.span.line, 4);
    assert!(err.to_string().contains("4:"), "{err}");
}

#[test]
fn validation_reports_unknown_methods_and_duplicates() {
    let unknown = program("class P() begin op m == skip end class Main() begin var p: P; op run == p.frob(;) end");
    let d = validate(&unknown).unwrap_err();
    assert!(d.iter().any(|d| d.category == Category::UnknownMethod), "{d:?}");
    assert!(d[0].to_string().contains("unknown method"), "{}", d[0]);

    let dup = program("class Main() begin var x: Int; var x: Int; end");
    let d = validate(&dup).unwrap_err();
    assert!(d.iter().any(|d| d.category == Category::DuplicateDeclaration), "{d:?}");
    assert!(d[0].to_string().contains("duplicate declaration"), "{}", d[0]);
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..1000).prop_map(Expr::Int),
        any::<bool>().prop_map(Expr::Bool),
        Just(Expr::Now),
        Just(Expr::Null),
        prop::sample::select(vec!["x", "y", "seqNo"]).prop_map(Expr::var),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let ops = prop::sample::select(vec![
            BinOp::Or,
            BinOp::And,
            BinOp::Eq,
            BinOp::Ne,
            BinOp::Lt,
            BinOp::Le,
            BinOp::Gt,
            BinOp::Ge,
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Div,
            BinOp::Mod,
            BinOp::Append,
        ]);
        prop_oneof![
            (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            inner.clone().prop_map(|e| Expr::Unary(UnOp::Not, Box::new(e))),
            inner.clone().prop_map(|e| Expr::Unary(UnOp::Len, Box::new(e))),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Expr::List),
            prop::collection::vec(inner, 2..4).prop_map(Expr::Tuple),
        ]
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse_identically(e in arb_expr()) {
        let text = expr_to_string(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }
}
