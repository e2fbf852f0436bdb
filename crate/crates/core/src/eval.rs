//! Expression and guard evaluation.
//!
//! Both functions are pure: they read the environment, the future table and
//! the clock, and never mutate any of them. `now` is the only clock-dependent
//! expression.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::ast::{BinOp, Builtin, Expr, Guard, UnOp};
use crate::value::{Env, FutId, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("undeclared variable `{0}`")]
    Unbound(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} of empty list")]
    EmptyList(&'static str),
    #[error("map lookup miss for key {0}")]
    MissingKey(String),
    #[error("type error: {0}")]
    Type(String),
}

/// Completion status of futures, as seen by guards.
pub trait FutureView {
    fn is_completed(&self, id: FutId) -> bool;
}

impl FutureView for HashMap<FutId, bool> {
    fn is_completed(&self, id: FutId) -> bool {
        self.get(&id).copied().unwrap_or(false)
    }
}

fn type_error(op: &str, l: &Value, r: &Value) -> EvalError {
    EvalError::Type(format!("`{op}` applied to {} and {}", l.kind(), r.kind()))
}

fn numeric(v: &Value) -> Option<i128> {
    match v {
        Value::Int(i) => Some(*i as i128),
        Value::Time(t) => Some(*t as i128),
        _ => None,
    }
}

fn clamp_time(t: i128) -> Value {
    Value::Time(t.clamp(0, u64::MAX as i128) as u64)
}

/// Structural equality, except that Time and Int compare by magnitude.
pub fn values_equal(l: &Value, r: &Value) -> bool {
    match (l, r) {
        (Value::Time(_), Value::Int(_)) | (Value::Int(_), Value::Time(_)) => numeric(l) == numeric(r),
        _ => l == r,
    }
}

pub fn eval(expr: &Expr, env: &Env<'_>, clock: u64) -> Result<Value, EvalError> {
    Ok(match expr {
        Expr::Int(i) => Value::Int(*i),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Str(s) => Value::Str(s.as_str().into()),
        Expr::Null => Value::Null,
        Expr::Now => Value::Time(clock),
        Expr::This => env.this.map(Value::Obj).unwrap_or(Value::Null),
        Expr::Var(n) => env
            .lookup(n)
            .cloned()
            .ok_or_else(|| EvalError::Unbound(n.to_string()))?,
        Expr::Unary(op, e) => unary(*op, eval(e, env, clock)?)?,
        Expr::Binary(op, l, r) => binary(*op, eval(l, env, clock)?, eval(r, env, clock)?)?,
        Expr::Apply(f, args) => {
            let args = args
                .iter()
                .map(|a| eval(a, env, clock))
                .collect::<Result<Vec<_>, _>>()?;
            apply_builtin(*f, args)?
        }
        Expr::List(items) => Value::List(
            items
                .iter()
                .map(|a| eval(a, env, clock))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Set(items) => Value::Set(
            items
                .iter()
                .map(|a| eval(a, env, clock))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Tuple(items) => Value::Tuple(
            items
                .iter()
                .map(|a| eval(a, env, clock))
                .collect::<Result<_, _>>()?,
        ),
    })
}

fn unary(op: UnOp, v: Value) -> Result<Value, EvalError> {
    match (op, &v) {
        (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        (UnOp::Neg, Value::Int(i)) => Ok(Value::Int(-i)),
        (UnOp::Len, Value::List(l)) => Ok(Value::Int(l.len() as i64)),
        (UnOp::Len, Value::Set(s)) => Ok(Value::Int(s.len() as i64)),
        (UnOp::Len, Value::Map(m)) => Ok(Value::Int(m.len() as i64)),
        (UnOp::Len, Value::Str(s)) => Ok(Value::Int(s.chars().count() as i64)),
        _ => Err(EvalError::Type(format!("`{op:?}` applied to {}", v.kind()))),
    }
}

fn compare(op: BinOp, l: &Value, r: &Value) -> Result<bool, EvalError> {
    let ord = match (numeric(l), numeric(r)) {
        (Some(a), Some(b)) => a.cmp(&b),
        _ => match (l, r) {
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            _ => return Err(type_error(op.symbol(), l, r)),
        },
    };
    Ok(match op {
        BinOp::Lt => ord.is_lt(),
        BinOp::Le => ord.is_le(),
        BinOp::Gt => ord.is_gt(),
        BinOp::Ge => ord.is_ge(),
        _ => unreachable!("not a comparison"),
    })
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value, EvalError> {
    use Value::*;
    Ok(match op {
        BinOp::And | BinOp::Or => match (&l, &r) {
            (Bool(a), Bool(b)) => Bool(if op == BinOp::And { *a && *b } else { *a || *b }),
            _ => return Err(type_error(op.symbol(), &l, &r)),
        },
        BinOp::Eq => Bool(values_equal(&l, &r)),
        BinOp::Ne => Bool(!values_equal(&l, &r)),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => Bool(compare(op, &l, &r)?),
        BinOp::In => Bool(match &r {
            List(items) => items.iter().any(|v| values_equal(v, &l)),
            Set(items) => items.contains(&l),
            Map(m) => m.contains_key(&l),
            _ => return Err(type_error("in", &l, &r)),
        }),
        BinOp::Add => match (&l, &r) {
            (Int(a), Int(b)) => Int(a.wrapping_add(*b)),
            (Time(t), Int(d)) | (Int(d), Time(t)) => clamp_time(*t as i128 + *d as i128),
            (Str(a), Str(b)) => Str(format!("{a}{b}").into()),
            _ => return Err(type_error("+", &l, &r)),
        },
        BinOp::Sub => match (&l, &r) {
            (Int(a), Int(b)) => Int(a.wrapping_sub(*b)),
            (Time(t), Int(d)) => clamp_time(*t as i128 - *d as i128),
            (Time(a), Time(b)) => Int((*a as i128 - *b as i128) as i64),
            _ => return Err(type_error("-", &l, &r)),
        },
        BinOp::Mul => match (&l, &r) {
            (Int(a), Int(b)) => Int(a.wrapping_mul(*b)),
            _ => return Err(type_error("*", &l, &r)),
        },
        BinOp::Div | BinOp::Mod => match (&l, &r) {
            (Int(_), Int(0)) => return Err(EvalError::DivisionByZero),
            (Int(a), Int(b)) if op == BinOp::Div => Int(a.wrapping_div(*b)),
            (Int(a), Int(b)) => Int(a.wrapping_rem(*b)),
            _ => return Err(type_error(op.symbol(), &l, &r)),
        },
        BinOp::Append => match l {
            List(mut items) => {
                items.push(r);
                List(items)
            }
            Set(mut items) => {
                items.insert(r);
                Set(items)
            }
            _ => return Err(type_error("|-", &l, &r)),
        },
    })
}

fn apply_builtin(f: Builtin, mut args: Vec<Value>) -> Result<Value, EvalError> {
    let bad = |args: &[Value]| {
        EvalError::Type(format!(
            "`{}` applied to ({})",
            f.name(),
            args.iter().map(Value::kind).collect::<Vec<_>>().join(", ")
        ))
    };
    if !f.arities().contains(&args.len()) {
        return Err(bad(&args));
    }
    Ok(match f {
        Builtin::Empty => Value::Map(BTreeMap::new()),
        Builtin::Head => match args.pop() {
            Some(Value::List(items)) => items
                .into_iter()
                .next()
                .ok_or(EvalError::EmptyList("head"))?,
            other => return Err(bad(other.as_slice())),
        },
        Builtin::Tail => match args.pop() {
            Some(Value::List(mut items)) => {
                if items.is_empty() {
                    return Err(EvalError::EmptyList("tail"));
                }
                items.remove(0);
                Value::List(items)
            }
            other => return Err(bad(other.as_slice())),
        },
        Builtin::IsEmpty => match &args[0] {
            Value::List(items) => Value::Bool(items.is_empty()),
            Value::Set(items) => Value::Bool(items.is_empty()),
            Value::Map(m) => Value::Bool(m.is_empty()),
            _ => return Err(bad(&args)),
        },
        Builtin::Insert => {
            let mut it = args.into_iter();
            match (it.next(), it.next(), it.next()) {
                (Some(Value::Map(mut m)), Some(k), Some(v)) => {
                    m.insert(k, v);
                    Value::Map(m)
                }
                (Some(Value::Set(mut s)), Some(x), None) => {
                    s.insert(x);
                    Value::Set(s)
                }
                (Some(Value::List(mut l)), Some(x), None) => {
                    l.insert(0, x);
                    Value::List(l)
                }
                (a, b, c) => return Err(bad(&[a, b, c].into_iter().flatten().collect::<Vec<_>>())),
            }
        }
        Builtin::Get => match (&args[0], &args[1]) {
            (Value::Map(m), k) => m
                .get(k)
                .cloned()
                .ok_or_else(|| EvalError::MissingKey(k.to_string()))?,
            _ => return Err(bad(&args)),
        },
        Builtin::Remove => {
            let key = args.pop().unwrap_or(Value::Null);
            match args.pop() {
                Some(Value::Map(mut m)) => {
                    m.remove(&key);
                    Value::Map(m)
                }
                Some(Value::Set(mut s)) => {
                    s.remove(&key);
                    Value::Set(s)
                }
                other => {
                    let mut shown: Vec<Value> = other.into_iter().collect();
                    shown.push(key);
                    return Err(bad(&shown));
                }
            }
        }
    })
}

/// Evaluates a guard. Guards are total: a tag that is unbound or not yet
/// bound to a future reads as false, and an expression that cannot be
/// evaluated reads as false as well.
pub fn eval_guard(guard: &Guard, env: &Env<'_>, futures: &dyn FutureView, clock: u64) -> bool {
    match guard {
        Guard::Bool(e) => matches!(eval(e, env, clock), Ok(Value::Bool(true))),
        Guard::Tag(t) => match env.lookup(t) {
            Some(Value::Fut(id)) => futures.is_completed(*id),
            _ => false,
        },
        Guard::And(a, b) => {
            let a = eval_guard(a, env, futures, clock);
            let b = eval_guard(b, env, futures, clock);
            a && b
        }
        Guard::Or(a, b) => {
            let a = eval_guard(a, env, futures, clock);
            let b = eval_guard(b, env, futures, clock);
            a || b
        }
    }
}

/// Like [`eval_guard`], but surfaces evaluation faults of boolean parts.
pub fn try_eval_guard(
    guard: &Guard,
    env: &Env<'_>,
    futures: &dyn FutureView,
    clock: u64,
) -> Result<bool, EvalError> {
    match guard {
        Guard::Bool(e) => match eval(e, env, clock)? {
            Value::Bool(b) => Ok(b),
            other => Err(EvalError::Type(format!("guard evaluated to {}", other.kind()))),
        },
        Guard::Tag(_) => Ok(eval_guard(guard, env, futures, clock)),
        Guard::And(a, b) => {
            let a = try_eval_guard(a, env, futures, clock)?;
            Ok(try_eval_guard(b, env, futures, clock)? && a)
        }
        Guard::Or(a, b) => {
            let a = try_eval_guard(a, env, futures, clock)?;
            Ok(try_eval_guard(b, env, futures, clock)? || a)
        }
    }
}
