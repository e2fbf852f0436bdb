//! Runtime values and variable bindings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ast::{Name, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FutId(pub u32);

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Display for FutId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// A runtime value. Time is a count of clock ticks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Time(u64),
    Str(Name),
    List(Vec<Value>),
    Set(BTreeSet<Value>),
    Map(BTreeMap<Value, Value>),
    Tuple(Vec<Value>),
    Obj(ObjId),
    Fut(FutId),
}

impl Value {
    /// Initial value of a variable declared without an initializer.
    pub fn default_for(ty: &Type) -> Value {
        match ty {
            Type::Int => Value::Int(0),
            Type::Bool => Value::Bool(false),
            Type::String => Value::Str(Name::from("")),
            Type::Time => Value::Time(0),
            Type::Tag | Type::Named(_) => Value::Null,
            Type::List(_) => Value::List(Vec::new()),
            Type::Set(_) => Value::Set(BTreeSet::new()),
            Type::Map(..) => Value::Map(BTreeMap::new()),
            Type::Tuple(items) => Value::Tuple(items.iter().map(Value::default_for).collect()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "Bool",
            Value::Int(_) => "Int",
            Value::Time(_) => "Time",
            Value::Str(_) => "String",
            Value::List(_) => "List",
            Value::Set(_) => "Set",
            Value::Map(_) => "Map",
            Value::Tuple(_) => "Tuple",
            Value::Obj(_) => "Object",
            Value::Fut(_) => "Future",
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Visits every future reference nested in this value.
    pub fn for_each_future(&self, f: &mut dyn FnMut(FutId)) {
        match self {
            Value::Fut(id) => f(*id),
            Value::List(items) | Value::Tuple(items) => items.iter().for_each(|v| v.for_each_future(f)),
            Value::Set(items) => items.iter().for_each(|v| v.for_each_future(f)),
            Value::Map(m) => m.iter().for_each(|(k, v)| {
                k.for_each_future(f);
                v.for_each_future(f);
            }),
            _ => {}
        }
    }

    /// Visits every object reference nested in this value.
    pub fn for_each_object(&self, f: &mut dyn FnMut(ObjId)) {
        match self {
            Value::Obj(id) => f(*id),
            Value::List(items) | Value::Tuple(items) => items.iter().for_each(|v| v.for_each_object(f)),
            Value::Set(items) => items.iter().for_each(|v| v.for_each_object(f)),
            Value::Map(m) => m.iter().for_each(|(k, v)| {
                k.for_each_object(f);
                v.for_each_object(f);
            }),
            _ => {}
        }
    }
}

fn write_seq<'a>(
    f: &mut fmt::Formatter<'_>,
    open: &str,
    items: impl Iterator<Item = &'a Value>,
    close: &str,
) -> fmt::Result {
    f.write_str(open)?;
    for (i, v) in items.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    f.write_str(close)
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Time(t) => write!(f, "time({t})"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::List(items) => write_seq(f, "[", items.iter(), "]"),
            Value::Set(items) => write_seq(f, "{", items.iter(), "}"),
            Value::Map(m) => {
                f.write_str("map{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}->{v}")?;
                }
                f.write_str("}")
            }
            Value::Tuple(items) => write_seq(f, "(", items.iter(), ")"),
            Value::Obj(id) => write!(f, "{id}"),
            Value::Fut(id) => write!(f, "{id}"),
        }
    }
}

/// One layer of name-to-value bindings (attributes, or process locals).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bindings(BTreeMap<Name, Value>);

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn insert(&mut self, name: Name, value: Value) {
        self.0.insert(name, value);
    }

    /// Overwrites an existing binding; returns false when `name` is unbound.
    pub fn set(&mut self, name: &str, value: Value) -> bool {
        match self.0.get_mut(name) {
            Some(slot) => {
                *slot = value;
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<const N: usize> From<[(&str, Value); N]> for Bindings {
    fn from(items: [(&str, Value); N]) -> Self {
        Bindings(items.into_iter().map(|(k, v)| (Name::from(k), v)).collect())
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// Evaluation environment: process locals layered over object attributes.
#[derive(Clone, Copy, Debug)]
pub struct Env<'a> {
    pub this: Option<ObjId>,
    pub attrs: &'a Bindings,
    pub locals: &'a Bindings,
}

impl<'a> Env<'a> {
    pub fn new(this: Option<ObjId>, attrs: &'a Bindings, locals: &'a Bindings) -> Self {
        Env {
            this,
            attrs,
            locals,
        }
    }

    /// Innermost binding wins.
    pub fn lookup(&self, name: &str) -> Option<&'a Value> {
        self.locals.get(name).or_else(|| self.attrs.get(name))
    }
}
