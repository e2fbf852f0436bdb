//! The wireless sensor network case study: bundled models, collision
//! behaviors, topologies, sink metrics and the timing table harness.

pub mod collision;
pub mod model;
pub mod table;
pub mod topology;

use std::fmt;

use tcreol_core::desugar::desugar;
use tcreol_core::runtime::{init_configuration, Configuration, InitError};
use tcreol_core::{parse, ParseError, SourceModel, Value};
use thiserror::Error;

pub use collision::{CollisionBehavior, CollisionRegistry};
pub use topology::{Topology, TopologyRegistry};

/// Clock limit for the case study runs.
pub const LIMIT: u64 = 200;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Init(#[from] InitError),
    #[error("no sink object in the configuration")]
    NoSink,
}

pub fn build_model(collision: &dyn CollisionBehavior, topology: &dyn Topology) -> SourceModel {
    SourceModel::new(
        model::model_text(collision, topology),
        format!("{}-{}.tcreol", topology.name(), collision.name()),
    )
}

/// Parses, desugars and instantiates a model.
pub fn load(source: &SourceModel, limit: u64) -> Result<Configuration, ModelError> {
    let program = desugar(&parse(source)?);
    Ok(init_configuration(&program, limit)?)
}

/// What the sink has seen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct SinkMetrics {
    pub received: i64,
    pub last: Option<u64>,
}

impl fmt::Display for SinkMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.last {
            Some(t) => write!(f, "received={} last={t}", self.received),
            None => write!(f, "received={} last=--", self.received),
        }
    }
}

pub fn metrics(cfg: &Configuration) -> Result<SinkMetrics, ModelError> {
    let sink = cfg.find_object("SinkNode").ok_or(ModelError::NoSink)?;
    let received = match sink.attrs.get("noStored") {
        Some(Value::Int(n)) => *n,
        _ => 0,
    };
    let last = match sink.attrs.get("lastReceived") {
        Some(Value::Time(t)) if received > 0 => Some(*t),
        _ => None,
    };
    Ok(SinkMetrics { received, last })
}
