//! Node layouts: who hears whose broadcasts.

use std::collections::BTreeMap;

/// Outgoing links per node, by the variable names used in the model's
/// main class (`sink`, `n1` .. `n4`).
pub type Links = BTreeMap<String, Vec<String>>;

pub trait Topology: Send + Sync {
    fn name(&self) -> &'static str;
    fn links(&self) -> Links;
}

fn links(pairs: &[(&str, &[&str])]) -> Links {
    pairs
        .iter()
        .map(|(from, to)| (from.to_string(), to.iter().map(|s| s.to_string()).collect()))
        .collect()
}

/// Every sensor reaches the sink directly.
pub struct Star;

impl Topology for Star {
    fn name(&self) -> &'static str {
        "star"
    }
    fn links(&self) -> Links {
        links(&[("n1", &["sink"]), ("n2", &["sink"]), ("n3", &["sink"]), ("n4", &["sink"])])
    }
}

/// A chain sink - n1 - n2 - n3 - n4. Neighbouring sensors hear each other;
/// only n1 reaches the sink.
pub struct Linear;

impl Topology for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }
    fn links(&self) -> Links {
        links(&[
            ("n1", &["sink", "n2"]),
            ("n2", &["n1", "n3"]),
            ("n3", &["n2", "n4"]),
            ("n4", &["n3"]),
        ])
    }
}

/// n1 and n2 reach the sink and hear each other; n3 and n4 reach the sink
/// only through n1 and n2, over one-way links.
pub struct Mixed;

impl Topology for Mixed {
    fn name(&self) -> &'static str {
        "mixed"
    }
    fn links(&self) -> Links {
        links(&[
            ("n1", &["sink", "n2"]),
            ("n2", &["sink", "n1"]),
            ("n3", &["n1", "n2"]),
            ("n4", &["n1", "n2"]),
        ])
    }
}

/// One-way chain n4 -> n3 -> n2 -> n1 -> sink.
pub struct LinearDirected;

impl Topology for LinearDirected {
    fn name(&self) -> &'static str {
        "linear-directed"
    }
    fn links(&self) -> Links {
        links(&[("n1", &["sink"]), ("n2", &["n1"]), ("n3", &["n2"]), ("n4", &["n3"])])
    }
}

/// One-way variant of [`Mixed`]: n3 and n4 send to n1 and n2 only.
pub struct MixedDirected;

impl Topology for MixedDirected {
    fn name(&self) -> &'static str {
        "mixed-directed"
    }
    fn links(&self) -> Links {
        links(&[
            ("n1", &["sink"]),
            ("n2", &["sink"]),
            ("n3", &["n1", "n2"]),
            ("n4", &["n1", "n2"]),
        ])
    }
}

pub struct TopologyRegistry {
    entries: BTreeMap<&'static str, Box<dyn Topology>>,
    order: Vec<&'static str>,
}

impl Default for TopologyRegistry {
    fn default() -> Self {
        let mut r = TopologyRegistry {
            entries: BTreeMap::new(),
            order: Vec::new(),
        };
        r.register(Box::new(Linear));
        r.register(Box::new(Mixed));
        r.register(Box::new(Star));
        r.register(Box::new(LinearDirected));
        r.register(Box::new(MixedDirected));
        r
    }
}

impl TopologyRegistry {
    pub fn register(&mut self, t: Box<dyn Topology>) {
        let name = t.name();
        if self.entries.insert(name, t).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Topology> {
        self.entries.get(name).map(|t| &**t)
    }

    pub fn all(&self) -> impl Iterator<Item = &dyn Topology> {
        self.order.iter().map(|n| &*self.entries[n])
    }
}
