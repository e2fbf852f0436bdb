//! Network behaviors when several broadcasts share a time slot.

use std::collections::BTreeMap;

/// A collision behavior is the one statement of the network's broadcast
/// method that governs use of the current time slot.
pub trait CollisionBehavior: Send + Sync {
    fn name(&self) -> &'static str;
    /// Statement placed before the slot is claimed, if any.
    fn slot_rule(&self) -> Option<&'static str>;
}

/// Every broadcast is delivered, however many share a slot.
pub struct NoInterference;

impl CollisionBehavior for NoInterference {
    fn name(&self) -> &'static str {
        "no-interference"
    }
    fn slot_rule(&self) -> Option<&'static str> {
        None
    }
}

/// A broadcast waits for a free slot: at most one completes per slot.
pub struct Resend;

impl CollisionBehavior for Resend {
    fn name(&self) -> &'static str {
        "resend"
    }
    fn slot_rule(&self) -> Option<&'static str> {
        Some("await now > lastTransmission;")
    }
}

/// A broadcast in an already used slot reaches nobody.
pub struct Drop;

impl CollisionBehavior for Drop {
    fn name(&self) -> &'static str {
        "drop"
    }
    fn slot_rule(&self) -> Option<&'static str> {
        Some("if lastTransmission = now then recs := nil end;")
    }
}

pub struct CollisionRegistry {
    entries: BTreeMap<&'static str, Box<dyn CollisionBehavior>>,
    order: Vec<&'static str>,
}

impl Default for CollisionRegistry {
    fn default() -> Self {
        let mut r = CollisionRegistry {
            entries: BTreeMap::new(),
            order: Vec::new(),
        };
        r.register(Box::new(NoInterference));
        r.register(Box::new(Resend));
        r.register(Box::new(Drop));
        r
    }
}

impl CollisionRegistry {
    pub fn register(&mut self, b: Box<dyn CollisionBehavior>) {
        let name = b.name();
        if self.entries.insert(name, b).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn CollisionBehavior> {
        self.entries.get(name).map(|b| &**b)
    }

    /// Registered behaviors in registration order.
    pub fn all(&self) -> impl Iterator<Item = &dyn CollisionBehavior> {
        self.order.iter().map(|n| &*self.entries[n])
    }
}
