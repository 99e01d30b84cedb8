//! Name-keyed registries of interchangeable strategies.
//!
//! Inference engines and monotonicity checkers are both selected at runtime
//! by name (from the CLI or a config). Each family is a trait object behind
//! [`Strategy`], collected in a [`Registry`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Something that can be looked up by a stable name.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &str;

    fn summary(&self) -> &str {
        ""
    }
}

pub struct Registry<T: ?Sized + Strategy> {
    entries: BTreeMap<String, Arc<T>>,
}

impl<T: ?Sized + Strategy> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: BTreeMap::new() }
    }
}

impl<T: ?Sized + Strategy> Clone for Registry<T> {
    fn clone(&self) -> Self {
        Registry { entries: self.entries.clone() }
    }
}

impl<T: ?Sized + Strategy> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

impl<T: ?Sized + Strategy> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `item` under its own name, replacing any previous entry.
    pub fn register(&mut self, item: Arc<T>) -> Option<Arc<T>> {
        self.entries.insert(item.name().to_string(), item)
    }

    pub fn get(&self, name: &str) -> Option<Arc<T>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<T>> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
