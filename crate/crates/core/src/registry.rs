//! Named strategy variants selected at runtime.

use crate::error::{Error, Result};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, fn() -> Box<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry { kind, entries: Vec::new() }
    }

    pub fn register(mut self, name: &'static str, ctor: fn() -> Box<T>) -> Self {
        assert!(self.entries.iter().all(|(n, _)| *n != name), "duplicate strategy {name}");
        self.entries.push((name, ctor));
        self
    }

    pub fn get(&self, name: &str) -> Result<Box<T>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, c)| c())
            .ok_or_else(|| Error::Invalid(format!("unknown {} `{name}` (known: {})", self.kind, self.names().join(", "))))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }
}
