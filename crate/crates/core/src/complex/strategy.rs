use std::cmp::Ordering;

use super::group::Cusp;
use crate::registry::Registry;

/// Global order on cusps. It fixes vertex order inside cells, the reference
/// frame used for orientations and the apex of pulling triangulations.
pub trait VertexOrder: Send + Sync {
    fn name(&self) -> &'static str;
    fn cmp(&self, a: &Cusp, b: &Cusp) -> Ordering;
}

struct Lex;
struct Reverse;

impl VertexOrder for Lex {
    fn name(&self) -> &'static str {
        "lex"
    }
    fn cmp(&self, a: &Cusp, b: &Cusp) -> Ordering {
        a.key.cmp(&b.key)
    }
}

impl VertexOrder for Reverse {
    fn name(&self) -> &'static str {
        "reverse"
    }
    fn cmp(&self, a: &Cusp, b: &Cusp) -> Ordering {
        b.key.cmp(&a.key)
    }
}

pub fn vertex_orders() -> Registry<dyn VertexOrder> {
    Registry::<dyn VertexOrder>::new("vertex order").register("lex", || Box::new(Lex)).register("reverse", || Box::new(Reverse))
}
