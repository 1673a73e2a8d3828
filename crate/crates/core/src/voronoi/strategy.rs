use std::collections::VecDeque;

use crate::field::{Elem, NumberField};
use crate::registry::Registry;

/// Order in which the worklist of unprocessed classes is consumed.
pub trait TraversalOrder: Send + Sync {
    fn name(&self) -> &'static str;
    fn pop(&self, queue: &mut VecDeque<usize>) -> Option<usize>;
}

struct Fifo;
struct Lifo;

impl TraversalOrder for Fifo {
    fn name(&self) -> &'static str {
        "fifo"
    }
    fn pop(&self, queue: &mut VecDeque<usize>) -> Option<usize> {
        queue.pop_front()
    }
}

impl TraversalOrder for Lifo {
    fn name(&self) -> &'static str {
        "lifo"
    }
    fn pop(&self, queue: &mut VecDeque<usize>) -> Option<usize> {
        queue.pop_back()
    }
}

pub fn traversal_orders() -> Registry<dyn TraversalOrder> {
    Registry::<dyn TraversalOrder>::new("traversal order").register("fifo", || Box::new(Fifo)).register("lifo", || Box::new(Lifo))
}

/// Group used to identify forms.
pub trait EquivalenceGroup: Send + Sync {
    fn name(&self) -> &'static str;
    /// Whether transformations must be O_F-linear (GL_m(O_F) acting through
    /// trace coordinates) or may be arbitrary in GL_N(ℤ).
    fn of_linear(&self) -> bool;
    /// Extra condition on the determinant over F.
    fn accepts(&self, f: &NumberField, det: &Elem) -> bool;
}

struct GlZ;
struct GlOf;
struct SlOf;

impl EquivalenceGroup for GlZ {
    fn name(&self) -> &'static str {
        "gl-z"
    }
    fn of_linear(&self) -> bool {
        false
    }
    fn accepts(&self, _: &NumberField, _: &Elem) -> bool {
        true
    }
}

impl EquivalenceGroup for GlOf {
    fn name(&self) -> &'static str {
        "gl-of"
    }
    fn of_linear(&self) -> bool {
        true
    }
    fn accepts(&self, _: &NumberField, _: &Elem) -> bool {
        true
    }
}

impl EquivalenceGroup for SlOf {
    fn name(&self) -> &'static str {
        "sl-of"
    }
    fn of_linear(&self) -> bool {
        true
    }
    fn accepts(&self, f: &NumberField, det: &Elem) -> bool {
        f.is_one(det)
    }
}

pub fn equivalence_groups() -> Registry<dyn EquivalenceGroup> {
    Registry::<dyn EquivalenceGroup>::new("equivalence group")
        .register("gl-z", || Box::new(GlZ))
        .register("gl-of", || Box::new(GlOf))
        .register("sl-of", || Box::new(SlOf))
}
