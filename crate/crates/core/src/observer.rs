//! Instrumentation hooks.
//!
//! A tree built with an observer reports every successful flag and replace,
//! help call and restart. Tests use this to log state transitions, count
//! retries, force preemption at interesting points, or park a thread right
//! after it has published a descriptor. Without an observer the hooks cost a
//! single branch.

use crate::node::OpKind;

/// A point in an operation where something observable happened.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    /// A CAS on an op slot succeeded. `node` and `desc` are addresses, stable
    /// only while the objects are alive.
    Flag {
        node: usize,
        from: OpKind,
        to: OpKind,
        desc: usize,
        /// The descriptor that was replaced.
        prev: usize,
    },
    /// A CAS on a child link succeeded on behalf of descriptor `desc`
    /// (`desc` is 0 for the descriptor-free `qc` tree).
    Replace { parent: usize, kind: OpKind, desc: usize },
    /// A move published itself on the leaf it removes.
    MoveOpSet { desc: usize },
    /// A helper is about to complete someone else's (or its own) descriptor.
    Help { kind: OpKind },
    /// An update could not commit and is searching again. `depth` is the
    /// number of path entries kept (0 means the search restarts at the root),
    /// `prev_depth` the depth of the terminal's parent before the restart.
    Restart { depth: usize, prev_depth: usize },
}

/// Receives [`Event`]s from the thread that caused them.
pub trait Observer: Send + Sync {
    fn event(&self, event: Event);
}

impl<F> Observer for F
where
    F: Fn(Event) + Send + Sync,
{
    fn event(&self, event: Event) {
        self(event)
    }
}
