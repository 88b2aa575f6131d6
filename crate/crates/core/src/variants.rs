//! The variant matrix and the pieces only the ablation variants use:
//! one-layer compression and the grandparent-coupled removal of `qb-f`.

use std::fmt;
use std::ptr;
use std::str::FromStr;
use std::sync::atomic::Ordering;

use crossbeam_epoch::Guard;

use crate::geometry::Point;
use crate::node::{all_children_empty, in_tree, moved, Coupled, Node, OpKind, Operation};
use crate::path::TraversalPath;
use crate::reclaim::{arc_from_ref, pin};
use crate::tree::QuadTree;

/// Which algorithm a [`QuadTree`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Single-CAS baseline: no descriptors, no compression, no move.
    Qc,
    /// Full path recording, continuous find, recursive compression.
    QbS,
    /// Parent-only recording with the one-parent restart rule.
    QbO,
    /// Flag-only ablation with grandparent-coupled removal.
    QbF,
    /// `qb-f` with decoupled one-layer compression.
    QbD,
}

/// How empty internal nodes are cleaned up after removals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compression {
    None,
    GrandparentCoupled,
    OneLayer,
    Recursive,
}

/// Static configuration of a variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariantConfig {
    pub variant: Variant,
    pub record_full_path: bool,
    pub continuous_find: bool,
    pub compression: Compression,
}

/// Where a failed update resumes its search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RestartPolicy {
    /// From the deepest recorded ancestor not under compression.
    Continuous,
    /// From the parent, or the root if the parent is being compressed.
    OneParent,
    /// Always from the root.
    Root,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Qc, Variant::QbS, Variant::QbO, Variant::QbF, Variant::QbD];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Qc => "qc",
            Variant::QbS => "qb-s",
            Variant::QbO => "qb-o",
            Variant::QbF => "qb-f",
            Variant::QbD => "qb-d",
        }
    }

    pub fn supports_move(self) -> bool {
        self != Variant::Qc
    }

    pub fn config(self) -> VariantConfig {
        let (record_full_path, continuous_find, compression) = match self {
            Variant::Qc => (false, false, Compression::None),
            Variant::QbF => (false, false, Compression::GrandparentCoupled),
            Variant::QbD => (false, false, Compression::OneLayer),
            Variant::QbO => (false, true, Compression::OneLayer),
            Variant::QbS => (true, true, Compression::Recursive),
        };
        VariantConfig {
            variant: self,
            record_full_path,
            continuous_find,
            compression,
        }
    }
}

impl VariantConfig {
    pub(crate) fn restart_policy(&self) -> RestartPolicy {
        match (self.record_full_path, self.continuous_find) {
            (true, _) => RestartPolicy::Continuous,
            (false, true) => RestartPolicy::OneParent,
            (false, false) => RestartPolicy::Root,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected qc, qb-s, qb-o, qb-f or qb-d)"))
    }
}

impl<V: Clone + Send + Sync + 'static> QuadTree<V> {
    /// Single compression attempt of `p` under `gp`, no upward recursion.
    pub(crate) fn compress_one_layer(&self, gp: &Node<V>, p: &Node<V>, guard: &Guard) {
        let pi = p.internal_ref();
        let p_op = pi.load_op(guard);
        if !p_op.is_clean() || self.is_root(gp) || pi.dummy || !all_children_empty(pi, guard) {
            return;
        }
        let op = Operation::compress(unsafe { arc_from_ref(gp) }, p);
        if self.help_flag(p, p_op, &op, guard) {
            self.complete(&op, guard);
        }
    }

    /// Removal that flags the grandparent and then the parent before
    /// unlinking. A parent left without other keys is unlinked together with
    /// the leaf. Every failure restarts from the root.
    pub(crate) fn coupled_remove(&self, key: Point) -> bool {
        let guard = pin();
        let g = &guard;
        let mut path = TraversalPath::bounded(2);
        let (mut l, mut p_op) = self.find(&self.root, key, &mut path, g);
        loop {
            if !in_tree(l, key) || moved(l, g) {
                return false;
            }
            let p = path.pop().expect("terminal has a parent").node;
            let gpe = path.pop().expect("terminal sits below the skeleton");
            let pi = p.internal_ref();
            if pi.dummy {
                // skeleton parents are never unlinked, so the grandparent
                // (the root) stays out of it
                if p_op.is_clean() {
                    let op = Operation::substitute(unsafe { arc_from_ref(p) }, unsafe { arc_from_ref(l) }, Node::empty());
                    if self.help_flag(p, p_op, &op, g) {
                        self.complete(&op, g);
                        return true;
                    }
                    p_op = pi.load_op(g);
                }
                self.help(p_op, g);
            } else if p_op.is_clean() && gpe.op.is_clean() {
                let gp = gpe.node;
                let lonely = pi.children.iter().all(|c| {
                    let n = c.load(g);
                    ptr::eq(n, l) || n.is_empty()
                });
                let unlink = lonely.then(|| Operation::compress(unsafe { arc_from_ref(gp) }, p));
                let op = Operation::coupled(Coupled {
                    grandparent: unsafe { arc_from_ref(gp) },
                    parent: unsafe { arc_from_ref(p) },
                    leaf: unsafe { arc_from_ref(l) },
                    old_parent_op: unsafe { arc_from_ref(p_op) },
                    unlink,
                    all_flag: Default::default(),
                });
                if self.help_flag(gp, gpe.op, &op, g) {
                    if self.help_coupled(&op, g) {
                        return true;
                    }
                } else {
                    self.help(gp.internal_ref().load_op(g), g);
                }
                self.help(pi.load_op(g), g);
            } else {
                self.help(gpe.op, g);
                self.help(p_op, g);
            }
            self.emit_restart(&self.root, p);
            path.clear();
            (l, p_op) = self.find(&self.root, key, &mut path, g);
        }
    }

    /// Completes (or abandons) a coupled removal whose grandparent flag is in
    /// place. Returns whether both flags took effect.
    pub(crate) fn help_coupled(&self, op: &Operation<V>, guard: &Guard) -> bool {
        let Operation::Coupled(k) = op else { unreachable!("help_coupled on a non-coupled descriptor") };
        let marker: &Operation<V> = k.unlink.as_deref().unwrap_or(op);
        self.help_flag(&k.parent, &k.old_parent_op, marker, guard);
        let do_cas = ptr::eq(k.parent.internal_ref().load_op(guard), marker);
        if do_cas {
            k.all_flag.store(true, Ordering::SeqCst);
            match &k.unlink {
                Some(c) => {
                    self.complete(c, guard);
                }
                None => {
                    self.help_replace(&k.parent, &*k.leaf, Node::empty(), OpKind::Coupled, op.addr(), guard);
                    self.help_flag(&k.parent, op, &Operation::clean(), guard);
                }
            }
        }
        self.help_flag(&k.grandparent, op, &Operation::clean(), guard);
        k.all_flag.load(Ordering::SeqCst)
    }

    /// A fresh path of the length this variant records.
    pub(crate) fn new_path<'g>(&self) -> TraversalPath<'g, V> {
        if self.config.record_full_path {
            TraversalPath::full()
        } else {
            TraversalPath::bounded(2)
        }
    }
}
