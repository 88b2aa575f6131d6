//! The public tree handle.

use std::fmt;
use std::marker::PhantomData;
use std::ptr;
use std::sync::Arc;

use crossbeam_epoch::Guard;

use crate::checker::DictOp;
use crate::geometry::{Point, Quadrant, Region};
use crate::node::{self, in_tree, moved, Node};
use crate::observer::{Event, Observer};
use crate::reclaim::{pin, ReclaimMode};
use crate::variants::{Variant, VariantConfig};
use crate::TreeError;

/// A concurrent region quadtree mapping 2D keys to values.
///
/// Every operation takes `&self` and may be called from any number of
/// threads at once. Keys must lie in `[0, range)^2`.
pub struct QuadTree<V> {
    pub(crate) root: Arc<Node<V>>,
    pub(crate) variant: Variant,
    pub(crate) config: VariantConfig,
    pub(crate) range: f64,
    pub(crate) region: Region,
    pub(crate) mode: ReclaimMode,
    pub(crate) observer: Option<Arc<dyn Observer>>,
    /// Addresses of the root's children as built, for dummy-layer checks.
    pub(crate) dummies: [usize; 4],
}

/// Node tally of a quiescent tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NodeCounts {
    pub internal: usize,
    pub leaf: usize,
    pub empty: usize,
}

impl NodeCounts {
    pub fn total(&self) -> usize {
        self.internal + self.leaf + self.empty
    }
}

/// Configures a [`QuadTree`] before construction.
pub struct Builder<V> {
    variant: Variant,
    range: f64,
    mode: ReclaimMode,
    observer: Option<Arc<dyn Observer>>,
    _value: PhantomData<fn() -> V>,
}

impl<V> Builder<V> {
    /// Starts configuring a tree of the given variant over `[0, range)^2`.
    /// The reclamation mode defaults to `QUADBOOST_RECLAIM` from the
    /// environment.
    pub fn new(variant: Variant, range: f64) -> Self {
        Builder {
            variant,
            range,
            mode: ReclaimMode::from_env(),
            observer: None,
            _value: PhantomData,
        }
    }

    pub fn reclaim(mut self, mode: ReclaimMode) -> Self {
        self.mode = mode;
        self
    }

    /// Installs an instrumentation hook.
    pub fn observer(mut self, observer: Arc<dyn Observer>) -> Self {
        self.observer = Some(observer);
        self
    }

    pub fn build(self) -> Result<QuadTree<V>, TreeError> {
        let root = node::new_skeleton::<V>(self.range)?;
        let region = root.internal_ref().region;
        let dummies = {
            let g = pin();
            let r = root.internal_ref();
            Quadrant::ALL.map(|q| r.child(q, &g).addr())
        };
        Ok(QuadTree {
            root,
            variant: self.variant,
            config: self.variant.config(),
            range: self.range,
            region,
            mode: self.mode,
            observer: self.observer,
            dummies,
        })
    }
}

impl<V> QuadTree<V> {
    /// Same as [`Builder::new`].
    pub fn builder(variant: Variant, range: f64) -> Builder<V> {
        Builder::new(variant, range)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn config(&self) -> VariantConfig {
        self.config
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn reclaim_mode(&self) -> ReclaimMode {
        self.mode
    }

    #[inline]
    pub(crate) fn check_key(&self, key: Point) -> Result<(), TreeError> {
        if self.region.contains(key) {
            Ok(())
        } else {
            Err(TreeError::OutOfRange { key, range: self.range })
        }
    }

    #[inline]
    pub(crate) fn emit(&self, event: Event) {
        if let Some(o) = &self.observer {
            o.event(event);
        }
    }

    /// Walks to the terminal for `key` without recording anything.
    pub(crate) fn terminal<'g>(&self, key: Point, guard: &'g Guard) -> &'g Node<V> {
        let mut l: &'g Node<V> = {
            let r = self.root.internal_ref();
            r.child(r.region.route(key), guard)
        };
        while let Node::Internal(n) = l {
            l = n.child(n.region.route(key), guard);
        }
        l
    }

    /// Tallies reachable nodes. Meaningful only when no update is running.
    pub fn count_nodes(&self) -> NodeCounts {
        let g = pin();
        let mut counts = NodeCounts::default();
        let mut stack: Vec<&Node<V>> = vec![&self.root];
        while let Some(n) = stack.pop() {
            match n {
                Node::Internal(i) => {
                    counts.internal += 1;
                    stack.extend(i.children.iter().map(|c| c.load(&g)));
                }
                Node::Leaf(_) => counts.leaf += 1,
                Node::Empty => counts.empty += 1,
            }
        }
        counts
    }

    /// Canonical preorder rendering of the tree shape: `I[...]` for internal
    /// nodes (children in nw, ne, sw, se order), `L(x,y)` for leaves, `E` for
    /// empty terminals. Quiescent use only.
    pub fn shape(&self) -> String {
        fn walk<V>(n: &Node<V>, g: &Guard, out: &mut String) {
            use std::fmt::Write;
            match n {
                Node::Internal(i) => {
                    let _ = write!(out, "I{}[", i.region);
                    for q in Quadrant::ALL {
                        walk(i.child(q, g), g, out);
                    }
                    out.push(']');
                }
                Node::Leaf(l) => {
                    let _ = write!(out, "L({},{})", l.key.x, l.key.y);
                }
                Node::Empty => out.push('E'),
            }
        }
        let g = pin();
        let mut out = String::new();
        walk(&self.root, &g, &mut out);
        out
    }

    /// Keys currently present, in traversal order. Quiescent use only.
    pub fn keys(&self) -> Vec<Point> {
        let g = pin();
        let mut out = Vec::new();
        let mut stack: Vec<&Node<V>> = vec![&self.root];
        while let Some(n) = stack.pop() {
            match n {
                Node::Internal(i) => stack.extend(i.children.iter().rev().map(|c| c.load(&g))),
                Node::Leaf(l) if !moved(n, &g) => out.push(l.key),
                _ => {}
            }
        }
        out
    }
}

impl<V: Clone + Send + Sync + 'static> QuadTree<V> {
    /// A tree with default settings.
    pub fn new(variant: Variant, range: f64) -> Result<Self, TreeError> {
        Self::builder(variant, range).build()
    }

    /// Adds `key` with `value`. Returns `false` if the key was already present.
    pub fn insert(&self, key: Point, value: V) -> Result<bool, TreeError> {
        self.check_key(key)?;
        match self.variant {
            Variant::Qc => self.qc_insert(key, value),
            _ => self.qb_insert(key, value),
        }
    }

    /// Removes `key`. Returns `false` if it was absent.
    pub fn remove(&self, key: Point) -> Result<bool, TreeError> {
        self.check_key(key)?;
        match self.variant {
            Variant::Qc => Ok(self.qc_remove(key)),
            Variant::QbF => Ok(self.coupled_remove(key)),
            _ => Ok(self.qb_remove(key)),
        }
    }

    pub fn contains(&self, key: Point) -> Result<bool, TreeError> {
        self.check_key(key)?;
        Ok(match self.variant {
            Variant::Qc => self.qc_contain(key),
            _ => self.qb_contain(key),
        })
    }

    /// The value stored under `key`, if present.
    pub fn get(&self, key: Point) -> Result<Option<V>, TreeError> {
        self.check_key(key)?;
        let g = pin();
        let l = self.terminal(key, &g);
        if in_tree(l, key) && !moved(l, &g) {
            Ok(l.as_leaf().map(|leaf| leaf.value.clone()))
        } else {
            Ok(None)
        }
    }

    /// Atomically replaces `old` by `new`, carrying the value across.
    /// Returns `false` if `old` is absent or `new` is already present.
    /// Not available on [`Variant::Qc`].
    pub fn move_key(&self, old: Point, new: Point) -> Result<bool, TreeError> {
        self.check_key(old)?;
        self.check_key(new)?;
        if self.variant == Variant::Qc {
            return Err(TreeError::Unsupported {
                variant: self.variant,
                op: "move",
            });
        }
        self.qb_move(old, new)
    }

    /// Runs one dictionary operation, inserting `V::default()` for inserts.
    pub fn apply(&self, op: &DictOp) -> Result<bool, TreeError>
    where
        V: Default,
    {
        match *op {
            DictOp::Insert(k) => self.insert(k, V::default()),
            DictOp::Remove(k) => self.remove(k),
            DictOp::Contains(k) => self.contains(k),
            DictOp::Move { old, new } => self.move_key(old, new),
        }
    }
}

impl<V> fmt::Debug for QuadTree<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadTree")
            .field("variant", &self.variant)
            .field("range", &self.range)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl<V> QuadTree<V> {
    #[inline]
    pub(crate) fn is_root(&self, n: &Node<V>) -> bool {
        ptr::eq(n, &*self.root)
    }
}
