//! The single-CAS baseline tree: one CAS on a child link per update, no
//! descriptors, no helping, no structural cleanup.

use crossbeam_epoch::Guard;

use crate::geometry::{Point, Quadrant};
use crate::node::{create_subtree, in_tree, Node};
use crate::observer::Event;
use crate::node::OpKind;
use crate::reclaim::{arc_from_ref, pin};
use crate::tree::QuadTree;
use crate::TreeError;

impl<V: Clone + Send + Sync + 'static> QuadTree<V> {
    /// Routes `key` to its terminal, returning it with its parent and the
    /// quadrant of the parent that holds it.
    fn qc_find<'g>(&'g self, key: Point, guard: &'g Guard) -> (&'g Node<V>, &'g Node<V>, Quadrant) {
        let mut p: &'g Node<V> = &self.root;
        loop {
            let n = p.internal_ref();
            let q = n.region.route(key);
            let l = n.child(q, guard);
            if l.is_internal() {
                p = l;
            } else {
                return (l, p, q);
            }
        }
    }

    fn qc_replace(&self, p: &Node<V>, q: Quadrant, l: &Node<V>, new: std::sync::Arc<Node<V>>, guard: &Guard) -> bool {
        let ok = p.internal_ref().children[q.index()].cas(l, new, guard, self.mode);
        if ok {
            self.emit(Event::Replace {
                parent: p.addr(),
                kind: OpKind::Clean,
                desc: 0,
            });
        }
        ok
    }

    pub(crate) fn qc_contain(&self, key: Point) -> bool {
        let guard = pin();
        in_tree(self.terminal(key, &guard), key)
    }

    pub(crate) fn qc_insert(&self, key: Point, value: V) -> Result<bool, TreeError> {
        let guard = pin();
        let leaf = Node::leaf(key, value);
        loop {
            let (l, p, q) = self.qc_find(key, &guard);
            if in_tree(l, key) {
                return Ok(false);
            }
            let region = p.internal_ref().region;
            let new = create_subtree(&unsafe { arc_from_ref(l) }, &region, q, &leaf)?;
            if self.qc_replace(p, q, l, new, &guard) {
                return Ok(true);
            }
        }
    }

    pub(crate) fn qc_remove(&self, key: Point) -> bool {
        let guard = pin();
        loop {
            let (l, p, q) = self.qc_find(key, &guard);
            if !in_tree(l, key) {
                return false;
            }
            if self.qc_replace(p, q, l, Node::empty(), &guard) {
                return true;
            }
        }
    }
}
