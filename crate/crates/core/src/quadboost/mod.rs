//! Descriptor-based insert, remove and contain with helping, continuous
//! find and decoupled compression.

mod moves;

use std::ptr;

use crossbeam_epoch::Guard;

use crate::geometry::Point;
use crate::node::{all_children_empty, create_subtree, in_tree, moved, Node, OpKind, Operation};
use crate::observer::Event;
use crate::path::TraversalPath;
use crate::reclaim::{arc_from_ref, pin};
use crate::tree::QuadTree;
use crate::variants::{Compression, RestartPolicy};
use crate::TreeError;

impl<V: Clone + Send + Sync + 'static> QuadTree<V> {
    /// Depth of an internal node below the root, from its region width.
    pub(crate) fn depth_of(&self, n: &Node<V>) -> usize {
        let w = n.internal_ref().region.w;
        (self.region.w / w).log2().round() as usize
    }

    pub(crate) fn emit_restart(&self, start: &Node<V>, from: &Node<V>) {
        if self.observer.is_some() {
            self.emit(Event::Restart {
                depth: self.depth_of(start),
                prev_depth: self.depth_of(from),
            });
        }
    }

    /// Descends from internal node `start`, pushing every internal node with
    /// the op read just before its child link. Returns the terminal and the
    /// op of its parent.
    pub(crate) fn find<'g>(
        &self,
        start: &'g Node<V>,
        key: Point,
        path: &mut TraversalPath<'g, V>,
        guard: &'g Guard,
    ) -> (&'g Node<V>, &'g Operation<V>) {
        let n = start.internal_ref();
        let op = n.load_op(guard);
        path.push(start, op);
        self.descend(n.child(n.region.route(key), guard), op, key, path, guard)
    }

    /// Like [`find`](Self::find) but starting from a node that may already be
    /// a terminal, whose parent op is `op`.
    pub(crate) fn descend<'g>(
        &self,
        mut l: &'g Node<V>,
        mut op: &'g Operation<V>,
        key: Point,
        path: &mut TraversalPath<'g, V>,
        guard: &'g Guard,
    ) -> (&'g Node<V>, &'g Operation<V>) {
        while let Node::Internal(n) = l {
            op = n.load_op(guard);
            path.push(l, op);
            l = n.child(n.region.route(key), guard);
        }
        (l, op)
    }

    /// Resumes a failed update whose parent `p` had op `p_op`.
    pub(crate) fn continue_find<'g>(
        &'g self,
        p_op: &'g Operation<V>,
        path: &mut TraversalPath<'g, V>,
        p: &'g Node<V>,
        key: Point,
        guard: &'g Guard,
    ) -> (&'g Node<V>, &'g Operation<V>) {
        let start: &'g Node<V> = match self.config.restart_policy() {
            RestartPolicy::Root => &self.root,
            RestartPolicy::OneParent if p_op.is_compress() => &self.root,
            RestartPolicy::OneParent => p,
            RestartPolicy::Continuous if !p_op.is_compress() => p,
            RestartPolicy::Continuous => {
                let mut start: &'g Node<V> = &self.root;
                while let Some(e) = path.pop() {
                    let op = e.node.internal_ref().load_op(guard);
                    if op.is_compress() {
                        self.help(op, guard);
                    } else {
                        start = e.node;
                        break;
                    }
                }
                start
            }
        };
        if self.is_root(start) {
            path.clear();
        }
        self.emit_restart(start, p);
        self.find(start, key, path, guard)
    }

    /// One CAS on `n`'s op slot from `old` to `new`.
    pub(crate) fn help_flag(&self, n: &Node<V>, old: &Operation<V>, new: &Operation<V>, guard: &Guard) -> bool {
        // SAFETY: `new` is either owned by the caller or was read from a slot
        // while pinned
        let new_arc = unsafe { arc_from_ref(new) };
        let ok = n.internal_ref().op.cas(old, &new_arc, guard, self.mode);
        if ok && self.observer.is_some() {
            self.emit(Event::Flag {
                node: n.addr(),
                from: old.kind(),
                to: new.kind(),
                desc: new.addr(),
                prev: old.addr(),
            });
        }
        ok
    }

    /// Swings whichever child link of `parent` holds `old` to `new`.
    pub(crate) fn help_replace(
        &self,
        parent: &Node<V>,
        old: *const Node<V>,
        new: std::sync::Arc<Node<V>>,
        kind: OpKind,
        desc: usize,
        guard: &Guard,
    ) -> bool {
        let pi = parent.internal_ref();
        for link in &pi.children {
            if ptr::eq(link.load(guard), old) {
                let ok = link.cas(old, new, guard, self.mode);
                if ok {
                    self.emit(Event::Replace {
                        parent: parent.addr(),
                        kind,
                        desc,
                    });
                }
                return ok;
            }
        }
        false
    }

    /// Completes a descriptor found on another operation's way.
    pub(crate) fn help(&self, op: &Operation<V>, guard: &Guard) {
        if op.is_clean() {
            return;
        }
        self.emit(Event::Help { kind: op.kind() });
        self.complete(op, guard);
    }

    /// Drives `op` to completion. Clean is a no-op.
    pub(crate) fn complete(&self, op: &Operation<V>, guard: &Guard) {
        match op {
            Operation::Clean => {}
            Operation::Substitute(s) => {
                self.help_replace(
                    &s.parent,
                    &*s.old_child,
                    s.new_node.clone(),
                    OpKind::Substitute,
                    op.addr(),
                    guard,
                );
                self.help_flag(&s.parent, op, &Operation::clean(), guard);
            }
            Operation::Compress(c) => {
                self.help_replace(&c.grandparent, c.parent.0, Node::empty(), OpKind::Compress, op.addr(), guard);
            }
            Operation::Move(_) => {
                self.help_move(op, guard);
            }
            Operation::Coupled(_) => {
                self.help_coupled(op, guard);
            }
        }
    }

    /// Walks up from `p`, unlinking every non-dummy internal node whose four
    /// children are empty. Gives up silently on any contention.
    pub(crate) fn compress<'g>(&self, path: &mut TraversalPath<'g, V>, mut p: &'g Node<V>, guard: &'g Guard) {
        loop {
            let pi = p.internal_ref();
            let p_op = pi.load_op(guard);
            if !p_op.is_clean() {
                return;
            }
            let Some(gp) = path.pop() else { return };
            let gp = gp.node;
            if self.is_root(gp) || pi.dummy || !all_children_empty(pi, guard) {
                return;
            }
            let op = Operation::compress(unsafe { arc_from_ref(gp) }, p);
            if !self.help_flag(p, p_op, &op, guard) {
                return;
            }
            self.complete(&op, guard);
            p = gp;
        }
    }

    /// Physical cleanup after a successful removal of a child of `p`.
    pub(crate) fn after_remove<'g>(&self, path: &mut TraversalPath<'g, V>, p: &'g Node<V>, guard: &'g Guard) {
        match self.config.compression {
            Compression::Recursive => self.compress(path, p, guard),
            Compression::OneLayer => {
                if let Some(gp) = path.pop() {
                    self.compress_one_layer(gp.node, p, guard);
                }
            }
            Compression::None | Compression::GrandparentCoupled => {}
        }
    }
}

impl<V: Clone + Send + Sync + 'static> QuadTree<V> {
    pub(crate) fn qb_contain(&self, key: Point) -> bool {
        let guard = pin();
        let l = self.terminal(key, &guard);
        in_tree(l, key) && !moved(l, &guard)
    }

    pub(crate) fn qb_insert(&self, key: Point, value: V) -> Result<bool, TreeError> {
        let guard = pin();
        let g = &guard;
        let leaf = Node::leaf(key, value);
        let mut path = self.new_path();
        let (mut l, mut p_op) = self.find(&self.root, key, &mut path, g);
        loop {
            if in_tree(l, key) && !moved(l, g) {
                return Ok(false);
            }
            let p = path.pop().expect("terminal has a parent").node;
            let pi = p.internal_ref();
            if p_op.is_clean() {
                if in_tree(l, key) {
                    // the key's leaf has been moved away but is still linked;
                    // its move has yet to swap it out of `p`
                    p_op = pi.load_op(g);
                } else {
                    let l_arc = unsafe { arc_from_ref(l) };
                    let new_node = create_subtree(&l_arc, &pi.region, pi.region.route(key), &leaf)?;
                    let op = Operation::substitute(unsafe { arc_from_ref(p) }, l_arc, new_node);
                    if self.help_flag(p, p_op, &op, g) {
                        self.complete(&op, g);
                        return Ok(true);
                    }
                    p_op = pi.load_op(g);
                }
            }
            self.help(p_op, g);
            (l, p_op) = self.continue_find(p_op, &mut path, p, key, g);
        }
    }

    pub(crate) fn qb_remove(&self, key: Point) -> bool {
        let guard = pin();
        let g = &guard;
        let empty = Node::empty();
        let mut path = self.new_path();
        let (mut l, mut p_op) = self.find(&self.root, key, &mut path, g);
        loop {
            if !in_tree(l, key) || moved(l, g) {
                return false;
            }
            let p = path.pop().expect("terminal has a parent").node;
            if p_op.is_clean() {
                let op = Operation::substitute(unsafe { arc_from_ref(p) }, unsafe { arc_from_ref(l) }, empty.clone());
                if self.help_flag(p, p_op, &op, g) {
                    self.complete(&op, g);
                    self.after_remove(&mut path, p, g);
                    return true;
                }
                p_op = p.internal_ref().load_op(g);
            }
            self.help(p_op, g);
            (l, p_op) = self.continue_find(p_op, &mut path, p, key, g);
        }
    }
}
