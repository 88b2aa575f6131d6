//! The LCA-based atomic move.
//!
//! Both keys are searched along their shared prefix once; the deepest
//! internal node on that prefix is the LCA. The two terminal parents are
//! flagged in spatial order with one `Move` descriptor, then the insert-side
//! and remove-side terminals are swapped (in one CAS when they are the same
//! node). A failed flag restarts each side locally, falling back to the LCA,
//! and only past the LCA to a full search.

use std::cmp::Ordering as CmpOrdering;
use std::ptr;
use std::sync::atomic::Ordering;

use crossbeam_epoch::Guard;

use crate::geometry::{spatial_order, Point};
use crate::node::{create_subtree, in_tree, moved, Move, Node, OpKind, Operation};
use crate::observer::Event;
use crate::path::TraversalPath;
use crate::reclaim::{arc_from_ref, pin};
use crate::tree::QuadTree;
use crate::variants::{Compression, RestartPolicy};
use crate::TreeError;

/// Everything one move invocation has learned about the two searches.
struct MoveState<'g, V> {
    r_path: TraversalPath<'g, V>,
    i_path: TraversalPath<'g, V>,
    rl: &'g Node<V>,
    il: &'g Node<V>,
    r_op: &'g Operation<V>,
    i_op: &'g Operation<V>,
    rp: &'g Node<V>,
    ip: &'g Node<V>,
    lca: &'g Node<V>,
    /// Index of `lca` in `r_path` (full paths only).
    lca_depth: usize,
}

#[derive(Default)]
struct Fails {
    r: bool,
    i: bool,
    c: bool,
}

impl<V: Clone + Send + Sync + 'static> QuadTree<V> {
    pub(crate) fn qb_move(&self, old: Point, new: Point) -> Result<bool, TreeError> {
        let guard = pin();
        let g = &guard;
        let root: &Node<V> = &self.root;
        let root_op = root.internal_ref().load_op(g);
        let mut st = MoveState {
            r_path: self.new_path(),
            i_path: self.new_path(),
            rl: root,
            il: root,
            r_op: root_op,
            i_op: root_op,
            rp: root,
            ip: root,
            lca: root,
            lca_depth: 0,
        };
        if !self.find_common(root, old, new, &mut st, g) {
            return Ok(false);
        }
        st.ip = st.i_path.pop().expect("insert path holds the lca").node;
        st.rp = st.r_path.pop().expect("remove path holds the lca").node;
        let mut f = Fails::default();
        loop {
            if !st.r_op.is_clean() {
                f.r = true;
            }
            if !st.i_op.is_clean() {
                f.i = true;
            }
            if !ptr::eq(st.i_op, st.r_op) && ptr::eq(st.ip, st.rp) {
                f.c = true;
            }
            if !(f.r || f.i || f.c) {
                if in_tree(st.il, new) {
                    // `new` sits in a leaf whose own move has not yet swapped
                    // it out; wait for that move through ip's op
                    st.i_op = st.ip.internal_ref().load_op(g);
                    f.i = true;
                } else if self.try_move(&mut st, &mut f, new, g)? {
                    return Ok(true);
                }
            }
            if !self.continue_find_common(&mut st, &mut f, old, new, g) {
                return Ok(false);
            }
            f = Fails::default();
        }
    }

    /// Builds and publishes the descriptor for the current state. Returns
    /// `Ok(true)` once the move has taken effect; otherwise records which
    /// side failed.
    fn try_move<'g>(&self, st: &mut MoveState<'g, V>, f: &mut Fails, new: Point, g: &'g Guard) -> Result<bool, TreeError> {
        let (ip, rp) = (st.ip, st.rp);
        let ipi = ip.internal_ref();
        let value = st.rl.as_leaf().expect("remove terminal is a leaf").value.clone();
        let new_leaf = Node::leaf(new, value);
        let new_i_child = if st.il.is_empty() || ptr::eq(st.il, st.rl) {
            new_leaf
        } else {
            create_subtree(&unsafe { arc_from_ref(st.il) }, &ipi.region, ipi.region.route(new), &new_leaf)?
        };
        let same_parent = ptr::eq(ip, rp);
        let i_first = !same_parent && spatial_order(&ipi.region, &rp.internal_ref().region) == CmpOrdering::Less;
        let op = Operation::new_move(Move {
            i_parent: unsafe { arc_from_ref(ip) },
            r_parent: unsafe { arc_from_ref(rp) },
            old_i_child: unsafe { arc_from_ref(st.il) },
            old_r_child: unsafe { arc_from_ref(st.rl) },
            new_i_child,
            old_i_op: unsafe { arc_from_ref(st.i_op) },
            old_r_op: unsafe { arc_from_ref(st.r_op) },
            all_flag: Default::default(),
            i_first,
        });
        if same_parent {
            if self.help_move(&op, g) {
                return Ok(true);
            }
            let cur = rp.internal_ref().load_op(g);
            st.r_op = cur;
            st.i_op = cur;
            f.c = true;
            return Ok(false);
        }
        let flagged = if i_first {
            self.help_flag(ip, st.i_op, &op, g)
        } else {
            self.help_flag(rp, st.r_op, &op, g)
        };
        if flagged {
            if self.help_move(&op, g) {
                self.after_move(&mut st.r_path, rp, g);
                return Ok(true);
            }
            f.r = true;
            f.i = true;
        } else if i_first {
            st.i_op = ipi.load_op(g);
            f.i = true;
        } else {
            st.r_op = rp.internal_ref().load_op(g);
            f.r = true;
        }
        Ok(false)
    }

    fn after_move<'g>(&self, r_path: &mut TraversalPath<'g, V>, rp: &'g Node<V>, g: &'g Guard) {
        match self.config.compression {
            Compression::Recursive => self.compress(r_path, rp, g),
            Compression::OneLayer => {
                if let Some(gp) = r_path.pop() {
                    self.compress_one_layer(gp.node, rp, g);
                }
            }
            Compression::None | Compression::GrandparentCoupled => {}
        }
    }

    /// Second flag, replaces and unflags of a move whose first parent is
    /// flagged (or whose single parent is about to be). Returns whether both
    /// flags took effect.
    pub(crate) fn help_move(&self, op: &Operation<V>, g: &Guard) -> bool {
        let Operation::Move(m) = op else { unreachable!("help_move on a non-move descriptor") };
        let (first, second, second_old) = if m.i_first {
            (&m.i_parent, &m.r_parent, &m.old_r_op)
        } else {
            (&m.r_parent, &m.i_parent, &m.old_i_op)
        };
        self.help_flag(second, second_old, op, g);
        let do_cas = ptr::eq(second.internal_ref().load_op(g), op);
        if do_cas {
            m.all_flag.store(true, Ordering::SeqCst);
            let leaf = m.old_r_child.as_leaf().expect("moved node is a leaf");
            let published = leaf
                .move_op
                .compare_exchange(
                    ptr::null_mut(),
                    op as *const Operation<V> as *mut _,
                    Ordering::AcqRel,
                    Ordering::Acquire,
                )
                .is_ok();
            if published {
                self.emit(Event::MoveOpSet { desc: op.addr() });
            }
            if std::sync::Arc::ptr_eq(&m.old_i_child, &m.old_r_child) {
                self.help_replace(&m.r_parent, &*m.old_r_child, m.new_i_child.clone(), OpKind::Move, op.addr(), g);
            } else {
                self.help_replace(&m.i_parent, &*m.old_i_child, m.new_i_child.clone(), OpKind::Move, op.addr(), g);
                self.help_replace(&m.r_parent, &*m.old_r_child, Node::empty(), OpKind::Move, op.addr(), g);
            }
        }
        let all_flag = m.all_flag.load(Ordering::SeqCst);
        if all_flag {
            self.help_flag(second, op, &Operation::clean(), g);
        }
        if !std::sync::Arc::ptr_eq(&m.i_parent, &m.r_parent) {
            self.help_flag(first, op, &Operation::clean(), g);
        }
        all_flag
    }

    /// Shared-prefix search from `start`. Fills both paths and terminals;
    /// false means the move fails outright (old absent or new present).
    fn find_common<'g>(&self, start: &'g Node<V>, old: Point, new: Point, st: &mut MoveState<'g, V>, g: &'g Guard) -> bool {
        let mut rl = start;
        while let Node::Internal(n) = rl {
            let op = n.load_op(g);
            st.r_path.push(rl, op);
            st.r_op = op;
            let qo = n.region.route(old);
            rl = n.child(qo, g);
            if qo != n.region.route(new) {
                break;
            }
        }
        st.lca = st.r_path.top().expect("start is internal").node;
        st.lca_depth = st.r_path.len() - 1;
        let (rl, r_op) = self.descend(rl, st.r_op, old, &mut st.r_path, g);
        st.rl = rl;
        st.r_op = r_op;
        if !in_tree(rl, old) || moved(rl, g) {
            return false;
        }
        st.i_path.clear();
        let (il, i_op) = self.find(st.lca, new, &mut st.i_path, g);
        st.il = il;
        st.i_op = i_op;
        !(in_tree(il, new) && !moved(il, g))
    }

    /// Local restart after a failed attempt. Returns false when the move is
    /// found to fail outright.
    fn continue_find_common<'g>(&'g self, st: &mut MoveState<'g, V>, f: &mut Fails, old: Point, new: Point, g: &'g Guard) -> bool {
        let policy = self.config.restart_policy();
        if f.r && !f.c {
            self.help(st.r_op, g);
            let start = if !st.r_op.is_compress() {
                (policy != RestartPolicy::Root).then_some(st.rp)
            } else if policy == RestartPolicy::Continuous {
                self.pop_to_live(&mut st.r_path, Some(st.lca_depth), g)
            } else {
                None
            };
            match start {
                Some(s) => {
                    self.emit_restart(s, st.rp);
                    let (rl, r_op) = self.find(s, old, &mut st.r_path, g);
                    st.rl = rl;
                    st.r_op = r_op;
                    if !in_tree(rl, old) || moved(rl, g) {
                        return false;
                    }
                    st.rp = st.r_path.pop().expect("find pushed the parent").node;
                }
                None => f.c = true,
            }
        }
        if f.i && !f.c {
            self.help(st.i_op, g);
            let start = if !st.i_op.is_compress() {
                (policy != RestartPolicy::Root).then_some(st.ip)
            } else if policy == RestartPolicy::Continuous {
                // the insert path bottoms out at the lca
                self.pop_to_live(&mut st.i_path, None, g)
            } else {
                None
            };
            match start {
                Some(s) => {
                    self.emit_restart(s, st.ip);
                    let (il, i_op) = self.find(s, new, &mut st.i_path, g);
                    st.il = il;
                    st.i_op = i_op;
                    if in_tree(il, new) && !moved(il, g) {
                        return false;
                    }
                    st.ip = st.i_path.pop().expect("find pushed the parent").node;
                }
                None => f.c = true,
            }
        }
        if !f.c {
            return true;
        }
        // the shared prefix may have changed: search both keys again
        self.help(st.i_op, g);
        self.help(st.r_op, g);
        st.i_path.clear();
        let start: &'g Node<V> = match policy {
            RestartPolicy::Continuous => {
                st.r_path.truncate(st.lca_depth + 1);
                self.pop_to_live(&mut st.r_path, None, g).unwrap_or(&self.root)
            }
            RestartPolicy::OneParent if !st.lca.internal_ref().load_op(g).is_compress() => {
                st.r_path.clear();
                st.lca
            }
            _ => &self.root,
        };
        if self.is_root(start) {
            st.r_path.clear();
        }
        self.emit_restart(start, st.rp);
        if !self.find_common(start, old, new, st, g) {
            return false;
        }
        st.rp = st.r_path.pop().expect("remove path holds the lca").node;
        st.ip = st.i_path.pop().expect("insert path holds the lca").node;
        true
    }

    /// Pops `path` until an entry whose op is not Compress, helping every
    /// Compress on the way. With `floor`, gives up (None) once the path
    /// would shrink below `floor` entries; without, gives up when the path
    /// runs out.
    fn pop_to_live<'g>(&self, path: &mut TraversalPath<'g, V>, floor: Option<usize>, g: &'g Guard) -> Option<&'g Node<V>> {
        loop {
            if floor.is_some_and(|f| path.len() <= f) {
                return None;
            }
            let e = path.pop()?;
            let op = e.node.internal_ref().load_op(g);
            if op.is_compress() {
                self.help(op, g);
            } else {
                return Some(e.node);
            }
        }
    }
}
