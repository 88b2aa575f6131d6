//! Tree nodes, operation descriptors and the predicates every variant uses.

use std::ptr;
use std::sync::atomic::{AtomicBool, AtomicPtr, Ordering};
use std::sync::Arc;

use crossbeam_epoch::Guard;

use crate::geometry::{Point, Quadrant, Region};
use crate::reclaim::{self, count_alloc, count_free, ObjectKind, ReclaimMode};
use crate::TreeError;

/// Deepest chain `create_subtree` will build before giving up on separating
/// two keys. Doubles stop halving meaningfully long before this.
pub(crate) const MAX_SPLIT_DEPTH: usize = 1100;

pub(crate) enum Node<V> {
    Internal(Internal<V>),
    Leaf(Leaf<V>),
    Empty,
}

pub(crate) struct Internal<V> {
    pub region: Region,
    pub children: [Link<V>; 4],
    pub op: OpSlot<V>,
    /// Set only on the root and its four children.
    pub dummy: bool,
}

pub(crate) struct Leaf<V> {
    pub key: Point,
    pub value: V,
    /// The move that removes this leaf, once published. Not an owning
    /// reference: the descriptor owns the leaf, not the other way round.
    pub move_op: AtomicPtr<Operation<V>>,
}

impl<V> Node<V> {
    pub fn empty() -> Arc<Self> {
        count_alloc(ObjectKind::Empty);
        Arc::new(Node::Empty)
    }

    pub fn leaf(key: Point, value: V) -> Arc<Self> {
        count_alloc(ObjectKind::Leaf);
        Arc::new(Node::Leaf(Leaf {
            key,
            value,
            move_op: AtomicPtr::new(ptr::null_mut()),
        }))
    }

    pub fn internal(region: Region, children: [Arc<Node<V>>; 4], dummy: bool) -> Arc<Self> {
        count_alloc(ObjectKind::Internal);
        Arc::new(Node::Internal(Internal {
            region,
            children: children.map(Link::new),
            op: OpSlot::new(Operation::clean()),
            dummy,
        }))
    }

    pub fn empty_internal(region: Region, dummy: bool) -> Arc<Self> {
        Node::internal(
            region,
            [Node::empty(), Node::empty(), Node::empty(), Node::empty()],
            dummy,
        )
    }

    #[inline]
    pub fn as_internal(&self) -> Option<&Internal<V>> {
        match self {
            Node::Internal(i) => Some(i),
            _ => None,
        }
    }

    /// For nodes known to be internal (path entries, descriptor parents).
    #[inline]
    pub fn internal_ref(&self) -> &Internal<V> {
        match self {
            Node::Internal(i) => i,
            _ => unreachable!("expected an internal node"),
        }
    }

    #[inline]
    pub fn as_leaf(&self) -> Option<&Leaf<V>> {
        match self {
            Node::Leaf(l) => Some(l),
            _ => None,
        }
    }

    #[inline]
    pub fn is_internal(&self) -> bool {
        matches!(self, Node::Internal(_))
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        matches!(self, Node::Empty)
    }

    #[inline]
    pub fn addr(&self) -> usize {
        self as *const Self as usize
    }
}

impl<V> Drop for Node<V> {
    fn drop(&mut self) {
        count_free(match self {
            Node::Internal(_) => ObjectKind::Internal,
            Node::Leaf(_) => ObjectKind::Leaf,
            Node::Empty => ObjectKind::Empty,
        });
    }
}

impl<V> Internal<V> {
    #[inline]
    pub fn child<'g>(&self, q: Quadrant, guard: &'g Guard) -> &'g Node<V> {
        self.children[q.index()].load(guard)
    }

    #[inline]
    pub fn load_op<'g>(&self, guard: &'g Guard) -> &'g Operation<V> {
        self.op.load(guard)
    }
}

/// A child link. Owns one strong count of the node it points to.
pub(crate) struct Link<V> {
    ptr: AtomicPtr<Node<V>>,
}

impl<V> Link<V> {
    pub fn new(node: Arc<Node<V>>) -> Self {
        Link {
            ptr: AtomicPtr::new(Arc::into_raw(node) as *mut _),
        }
    }

    #[inline]
    pub fn load<'g>(&self, _guard: &'g Guard) -> &'g Node<V> {
        // SAFETY: the slot always holds a live strong count, and the count
        // it held when we read it is released only after our guard drops.
        unsafe { &*self.ptr.load(Ordering::Acquire) }
    }

    /// Swings the link from `current` to `new`; the winner retires `current`.
    pub fn cas(&self, current: *const Node<V>, new: Arc<Node<V>>, guard: &Guard, mode: ReclaimMode) -> bool {
        let new = Arc::into_raw(new) as *mut Node<V>;
        match self.ptr.compare_exchange(
            current as *mut _,
            new,
            Ordering::AcqRel,
            Ordering::Acquire,
        ) {
            Ok(old) => {
                unsafe { reclaim::retire(guard, mode, old as *const Node<V>) };
                true
            }
            Err(_) => {
                unsafe { drop(Arc::from_raw(new)) };
                false
            }
        }
    }

    /// Test fixtures only: overwrite without CAS or retirement bookkeeping.
    #[cfg(test)]
    pub fn store_for_test(&self, node: Arc<Node<V>>) {
        let old = self.ptr.swap(Arc::into_raw(node) as *mut _, Ordering::AcqRel);
        unsafe { drop(Arc::from_raw(old)) };
    }
}

impl<V> Drop for Link<V> {
    fn drop(&mut self) {
        unsafe { drop(Arc::from_raw(*self.ptr.get_mut())) };
    }
}

/// An internal node's descriptor slot. Owns one strong count.
pub(crate) struct OpSlot<V> {
    ptr: AtomicPtr<Operation<V>>,
}

impl<V> OpSlot<V> {
    pub fn new(op: Arc<Operation<V>>) -> Self {
        OpSlot {
            ptr: AtomicPtr::new(Arc::into_raw(op) as *mut _),
        }
    }

    #[inline]
    pub fn load<'g>(&self, _guard: &'g Guard) -> &'g Operation<V> {
        unsafe { &*self.ptr.load(Ordering::Acquire) }
    }

    /// Installs `new` if the slot still holds `current`.
    pub fn cas(
        &self,
        current: &Operation<V>,
        new: &Arc<Operation<V>>,
        guard: &Guard,
        mode: ReclaimMode,
    ) -> bool {
        let new = Arc::into_raw(Arc::clone(new)) as *mut Operation<V>;
        match self.ptr.compare_exchange(
            current as *const _ as *mut _,
            new,
            Ordering::AcqRel,
            Ordering::Acquire,
        ) {
            Ok(old) => {
                unsafe { reclaim::retire(guard, mode, old as *const Operation<V>) };
                true
            }
            Err(_) => {
                unsafe { drop(Arc::from_raw(new)) };
                false
            }
        }
    }
}

impl<V> Drop for OpSlot<V> {
    fn drop(&mut self) {
        unsafe { drop(Arc::from_raw(*self.ptr.get_mut())) };
    }
}

/// Descriptor kinds, as reported to observers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Clean,
    Substitute,
    Compress,
    Move,
    /// Grandparent-coupled removal used by the `qb-f` ablation.
    Coupled,
}

pub(crate) enum Operation<V> {
    Clean,
    Substitute(Substitute<V>),
    Compress(Compress<V>),
    Move(Move<V>),
    Coupled(Coupled<V>),
}

pub(crate) struct Substitute<V> {
    pub parent: Arc<Node<V>>,
    pub old_child: Arc<Node<V>>,
    pub new_node: Arc<Node<V>>,
}

pub(crate) struct Compress<V> {
    pub grandparent: Arc<Node<V>>,
    /// The node whose slot holds this descriptor, forever. Held raw so the
    /// pair does not form a reference cycle.
    pub parent: RawNode<V>,
}

pub(crate) struct Move<V> {
    pub i_parent: Arc<Node<V>>,
    pub r_parent: Arc<Node<V>>,
    pub old_i_child: Arc<Node<V>>,
    pub old_r_child: Arc<Node<V>>,
    pub new_i_child: Arc<Node<V>>,
    pub old_i_op: Arc<Operation<V>>,
    pub old_r_op: Arc<Operation<V>>,
    pub all_flag: AtomicBool,
    /// `i_parent` is flagged before `r_parent`.
    pub i_first: bool,
}

/// Removal that holds both the grandparent and the parent flagged, as in the
/// leaf-oriented BST scheme the decoupled design improves upon.
pub(crate) struct Coupled<V> {
    pub grandparent: Arc<Node<V>>,
    pub parent: Arc<Node<V>>,
    pub leaf: Arc<Node<V>>,
    pub old_parent_op: Arc<Operation<V>>,
    /// Present when the leaf is the parent's last non-empty child: the parent
    /// is then unlinked from the grandparent and keeps this terminal marker.
    pub unlink: Option<Arc<Operation<V>>>,
    pub all_flag: AtomicBool,
}

pub(crate) struct RawNode<V>(pub *const Node<V>);
unsafe impl<V: Send + Sync> Send for RawNode<V> {}
unsafe impl<V: Send + Sync> Sync for RawNode<V> {}

impl<V> Operation<V> {
    fn alloc(op: Operation<V>) -> Arc<Self> {
        count_alloc(ObjectKind::Descriptor);
        Arc::new(op)
    }

    pub fn clean() -> Arc<Self> {
        Operation::alloc(Operation::Clean)
    }

    pub fn substitute(parent: Arc<Node<V>>, old_child: Arc<Node<V>>, new_node: Arc<Node<V>>) -> Arc<Self> {
        Operation::alloc(Operation::Substitute(Substitute {
            parent,
            old_child,
            new_node,
        }))
    }

    pub fn compress(grandparent: Arc<Node<V>>, parent: &Node<V>) -> Arc<Self> {
        Operation::alloc(Operation::Compress(Compress {
            grandparent,
            parent: RawNode(parent as *const _),
        }))
    }

    pub fn new_move(m: Move<V>) -> Arc<Self> {
        Operation::alloc(Operation::Move(m))
    }

    pub fn coupled(c: Coupled<V>) -> Arc<Self> {
        Operation::alloc(Operation::Coupled(c))
    }

    #[inline]
    pub fn kind(&self) -> OpKind {
        match self {
            Operation::Clean => OpKind::Clean,
            Operation::Substitute(_) => OpKind::Substitute,
            Operation::Compress(_) => OpKind::Compress,
            Operation::Move(_) => OpKind::Move,
            Operation::Coupled(_) => OpKind::Coupled,
        }
    }

    #[inline]
    pub fn is_clean(&self) -> bool {
        matches!(self, Operation::Clean)
    }

    #[inline]
    pub fn is_compress(&self) -> bool {
        matches!(self, Operation::Compress(_))
    }

    #[inline]
    pub fn addr(&self) -> usize {
        self as *const Self as usize
    }
}

impl<V> Drop for Operation<V> {
    fn drop(&mut self) {
        count_free(ObjectKind::Descriptor);
    }
}

/// Builds the root, its four dummy children and sixteen empty terminals.
pub(crate) fn new_skeleton<V>(range: f64) -> Result<Arc<Node<V>>, TreeError> {
    let root_region = Region::square(range).map_err(|_| TreeError::InvalidRange(range))?;
    let children = Quadrant::ALL.map(|q| Node::empty_internal(root_region.subregion(q), true));
    Ok(Node::internal(root_region, children, true))
}

/// True iff `n` is a leaf holding exactly `key`.
#[inline]
pub(crate) fn in_tree<V>(n: &Node<V>, key: Point) -> bool {
    match n {
        Node::Leaf(l) => l.key.x == key.x && l.key.y == key.y,
        _ => false,
    }
}

/// True iff `parent` currently links to `c`.
#[inline]
pub(crate) fn has_child<V>(parent: &Internal<V>, c: &Node<V>, guard: &Guard) -> bool {
    parent
        .children
        .iter()
        .any(|link| ptr::eq(link.load(guard), c))
}

/// True iff all four children of `n` are empty terminals.
#[inline]
pub(crate) fn all_children_empty<V>(n: &Internal<V>, guard: &Guard) -> bool {
    n.children.iter().all(|link| link.load(guard).is_empty())
}

/// A leaf is moved once the insert-side replace of the move that published
/// itself on the leaf has taken effect.
#[inline]
pub(crate) fn moved<V>(n: &Node<V>, guard: &Guard) -> bool {
    let Node::Leaf(leaf) = n else { return false };
    let op = leaf.move_op.load(Ordering::Acquire);
    if op.is_null() {
        return false;
    }
    // SAFETY: the move descriptor owns this leaf, so it outlives every
    // thread that can still reach the leaf.
    match unsafe { &*op } {
        Operation::Move(m) => !has_child(m.i_parent.internal_ref(), &m.old_i_child, guard),
        _ => unreachable!("leaf move slot holds a non-move descriptor"),
    }
}

/// Builds the node that replaces terminal `l` (in quadrant `q` of
/// `parent_region`) so that `leaf` is added. An empty terminal is replaced by
/// the leaf itself; a leaf terminal is pushed down a fresh chain of internal
/// nodes until the two keys part ways.
pub(crate) fn create_subtree<V>(
    l: &Arc<Node<V>>,
    parent_region: &Region,
    q: Quadrant,
    leaf: &Arc<Node<V>>,
) -> Result<Arc<Node<V>>, TreeError> {
    let new_key = leaf.as_leaf().expect("new node must be a leaf").key;
    let old_key = match &**l {
        Node::Empty => return Ok(Arc::clone(leaf)),
        Node::Internal(_) => return Err(TreeError::Domain("create_subtree on an internal terminal")),
        Node::Leaf(old) => old.key,
    };
    if in_tree(l, new_key) {
        return Err(TreeError::Domain("create_subtree with a duplicate key"));
    }
    // regions from the top of the chain down to where the keys separate
    let mut regions = Vec::new();
    let mut region = parent_region.subregion(q);
    loop {
        regions.push(region);
        let qo = region.route(old_key);
        let qn = region.route(new_key);
        if qo != qn {
            break;
        }
        if regions.len() > MAX_SPLIT_DEPTH {
            return Err(TreeError::Unsplittable(old_key, new_key));
        }
        region = region.subregion(qo);
    }
    let mut below: Option<Arc<Node<V>>> = None;
    for region in regions.iter().rev() {
        let qo = region.route(old_key);
        let children = Quadrant::ALL.map(|c| {
            if let Some(sub) = below.as_ref().filter(|_| c == qo) {
                Arc::clone(sub)
            } else if below.is_none() && c == qo {
                Arc::clone(l)
            } else if below.is_none() && c == region.route(new_key) {
                Arc::clone(leaf)
            } else {
                Node::empty()
            }
        });
        below = Some(Node::internal(*region, children, false));
    }
    Ok(below.expect("at least one region"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reclaim::pin;

    fn reg(x: f64, y: f64, w: f64) -> Region {
        Region::new(x, y, w, w).unwrap()
    }

    fn count(n: &Node<u32>, g: &Guard) -> (usize, usize, usize) {
        match n {
            Node::Empty => (0, 0, 1),
            Node::Leaf(_) => (0, 1, 0),
            Node::Internal(i) => {
                let mut acc = (1, 0, 0);
                for q in Quadrant::ALL {
                    let c = count(i.child(q, g), g);
                    acc = (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2);
                }
                acc
            }
        }
    }

    #[test]
    fn skeleton_shape() {
        let root = new_skeleton::<u32>(16.0).unwrap();
        let g = pin();
        assert_eq!(count(&root, &g), (5, 0, 16));
        let r = root.internal_ref();
        assert!(r.dummy);
        assert!(r.load_op(&g).is_clean());
        for q in Quadrant::ALL {
            let c = r.child(q, &g).internal_ref();
            assert!(c.dummy);
            assert!(c.load_op(&g).is_clean());
            assert_eq!(c.region, r.region.subregion(q));
            assert!(all_children_empty(c, &g));
        }
        assert!(!all_children_empty(r, &g));
    }

    #[test]
    fn skeleton_rejects_bad_range() {
        assert!(new_skeleton::<u32>(0.0).is_err());
        assert!(new_skeleton::<u32>(-3.0).is_err());
        assert!(new_skeleton::<u32>(f64::NAN).is_err());
    }

    #[test]
    fn in_tree_examples() {
        let l = Node::leaf(Point::new(5.0, 5.0), 1u32);
        assert!(in_tree(&l, Point::new(5.0, 5.0)));
        assert!(!in_tree(&l, Point::new(5.0, 6.0)));
        assert!(!in_tree(&Node::<u32>::empty(), Point::new(5.0, 5.0)));
    }

    #[test]
    fn has_child_tracks_replacement() {
        let g = pin();
        let c = Node::leaf(Point::new(1.0, 1.0), 0u32);
        let p = Node::internal(
            reg(0.0, 0.0, 4.0),
            [Arc::clone(&c), Node::empty(), Node::empty(), Node::empty()],
            false,
        );
        let pi = p.internal_ref();
        assert!(has_child(pi, &c, &g));
        assert!(!has_child(pi, &Node::empty(), &g));
        assert!(pi.children[0].cas(&*c, Node::empty(), &g, ReclaimMode::Epoch));
        assert!(!has_child(pi, &c, &g));
    }

    #[test]
    fn all_children_empty_examples() {
        let g = pin();
        let leafy = Node::internal(
            reg(0.0, 0.0, 4.0),
            [Node::leaf(Point::new(0.0, 0.0), 0u32), Node::empty(), Node::empty(), Node::empty()],
            false,
        );
        assert!(!all_children_empty(leafy.internal_ref(), &g));
        let nested = Node::internal(
            reg(0.0, 0.0, 4.0),
            [Node::<u32>::empty_internal(reg(0.0, 0.0, 2.0), false), Node::empty(), Node::empty(), Node::empty()],
            false,
        );
        assert!(!all_children_empty(nested.internal_ref(), &g));
    }

    #[test]
    fn create_subtree_on_empty_returns_leaf() {
        let leaf = Node::leaf(Point::new(3.0, 2.0), 9u32);
        let out = create_subtree(&Node::empty(), &reg(0.0, 0.0, 16.0), Quadrant::Nw, &leaf).unwrap();
        assert!(Arc::ptr_eq(&out, &leaf));
    }

    #[test]
    fn create_subtree_separates_at_width_two() {
        let g = pin();
        let old = Node::leaf(Point::new(0.0, 0.0), 0u32);
        let new = Node::leaf(Point::new(1.0, 1.0), 1u32);
        let top = create_subtree(&old, &reg(0.0, 0.0, 16.0), Quadrant::Nw, &new).unwrap();
        // chain (0,0,8) -> (0,0,4) -> (0,0,2)
        let mut n: &Node<u32> = &top;
        for w in [8.0, 4.0] {
            let i = n.internal_ref();
            assert_eq!(i.region, reg(0.0, 0.0, w));
            assert!(!i.dummy);
            assert!(i.load_op(&g).is_clean());
            for q in [Quadrant::Ne, Quadrant::Sw, Quadrant::Se] {
                assert!(i.child(q, &g).is_empty());
            }
            n = i.child(Quadrant::Nw, &g);
        }
        let deepest = n.internal_ref();
        assert_eq!(deepest.region, reg(0.0, 0.0, 2.0));
        assert!(ptr::eq(deepest.child(Quadrant::Nw, &g), &*old));
        assert!(ptr::eq(deepest.child(Quadrant::Se, &g), &*new));
        assert!(deepest.child(Quadrant::Ne, &g).is_empty());
        assert!(deepest.child(Quadrant::Sw, &g).is_empty());
        assert_eq!(count(&top, &g), (3, 2, 8));
    }

    #[test]
    fn create_subtree_separates_immediately() {
        let g = pin();
        let old = Node::leaf(Point::new(0.0, 0.0), 0u32);
        let new = Node::leaf(Point::new(7.0, 7.0), 1u32);
        let top = create_subtree(&old, &reg(0.0, 0.0, 16.0), Quadrant::Nw, &new).unwrap();
        let i = top.internal_ref();
        assert_eq!(i.region, reg(0.0, 0.0, 8.0));
        assert!(ptr::eq(i.child(Quadrant::Nw, &g), &*old));
        assert!(ptr::eq(i.child(Quadrant::Se, &g), &*new));
        assert_eq!(count(&top, &g), (1, 2, 2));
    }

    #[test]
    fn create_subtree_rejects_bad_inputs() {
        let leaf = Node::leaf(Point::new(1.0, 1.0), 0u32);
        let dup = Node::leaf(Point::new(1.0, 1.0), 5u32);
        assert!(create_subtree(&dup, &reg(0.0, 0.0, 16.0), Quadrant::Nw, &leaf).is_err());
        let internal = Node::empty_internal(reg(0.0, 0.0, 8.0), false);
        assert!(create_subtree(&internal, &reg(0.0, 0.0, 16.0), Quadrant::Nw, &leaf).is_err());
    }

    #[test]
    fn op_slot_cas_only_from_current() {
        let g = pin();
        let slot = OpSlot::<u32>::new(Operation::clean());
        let cur = slot.load(&g);
        let stale = Operation::clean();
        let next = Operation::clean();
        assert!(!slot.cas(&stale, &next, &g, ReclaimMode::Epoch));
        assert!(slot.cas(cur, &next, &g, ReclaimMode::Epoch));
        assert!(ptr::eq(slot.load(&g), &*next));
        // the same transition cannot succeed twice
        assert!(!slot.cas(cur, &Operation::clean(), &g, ReclaimMode::Epoch));
    }
}
