//! Per-invocation record of the internal nodes a search passed through.

use crate::node::{Node, Operation};

/// An internal node together with the descriptor read from it just before
/// its child link was followed.
pub(crate) struct Entry<'g, V> {
    pub node: &'g Node<V>,
    pub op: &'g Operation<V>,
}

impl<V> Clone for Entry<'_, V> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<V> Copy for Entry<'_, V> {}

/// Stack of internal nodes in root-to-terminal order.
///
/// The `qb-s` variant keeps the whole path. The other variants keep only the
/// last two entries (parent and grandparent of the terminal), which is all a
/// parent-restart or one-layer compression needs.
pub(crate) struct TraversalPath<'g, V> {
    entries: Vec<Entry<'g, V>>,
    cap: Option<usize>,
}

impl<'g, V> TraversalPath<'g, V> {
    pub fn full() -> Self {
        TraversalPath {
            entries: Vec::with_capacity(32),
            cap: None,
        }
    }

    pub fn bounded(cap: usize) -> Self {
        TraversalPath {
            entries: Vec::with_capacity(cap),
            cap: Some(cap),
        }
    }

    #[inline]
    pub fn push(&mut self, node: &'g Node<V>, op: &'g Operation<V>) {
        debug_assert!(node.is_internal());
        if let Some(cap) = self.cap {
            if self.entries.len() == cap {
                self.entries.remove(0);
            }
        }
        self.entries.push(Entry { node, op });
    }

    #[inline]
    pub fn pop(&mut self) -> Option<Entry<'g, V>> {
        self.entries.pop()
    }

    #[inline]
    pub fn top(&self) -> Option<Entry<'g, V>> {
        self.entries.last().copied()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Region;

    #[test]
    fn bounded_path_keeps_the_last_entries() {
        let nodes: Vec<_> = (0..4)
            .map(|i| Node::<u8>::empty_internal(Region::new(i as f64, 0.0, 1.0, 1.0).unwrap(), false))
            .collect();
        let op = Operation::<u8>::clean();
        let mut p = TraversalPath::bounded(2);
        for n in &nodes {
            p.push(n, &op);
        }
        assert_eq!(p.len(), 2);
        assert!(std::ptr::eq(p.pop().unwrap().node, &*nodes[3]));
        assert!(std::ptr::eq(p.pop().unwrap().node, &*nodes[2]));
        assert!(p.pop().is_none());

        let mut f = TraversalPath::full();
        for n in &nodes {
            f.push(n, &op);
        }
        assert_eq!(f.len(), 4);
        f.truncate(1);
        assert!(std::ptr::eq(f.top().unwrap().node, &*nodes[0]));
    }
}
