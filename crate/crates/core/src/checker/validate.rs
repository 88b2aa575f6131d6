use std::collections::HashSet;
use std::fmt;

use crate::geometry::{Quadrant, Region};
use crate::node::{moved, Node};
use crate::reclaim::pin;
use crate::tree::{NodeCounts, QuadTree};

use super::oracle::key_bits;

/// Summary of a valid tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub counts: NodeCounts,
    /// Depth of the deepest internal node (the root is 0).
    pub max_depth: usize,
}

/// A violated structural property, located by its child path from the root.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct StructureError {
    pub path: String,
    pub message: String,
}

fn fail(path: &[Quadrant], message: impl fmt::Display) -> StructureError {
    let mut p = String::from("root");
    for q in path {
        p.push('/');
        p.push_str(q.name());
    }
    StructureError {
        path: p,
        message: message.to_string(),
    }
}

/// Checks a quiescent tree: the dummy layers are the original nodes and
/// untouched, every internal child covers exactly its quadrant, every leaf
/// lies inside its quadrant, no key appears twice, no descriptor is left
/// installed and no moved leaf is still linked.
pub fn validate_structure<V>(t: &QuadTree<V>) -> Result<StructureReport, StructureError> {
    let g = pin();
    let root: &Node<V> = &t.root;
    let r = root.internal_ref();
    if r.region != t.region {
        return Err(fail(&[], format!("root covers {} instead of {}", r.region, t.region)));
    }
    if !r.dummy {
        return Err(fail(&[], "root is not marked dummy"));
    }
    for q in Quadrant::ALL {
        let c = r.child(q, &g);
        if c.addr() != t.dummies[q.index()] {
            return Err(fail(&[q], "skeleton node was replaced"));
        }
        match c.as_internal() {
            Some(ci) if ci.dummy => {}
            _ => return Err(fail(&[q], "skeleton node lost its dummy mark")),
        }
    }

    let mut counts = NodeCounts::default();
    let mut max_depth = 0;
    let mut seen = HashSet::new();
    let mut path = Vec::new();
    // (node, region it must cover, depth, path length at push)
    let mut stack: Vec<(&Node<V>, Option<Quadrant>, Region, usize)> = vec![(root, None, t.region, 0)];
    while let Some((n, q, region, depth)) = stack.pop() {
        path.truncate(depth.saturating_sub(1));
        if let Some(q) = q {
            path.push(q);
        }
        match n {
            Node::Internal(i) => {
                counts.internal += 1;
                max_depth = max_depth.max(depth);
                if i.region != region {
                    return Err(fail(&path, format!("internal covers {} but its slot is {}", i.region, region)));
                }
                if i.dummy != (depth <= 1) {
                    return Err(fail(&path, "dummy mark on a non-skeleton node"));
                }
                let op = i.load_op(&g);
                if !op.is_clean() {
                    return Err(fail(&path, format!("{:?} descriptor left installed", op.kind())));
                }
                for cq in Quadrant::ALL.iter().rev() {
                    stack.push((i.child(*cq, &g), Some(*cq), region.subregion(*cq), depth + 1));
                }
            }
            Node::Leaf(l) => {
                counts.leaf += 1;
                if !region.contains(l.key) {
                    return Err(fail(&path, format!("leaf {} outside its quadrant {}", l.key, region)));
                }
                if moved(n, &g) {
                    return Err(fail(&path, format!("moved leaf {} still linked", l.key)));
                }
                if !seen.insert(key_bits(l.key)) {
                    return Err(fail(&path, format!("duplicate key {}", l.key)));
                }
            }
            Node::Empty => counts.empty += 1,
        }
    }
    Ok(StructureReport { counts, max_depth })
}
