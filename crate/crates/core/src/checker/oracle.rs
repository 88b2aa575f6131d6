use std::collections::HashMap;
use std::fmt;

use crate::geometry::Point;

/// One dictionary operation with its arguments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DictOp {
    Insert(Point),
    Remove(Point),
    Contains(Point),
    Move { old: Point, new: Point },
}

impl DictOp {
    pub fn name(&self) -> &'static str {
        match self {
            DictOp::Insert(_) => "insert",
            DictOp::Remove(_) => "remove",
            DictOp::Contains(_) => "contain",
            DictOp::Move { .. } => "move",
        }
    }

    /// The key the operation reads or removes.
    pub fn key(&self) -> Point {
        match *self {
            DictOp::Insert(k) | DictOp::Remove(k) | DictOp::Contains(k) => k,
            DictOp::Move { old, .. } => old,
        }
    }
}

impl fmt::Display for DictOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DictOp::Move { old, new } => write!(f, "move({old} -> {new})"),
            op => write!(f, "{}({})", op.name(), op.key()),
        }
    }
}

/// Exact-equality map key: both coordinates by bit pattern, with -0 folded
/// into +0.
pub(crate) fn key_bits(p: Point) -> (u64, u64) {
    ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())
}

/// Sequential reference dictionary.
#[derive(Clone, Debug)]
pub struct OracleState<V = ()> {
    map: HashMap<(u64, u64), (Point, V)>,
}

impl<V> Default for OracleState<V> {
    fn default() -> Self {
        OracleState { map: HashMap::new() }
    }
}

impl<V: Clone> OracleState<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn insert(&mut self, key: Point, value: V) -> bool {
        let k = key_bits(key);
        if self.map.contains_key(&k) {
            return false;
        }
        self.map.insert(k, (key, value));
        true
    }

    pub fn remove(&mut self, key: Point) -> bool {
        self.map.remove(&key_bits(key)).is_some()
    }

    pub fn contains(&self, key: Point) -> bool {
        self.map.contains_key(&key_bits(key))
    }

    pub fn get(&self, key: Point) -> Option<&V> {
        self.map.get(&key_bits(key)).map(|(_, v)| v)
    }

    /// Succeeds iff `old` is present and `new` absent; the value travels.
    /// `move_key(k, k)` is false.
    pub fn move_key(&mut self, old: Point, new: Point) -> bool {
        let (ko, kn) = (key_bits(old), key_bits(new));
        if ko == kn || self.map.contains_key(&kn) {
            return false;
        }
        match self.map.remove(&ko) {
            Some((_, v)) => {
                self.map.insert(kn, (new, v));
                true
            }
            None => false,
        }
    }

    /// Keys in ascending (x, y) order.
    pub fn keys(&self) -> Vec<Point> {
        let mut keys: Vec<Point> = self.map.values().map(|(k, _)| *k).collect();
        keys.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        keys
    }
}

impl<V: Clone + Default> OracleState<V> {
    /// Applies `op`, inserting `V::default()` for inserts.
    pub fn apply(&mut self, op: &DictOp) -> bool {
        match *op {
            DictOp::Insert(k) => self.insert(k, V::default()),
            DictOp::Remove(k) => self.remove(k),
            DictOp::Contains(k) => self.contains(k),
            DictOp::Move { old, new } => self.move_key(old, new),
        }
    }
}
