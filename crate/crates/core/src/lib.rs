//! Non-blocking concurrent region quadtrees.
//!
//! A [`QuadTree`] maps two-dimensional keys in `[0, range)^2` to values and
//! supports `insert`, `remove`, `contains`, `get` and an atomic
//! [`move_key`](QuadTree::move_key) from any number of threads. Five
//! algorithms are available through [`Variant`]: the single-CAS baseline
//! `qc` and four descriptor-based trees (`qb-s`, `qb-o`, `qb-d`, `qb-f`)
//! that differ in how much of the search path they record, where they
//! restart after contention, and how they clean up empty internal nodes.
//!
//! ```
//! use quadboost::{Point, QuadTree, Variant};
//!
//! let tree = QuadTree::new(Variant::QbO, 1024.0)?;
//! assert!(tree.insert(Point::new(3.0, 2.0), "a")?);
//! assert!(tree.move_key(Point::new(3.0, 2.0), Point::new(700.0, 9.0))?);
//! assert_eq!(tree.get(Point::new(700.0, 9.0))?, Some("a"));
//! assert!(!tree.contains(Point::new(3.0, 2.0))?);
//! # Ok::<(), quadboost::TreeError>(())
//! ```
//!
//! The [`checker`] module holds a sequential reference, a structural
//! validator, a history recorder and a linearizability checker; [`bench`]
//! holds the throughput and node-count harness behind the `quadbench`
//! binary.

pub mod bench;
mod cas_tree;
pub mod checker;
pub mod geometry;
mod node;
pub mod observer;
mod path;
mod quadboost;
pub mod reclaim;
mod tree;
mod variants;

pub use geometry::{flatten_key, quadrant_of, spatial_order, subregion, GeometryError, Point, Quadrant, Region};
pub use node::OpKind;
pub use observer::{Event, Observer};
pub use reclaim::{live_objects, retired_count, LiveObjects, ReclaimMode};
pub use tree::{Builder, NodeCounts, QuadTree};
pub use variants::{Compression, Variant, VariantConfig};

/// Errors returned by tree operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TreeError {
    #[error("key {key} lies outside [0, {range})^2")]
    OutOfRange { key: Point, range: f64 },
    #[error("invalid range {0}: must be positive and finite")]
    InvalidRange(f64),
    #[error("{variant} does not support {op}")]
    Unsupported { variant: Variant, op: &'static str },
    #[error("internal domain error: {0}")]
    Domain(&'static str),
    #[error("keys {0} and {1} cannot be separated at double precision")]
    Unsplittable(Point, Point),
}
