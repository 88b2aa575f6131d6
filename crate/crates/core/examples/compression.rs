// How each variant cleans up after removals: insert a set of clustered
// keys, remove them all, and count what is left.

use std::error::Error;

use quadboost::bench::{generate_keys, KeyType};
use quadboost::{QuadTree, Variant};

fn run_example() -> Result<(), Box<dyn Error>> {
    // clustered float keys force deep chains of internal nodes
    let keys: Vec<_> = generate_keys(16.0, 2_000, KeyType::Float, 42)?
        .into_iter()
        .map(|p| quadboost::Point::new(p.x / 64.0, p.y / 64.0))
        .collect();
    println!("{:<5} {:>9} {:>9} {:>9}", "algo", "peak", "internal", "empty");
    for v in Variant::ALL {
        let tree = QuadTree::new(v, 4096.0)?;
        for k in &keys {
            tree.insert(*k, ())?;
        }
        let peak = tree.count_nodes().internal;
        for k in &keys {
            assert!(tree.remove(*k)?);
        }
        let c = tree.count_nodes();
        println!("{:<5} {:>9} {:>9} {:>9}", v.name(), peak, c.internal, c.empty);
        assert_eq!(c.leaf, 0);
        if v == Variant::QbS {
            // recursive compression restores the bare skeleton
            assert_eq!((c.internal, c.empty), (5, 16));
        }
        if v == Variant::Qc {
            assert_eq!(c.internal, peak);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
