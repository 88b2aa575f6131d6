// Concurrent inserts, lookups and removals on a shared tree.

use std::error::Error;

use quadboost::{Point, QuadTree, Variant};

fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = QuadTree::new(Variant::QbS, 256.0)?;

    // four threads each insert a disjoint column band
    std::thread::scope(|s| {
        for t in 0..4u32 {
            let tree = &tree;
            s.spawn(move || {
                for x in (t * 64)..(t * 64 + 64) {
                    for y in (0..256).step_by(16) {
                        tree.insert(Point::new(x as f64, y as f64), x * 1000 + y).unwrap();
                    }
                }
            });
        }
    });
    let counts = tree.count_nodes();
    println!("after inserts: {counts:?}");
    assert_eq!(counts.leaf, 256 * 16);

    assert_eq!(tree.get(Point::new(70.0, 32.0))?, Some(70_032));
    assert!(!tree.insert(Point::new(70.0, 32.0), 0)?);
    assert!(!tree.contains(Point::new(70.5, 32.0))?);

    // remove every other column concurrently
    std::thread::scope(|s| {
        for t in 0..4u32 {
            let tree = &tree;
            s.spawn(move || {
                for x in ((t * 64)..(t * 64 + 64)).filter(|x| x % 2 == 0) {
                    for y in (0..256).step_by(16) {
                        assert!(tree.remove(Point::new(x as f64, y as f64)).unwrap());
                    }
                }
            });
        }
    });
    println!("after removes: {:?}", tree.count_nodes());
    assert_eq!(tree.keys().len(), 128 * 16);

    // keys outside [0, range)^2 are rejected
    let err = tree.insert(Point::new(256.0, 0.0), 0).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
