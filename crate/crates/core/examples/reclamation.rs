// Memory reclamation: with epoch-based reclamation the number of live
// nodes and descriptors stays proportional to the tree; in leak mode every
// replaced object stays allocated.

use std::error::Error;

use quadboost::{live_objects, reclaim, Point, QuadTree, ReclaimMode, Variant};

fn churn(mode: ReclaimMode) -> Result<usize, Box<dyn Error>> {
    let before = live_objects().total();
    {
        let tree: QuadTree<u64> = QuadTree::builder(Variant::QbO, 64.0).reclaim(mode).build()?;
        for round in 0..20u64 {
            for i in 0..256u64 {
                let p = Point::new((i % 16) as f64 * 4.0, (i / 16) as f64 * 4.0);
                tree.insert(p, round)?;
                tree.move_key(p, Point::new(p.x + 1.0, p.y))?;
                tree.remove(Point::new(p.x + 1.0, p.y))?;
            }
        }
        reclaim::flush();
    }
    reclaim::flush();
    Ok((live_objects().total() - before).max(0) as usize)
}

fn run_example() -> Result<(), Box<dyn Error>> {
    let epoch = churn(ReclaimMode::Epoch)?;
    let leak = churn(ReclaimMode::Leak)?;
    println!("objects still allocated after dropping the tree: epoch {epoch}, leak {leak}");
    assert!(leak > 10 * epoch.max(1));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
