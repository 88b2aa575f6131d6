// Atomic moves: tokens wander over a small board while the number of
// tokens never changes.

use std::error::Error;

use quadboost::{Point, QuadTree, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIDE: u32 = 8;
const TOKENS: u32 = 20;

fn cell(i: u32) -> Point {
    Point::new((i % SIDE) as f64, (i / SIDE) as f64)
}

fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = QuadTree::new(Variant::QbO, SIDE as f64)?;
    for i in 0..TOKENS {
        tree.insert(cell(i * 3 % (SIDE * SIDE)), format!("token-{i}"))?;
    }

    let moves: u32 = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4u64)
            .map(|t| {
                let tree = &tree;
                s.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(t);
                    let mut done = 0;
                    for _ in 0..5_000 {
                        let from = cell(rng.gen_range(0..SIDE * SIDE));
                        let to = cell(rng.gen_range(0..SIDE * SIDE));
                        if tree.move_key(from, to).unwrap() {
                            done += 1;
                        }
                    }
                    done
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    });

    let keys = tree.keys();
    println!("{moves} successful moves, {} tokens on the board", keys.len());
    assert_eq!(keys.len(), TOKENS as usize);
    let mut names: Vec<String> = keys.iter().map(|k| tree.get(*k).unwrap().unwrap()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), TOKENS as usize);

    // the baseline tree has no move
    let qc = QuadTree::<()>::new(Variant::Qc, 8.0)?;
    println!("qc: {}", qc.move_key(cell(0), cell(1)).unwrap_err());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
