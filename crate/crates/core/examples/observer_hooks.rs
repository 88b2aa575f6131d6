// Instrumentation: count descriptor flags, helps and restarts while
// threads contend on a tiny key space.

use std::collections::HashMap;
use std::error::Error;
use std::sync::{Arc, Mutex};

use quadboost::{Builder, Event, Point, QuadTree, Variant};

fn run_example() -> Result<(), Box<dyn Error>> {
    let tally: Arc<Mutex<HashMap<String, usize>>> = Arc::default();
    let sink = Arc::clone(&tally);
    let tree: QuadTree<u32> = Builder::new(Variant::QbS, 4.0)
        .observer(Arc::new(move |e: Event| {
            let name = match e {
                Event::Flag { to, .. } => format!("flag {to:?}"),
                Event::Replace { kind, .. } => format!("replace {kind:?}"),
                Event::MoveOpSet { .. } => "move published".to_string(),
                Event::Help { kind } => format!("help {kind:?}"),
                Event::Restart { .. } => "restart".to_string(),
            };
            *sink.lock().unwrap().entry(name).or_default() += 1;
            // give other threads a chance to run into the descriptor
            std::thread::yield_now();
        }))
        .build()?;

    std::thread::scope(|s| {
        for t in 0..4u32 {
            let tree = &tree;
            s.spawn(move || {
                let mut x = 0x9e37_79b9u32 ^ t;
                let mut next = move || {
                    x ^= x << 13;
                    x ^= x >> 17;
                    x ^= x << 5;
                    x
                };
                for i in 0..2_000u32 {
                    let r = next();
                    let a = Point::new((r % 4) as f64, (r / 4 % 4) as f64);
                    let b = Point::new((r / 16 % 4) as f64, (r / 64 % 4) as f64);
                    match r / 256 % 4 {
                        0 => drop(tree.insert(a, i)),
                        1 => drop(tree.remove(a)),
                        _ => drop(tree.move_key(a, b)),
                    }
                }
            });
        }
    });

    let mut rows: Vec<_> = tally.lock().unwrap().clone().into_iter().collect();
    rows.sort();
    for (name, n) in &rows {
        println!("{name:<20} {n:>7}");
    }
    assert!(rows.iter().any(|(n, _)| n == "flag Move"));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
