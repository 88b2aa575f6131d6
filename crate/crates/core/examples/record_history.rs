// Record a concurrent history, check it for linearizability and dump it
// as newline-delimited JSON.
//
// `cargo run --example record_history -- history.ndjson` writes the dump
// to a file; without an argument it goes to the temp directory.

use std::error::Error;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use quadboost::checker::{check_linearizable, record_history, validate_structure, write_ndjson, HistoryWorkload};
use quadboost::{Point, QuadTree, Variant};

fn run_example() -> Result<(), Box<dyn Error>> {
    let grid: Vec<Point> = (0..64).map(|i| Point::new((i % 8) as f64, (i / 8) as f64)).collect();
    let tree = QuadTree::<()>::new(Variant::QbO, 8.0)?;
    let workload = HistoryWorkload {
        threads: 4,
        ops_per_thread: 500,
        keys: grid,
        prefill: 32,
        mix: "10:10:20:60".parse()?,
        seed: 2024,
    };
    let history = record_history(&tree, &workload)?;
    let report = validate_structure(&tree)?;
    println!("{} events, final tree {:?}", history.len(), report.counts);
    let ok = check_linearizable(&history)?;
    println!("linearizable: {ok}");
    assert!(ok);

    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("quadboost-history.ndjson"));
    write_ndjson(&history, BufWriter::new(File::create(&path)?))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
