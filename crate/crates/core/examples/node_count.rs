// Nodes left behind under a remove-dominated workload, with and without
// compression.

use std::error::Error;

use quadboost::bench::{run_benchmark, KeyType, WorkloadSpec};
use quadboost::Variant;

fn run_example() -> Result<(), Box<dyn Error>> {
    let mut internal = Vec::new();
    for v in [Variant::Qc, Variant::QbS, Variant::QbO, Variant::QbD, Variant::QbF] {
        let mut spec = WorkloadSpec::new(v, 4294967295.0, 10_000, "10:90:0:0".parse()?);
        spec.key_type = KeyType::Float;
        spec.ops_per_thread = Some(50_000);
        spec.runs = 1;
        spec.warmup = 0;
        let r = run_benchmark(&spec)?;
        let c = r.runs[0].counts;
        println!("{:<5} internal {:>6}  leaf {:>6}  empty {:>6}", v.name(), c.internal, c.leaf, c.empty);
        internal.push(c.internal);
    }
    println!("qc keeps {:.1}x the internal nodes of qb-s", internal[0] as f64 / internal[1] as f64);
    assert!(internal[0] > internal[1]);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
