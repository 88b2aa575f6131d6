// Short throughput comparison of all five variants on one workload.

use std::error::Error;

use quadboost::bench::{run_benchmark, WorkloadSpec};
use quadboost::Variant;

fn run_example() -> Result<(), Box<dyn Error>> {
    let threads = std::thread::available_parallelism().map_or(2, |n| n.get().min(4));
    println!("{threads} threads, 10^4 keys, 40:40:20:0, 3 x 100 ms");
    for v in Variant::ALL {
        let mut spec = WorkloadSpec::new(v, 100.0, 10_000, "40:40:20:0".parse()?);
        spec.threads = threads;
        spec.duration_ms = 100;
        spec.runs = 3;
        spec.warmup = 1;
        let r = run_benchmark(&spec)?;
        let c = r.median_counts();
        println!(
            "{:<5} {:>12.0} ops/s   internal {:>5}  leaf {:>5}  empty {:>6}",
            v.name(),
            r.median_ops_per_sec,
            c.internal,
            c.leaf,
            c.empty
        );
        assert!(r.median_ops_per_sec > 0.0);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
