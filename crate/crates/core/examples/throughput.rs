// The benchmark protocol: warmup runs followed by measured runs, median
// throughput, CSV output.

use std::error::Error;

use quadboost::bench::{emit_csv, run_benchmark, WorkloadSpec};
use quadboost::Variant;

fn run_example() -> Result<(), Box<dyn Error>> {
    let mut results = Vec::new();
    for threads in [1, 2] {
        let mut spec = WorkloadSpec::new(Variant::QbO, 1000.0, 1_000_000, "50:50:0:0".parse()?);
        spec.threads = threads;
        spec.duration_ms = 50;
        let r = run_benchmark(&spec)?;
        assert_eq!(r.runs.len(), 8);
        assert_eq!(r.measured().len(), 5);
        results.push(r);
    }
    print!("{}", emit_csv(&results));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
