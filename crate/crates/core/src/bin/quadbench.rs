//! Command-line front end for the benchmark harness and history recorder.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use quadboost::bench::{emit_csv, generate_keys, run_benchmark, KeyType, Mix, WorkloadSpec};
use quadboost::checker::{record_history, write_ndjson, HistoryWorkload};
use quadboost::{QuadTree, ReclaimMode, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Timed runs, CSV with per-run and median throughput.
    Throughput,
    /// Like throughput with 3 s runs by default; node counts are the point.
    Nodecount,
    /// Fixed-size run recorded as a newline-delimited JSON history.
    History,
}

#[derive(Parser, Debug)]
#[command(name = "quadbench", version, about = "Concurrent quadtree benchmark harness")]
struct Args {
    #[arg(long, default_value = "qb-o")]
    algo: Variant,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Length of each run; defaults to 1000 (3000 in nodecount mode).
    #[arg(long)]
    duration_ms: Option<u64>,
    #[arg(long, default_value_t = 1000.0)]
    range: f64,
    /// Key-set size; defaults to range^2 for int keys.
    #[arg(long)]
    keys: Option<usize>,
    #[arg(long, default_value = "int")]
    key_type: KeyType,
    /// insert:remove:contain:move percentages.
    #[arg(long, default_value = "50:50:0:0")]
    mix: Mix,
    #[arg(long, default_value_t = 0.5)]
    prefill: f64,
    #[arg(long, default_value_t = 8)]
    runs: usize,
    #[arg(long, default_value_t = 3)]
    warmup: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "throughput")]
    mode: Mode,
    /// Operations per thread (history mode, or a fixed count instead of a duration).
    #[arg(long)]
    ops: Option<u64>,
    #[arg(long, default_value = "epoch")]
    reclaim: ReclaimMode,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("quadbench: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: &Args) -> Result<(), Box<dyn std::error::Error>> {
    let keys = args.keys.unwrap_or_else(|| {
        let side = args.range.ceil() as usize;
        side * side
    });
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if args.mode == Mode::History {
        if args.mix.moves > 0 && !args.algo.supports_move() {
            return Err(format!("{} does not support move", args.algo).into());
        }
        let key_set = generate_keys(args.range, keys, args.key_type, args.seed)?;
        let tree = QuadTree::<()>::builder(args.algo, args.range)
            .reclaim(args.reclaim)
            .build()?;
        let workload = HistoryWorkload {
            threads: args.threads,
            ops_per_thread: args.ops.unwrap_or(500) as usize,
            prefill: ((args.prefill * keys as f64).ceil() as usize).min(keys),
            keys: key_set,
            mix: args.mix,
            seed: args.seed,
        };
        let history = record_history(&tree, &workload)?;
        write_ndjson(&history, &mut out)?;
        return Ok(());
    }
    let default_ms = if args.mode == Mode::Nodecount { 3000 } else { 1000 };
    let spec = WorkloadSpec {
        algo: args.algo,
        threads: args.threads,
        duration_ms: args.duration_ms.unwrap_or(default_ms),
        range: args.range,
        keys,
        key_type: args.key_type,
        mix: args.mix,
        prefill: args.prefill,
        runs: args.runs,
        warmup: args.warmup,
        seed: args.seed,
        reclaim: args.reclaim,
        ops_per_thread: args.ops,
    };
    let result = run_benchmark(&spec)?;
    out.write_all(emit_csv(&[result]).as_bytes())?;
    out.flush()?;
    Ok(())
}
