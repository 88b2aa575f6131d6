use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Barrier;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{generate_keys, BenchError, WorkloadSpec};
use crate::checker::DictOp;
use crate::geometry::Point;
use crate::tree::{NodeCounts, QuadTree};

/// Outcome of one timed run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunResult {
    /// 1-based run number.
    pub run: usize,
    pub ops: u64,
    pub elapsed: Duration,
    pub ops_per_sec: f64,
    /// Tally of the tree after the workers stopped.
    pub counts: NodeCounts,
}

#[derive(Clone, Debug)]
pub struct BenchResult {
    pub spec: WorkloadSpec,
    pub runs: Vec<RunResult>,
    /// Median throughput of the runs after the warmup runs.
    pub median_ops_per_sec: f64,
}

impl BenchResult {
    /// Runs that count towards the median.
    pub fn measured(&self) -> &[RunResult] {
        &self.runs[self.spec.warmup.min(self.runs.len())..]
    }

    /// Per-kind median node counts over the measured runs.
    pub fn median_counts(&self) -> NodeCounts {
        let m = self.measured();
        let pick = |f: fn(&NodeCounts) -> usize| {
            let mut v: Vec<usize> = m.iter().map(|r| f(&r.counts)).collect();
            v.sort_unstable();
            v.get(v.len() / 2).copied().unwrap_or(0)
        };
        NodeCounts {
            internal: pick(|c| c.internal),
            leaf: pick(|c| c.leaf),
            empty: pick(|c| c.empty),
        }
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Runs `spec.runs` fresh trials and reports their throughput.
pub fn run_benchmark(spec: &WorkloadSpec) -> Result<BenchResult, BenchError> {
    spec.validate()?;
    let keys = generate_keys(spec.range, spec.keys, spec.key_type, spec.seed)?;
    let mut runs = Vec::with_capacity(spec.runs);
    for run in 1..=spec.runs {
        runs.push(run_once(spec, &keys, run)?);
    }
    let mut measured: Vec<f64> = runs[spec.warmup..].iter().map(|r| r.ops_per_sec).collect();
    Ok(BenchResult {
        spec: spec.clone(),
        median_ops_per_sec: median(&mut measured),
        runs,
    })
}

fn run_once(spec: &WorkloadSpec, keys: &[Point], run: usize) -> Result<RunResult, BenchError> {
    let tree = QuadTree::<u64>::builder(spec.algo, spec.range)
        .reclaim(spec.reclaim)
        .build()?;
    for (i, &k) in keys[..spec.prefill_count()].iter().enumerate() {
        tree.insert(k, i as u64)?;
    }
    let stop = AtomicBool::new(false);
    let barrier = Barrier::new(spec.threads + 1);
    let (ops, elapsed) = std::thread::scope(|s| -> Result<(u64, Duration), BenchError> {
        let workers: Vec<_> = (0..spec.threads)
            .map(|t| {
                let (tree, stop, barrier) = (&tree, &stop, &barrier);
                s.spawn(move || worker(spec, tree, keys, t, stop, barrier))
            })
            .collect();
        barrier.wait();
        let start = Instant::now();
        if spec.ops_per_thread.is_none() {
            std::thread::sleep(Duration::from_millis(spec.duration_ms));
            stop.store(true, Ordering::Relaxed);
        }
        let mut total = 0;
        for w in workers {
            total += w.join().expect("worker panicked")?;
        }
        Ok((total, start.elapsed()))
    })?;
    Ok(RunResult {
        run,
        ops,
        elapsed,
        ops_per_sec: ops as f64 / elapsed.as_secs_f64().max(1e-9),
        counts: tree.count_nodes(),
    })
}

fn worker(
    spec: &WorkloadSpec,
    tree: &QuadTree<u64>,
    keys: &[Point],
    tid: usize,
    stop: &AtomicBool,
    barrier: &Barrier,
) -> Result<u64, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ tid as u64);
    let limit = spec.ops_per_thread.unwrap_or(u64::MAX);
    let mut ops = 0u64;
    barrier.wait();
    while ops < limit && !stop.load(Ordering::Relaxed) {
        match spec.mix.sample(&mut rng, keys) {
            DictOp::Insert(k) => tree.insert(k, ops)?,
            op => tree.apply(&op)?,
        };
        ops += 1;
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variants::Variant;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&mut []), 0.0);
    }

    #[test]
    fn smoke_qc() {
        let mut s = WorkloadSpec::new(Variant::Qc, 10.0, 100, "50:50:0:0".parse().unwrap());
        s.duration_ms = 20;
        s.runs = 2;
        s.warmup = 1;
        let r = run_benchmark(&s).unwrap();
        assert_eq!(r.runs.len(), 2);
        assert!(r.median_ops_per_sec > 0.0);
        assert_eq!(r.median_ops_per_sec, r.runs[1].ops_per_sec);
    }

    #[test]
    fn median_ignores_warmup() {
        let mut s = WorkloadSpec::new(Variant::QbO, 10.0, 100, "50:50:0:0".parse().unwrap());
        s.duration_ms = 5;
        let r = run_benchmark(&s).unwrap();
        assert_eq!(r.runs.len(), 8);
        assert_eq!(r.measured().len(), 5);
        assert_eq!(r.measured()[0].run, 4);
        let mut m: Vec<f64> = r.runs[3..].iter().map(|x| x.ops_per_sec).collect();
        assert_eq!(r.median_ops_per_sec, median(&mut m));
    }

    #[test]
    fn fixed_op_count_is_deterministic() {
        let mut s = WorkloadSpec::new(Variant::QbS, 64.0, 500, "30:30:20:20".parse().unwrap());
        s.ops_per_thread = Some(5_000);
        s.runs = 2;
        s.warmup = 0;
        let r = run_benchmark(&s).unwrap();
        assert_eq!(r.runs[0].ops, 5_000);
        assert_eq!(r.runs[0].counts, r.runs[1].counts);
        // prefill succeeded in full
        s.ops_per_thread = Some(0);
        let r = run_benchmark(&s).unwrap();
        assert_eq!(r.runs[0].counts.leaf, 250);
    }
}
