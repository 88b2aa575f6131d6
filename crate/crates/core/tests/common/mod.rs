#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use quadboost::bench::Mix;
use quadboost::checker::{record_history, HistoryEvent, HistoryWorkload};
use quadboost::{Builder, Event, Observer, Point, QuadTree, ReclaimMode, Variant};

pub fn grid(n: usize) -> Vec<Point> {
    (0..n * n).map(|i| Point::new((i / n) as f64, (i % n) as f64)).collect()
}

/// Yields the CPU at a pseudo-random subset of observable steps so that
/// threads interleave inside operations even on a single core.
pub fn chaos(seed: u64) -> Arc<dyn Observer> {
    let state = AtomicU64::new(seed | 1);
    Arc::new(move |_: Event| {
        let mut x = state.load(Ordering::Relaxed);
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        state.store(x, Ordering::Relaxed);
        if x.is_multiple_of(3) {
            std::thread::yield_now();
        }
    })
}

pub fn chaotic_tree(variant: Variant, range: f64, seed: u64, mode: ReclaimMode) -> QuadTree<()> {
    Builder::new(variant, range)
        .reclaim(mode)
        .observer(chaos(seed))
        .build()
        .unwrap()
}

/// One stress run on an 8x8 grid: records and returns the history.
pub fn stress_run(variant: Variant, mix: &str, seed: u64, threads: usize, ops: usize, mode: ReclaimMode) -> (QuadTree<()>, Vec<HistoryEvent>) {
    let tree = chaotic_tree(variant, 8.0, seed, mode);
    let w = HistoryWorkload {
        threads,
        ops_per_thread: ops,
        keys: grid(8),
        prefill: 32,
        mix: mix.parse::<Mix>().unwrap(),
        seed,
    };
    let h = record_history(&tree, &w).unwrap();
    (tree, h)
}

thread_local! {
    static VICTIM: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

/// Marks the calling thread as the one a [`Parker`] may suspend.
pub fn become_victim() {
    VICTIM.with(|v| v.set(true));
}

type Gate = (std::sync::mpsc::Sender<Event>, std::sync::mpsc::Receiver<()>);

/// Observer that suspends the victim thread at the first event matching a
/// predicate, until released.
pub struct Parker {
    pred: Box<dyn Fn(&Event) -> bool + Send + Sync>,
    gate: std::sync::Mutex<Option<Gate>>,
}

pub struct ParkHandle {
    pub parked: std::sync::mpsc::Receiver<Event>,
    pub release: std::sync::mpsc::Sender<()>,
}

impl Parker {
    pub fn new(pred: impl Fn(&Event) -> bool + Send + Sync + 'static) -> (Arc<Parker>, ParkHandle) {
        let (ptx, prx) = std::sync::mpsc::channel();
        let (rtx, rrx) = std::sync::mpsc::channel();
        let parker = Arc::new(Parker {
            pred: Box::new(pred),
            gate: std::sync::Mutex::new(Some((ptx, rrx))),
        });
        (parker, ParkHandle { parked: prx, release: rtx })
    }
}

impl Observer for Parker {
    fn event(&self, event: Event) {
        if !VICTIM.with(|v| v.get()) || !(self.pred)(&event) {
            return;
        }
        let gate = self.gate.lock().unwrap().take();
        if let Some((parked, release)) = gate {
            let _ = parked.send(event);
            let _ = release.recv();
        }
    }
}
