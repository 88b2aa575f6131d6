use std::io::{self, BufRead, Write};
use std::sync::Barrier;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bench::Mix;
use crate::geometry::Point;
use crate::tree::QuadTree;
use crate::TreeError;

use super::oracle::DictOp;

/// One completed operation of a concurrent run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryEvent {
    pub thread: usize,
    pub op: DictOp,
    pub result: bool,
    pub invoke_ns: u64,
    pub response_ns: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum HistoryError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("line {line}: unknown operation `{op}`")]
    UnknownOp { line: usize, op: String },
    #[error("line {line}: move without newKeyX/newKeyY")]
    MissingNewKey { line: usize },
    #[error("malformed history: {0}")]
    Malformed(String),
}

/// Monotonic nanosecond clock shared by all threads of one recording.
#[derive(Clone, Copy, Debug)]
pub struct Clock {
    start: Instant,
}

impl Default for Clock {
    fn default() -> Self {
        Clock { start: Instant::now() }
    }
}

impl Clock {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn now_ns(&self) -> u64 {
        self.start.elapsed().as_nanos() as u64
    }
}

/// A per-thread event buffer.
#[derive(Debug)]
pub struct ThreadLog {
    thread: usize,
    clock: Clock,
    events: Vec<HistoryEvent>,
}

impl ThreadLog {
    pub fn new(thread: usize, clock: Clock) -> Self {
        ThreadLog {
            thread,
            clock,
            events: Vec::new(),
        }
    }

    /// Runs `f` as operation `op`, stamping its invocation and response.
    pub fn record<E>(&mut self, op: DictOp, f: impl FnOnce() -> Result<bool, E>) -> Result<bool, E> {
        let invoke_ns = self.clock.now_ns();
        let result = f()?;
        // keep every interval non-empty even on a coarse clock
        let response_ns = self.clock.now_ns().max(invoke_ns + 1);
        self.events.push(HistoryEvent {
            thread: self.thread,
            op,
            result,
            invoke_ns,
            response_ns,
        });
        Ok(result)
    }

    pub fn into_events(self) -> Vec<HistoryEvent> {
        self.events
    }
}

/// A fixed-size concurrent workload for history recording.
#[derive(Clone, Debug)]
pub struct HistoryWorkload {
    pub threads: usize,
    pub ops_per_thread: usize,
    /// Keys operations draw from, uniformly.
    pub keys: Vec<Point>,
    /// How many of `keys` (from the front) are inserted before the workers
    /// start. The prefill is recorded as one extra thread numbered `threads`.
    pub prefill: usize,
    pub mix: Mix,
    pub seed: u64,
}

/// Runs `w` against `tree` and returns all events ordered by invocation.
/// Thread `t` draws from a generator seeded with `seed ^ t`.
pub fn record_history<V>(tree: &QuadTree<V>, w: &HistoryWorkload) -> Result<Vec<HistoryEvent>, TreeError>
where
    V: Clone + Default + Send + Sync + 'static,
{
    let clock = Clock::new();
    let mut pre = ThreadLog::new(w.threads, clock);
    for &k in &w.keys[..w.prefill.min(w.keys.len())] {
        pre.record(DictOp::Insert(k), || tree.insert(k, V::default()))?;
    }
    let barrier = Barrier::new(w.threads);
    let logs: Vec<Result<ThreadLog, TreeError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..w.threads)
            .map(|t| {
                let barrier = &barrier;
                s.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(w.seed ^ t as u64);
                    let mut log = ThreadLog::new(t, clock);
                    barrier.wait();
                    for _ in 0..w.ops_per_thread {
                        let op = w.mix.sample(&mut rng, &w.keys);
                        log.record(op, || tree.apply(&op))?;
                    }
                    Ok(log)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut events = pre.into_events();
    for log in logs {
        events.extend(log?.into_events());
    }
    events.sort_by_key(|e| (e.invoke_ns, e.thread));
    Ok(events)
}

#[derive(Serialize, Deserialize)]
struct Wire {
    thread: usize,
    op: String,
    #[serde(rename = "keyX")]
    key_x: f64,
    #[serde(rename = "keyY")]
    key_y: f64,
    #[serde(rename = "newKeyX", default, skip_serializing_if = "Option::is_none")]
    new_key_x: Option<f64>,
    #[serde(rename = "newKeyY", default, skip_serializing_if = "Option::is_none")]
    new_key_y: Option<f64>,
    result: bool,
    invoke_ns: u64,
    response_ns: u64,
}

/// Writes one JSON object per line.
pub fn write_ndjson<W: Write>(events: &[HistoryEvent], mut out: W) -> io::Result<()> {
    for e in events {
        let key = e.op.key();
        let (new_key_x, new_key_y) = match e.op {
            DictOp::Move { new, .. } => (Some(new.x), Some(new.y)),
            _ => (None, None),
        };
        let wire = Wire {
            thread: e.thread,
            op: e.op.name().to_string(),
            key_x: key.x,
            key_y: key.y,
            new_key_x,
            new_key_y,
            result: e.result,
            invoke_ns: e.invoke_ns,
            response_ns: e.response_ns,
        };
        serde_json::to_writer(&mut out, &wire)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Parses the format written by [`write_ndjson`]. Blank lines are skipped.
pub fn read_ndjson<R: BufRead>(input: R) -> Result<Vec<HistoryEvent>, HistoryError> {
    let mut events = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let w: Wire = serde_json::from_str(&line).map_err(|source| HistoryError::Parse { line: n, source })?;
        let key = Point::new(w.key_x, w.key_y);
        let op = match w.op.as_str() {
            "insert" => DictOp::Insert(key),
            "remove" => DictOp::Remove(key),
            "contain" => DictOp::Contains(key),
            "move" => match (w.new_key_x, w.new_key_y) {
                (Some(x), Some(y)) => DictOp::Move {
                    old: key,
                    new: Point::new(x, y),
                },
                _ => return Err(HistoryError::MissingNewKey { line: n }),
            },
            other => {
                return Err(HistoryError::UnknownOp {
                    line: n,
                    op: other.to_string(),
                })
            }
        };
        events.push(HistoryEvent {
            thread: w.thread,
            op,
            result: w.result,
            invoke_ns: w.invoke_ns,
            response_ns: w.response_ns,
        });
    }
    Ok(events)
}
