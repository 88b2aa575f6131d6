//! Offline linearizability check for dictionary histories.
//!
//! Search over partial linearizations in the style of Wing and Gong: a state
//! is how many events of each thread have been linearized plus the key set
//! they produce. States already explored are memoized, which keeps the
//! search linear in practice for small key universes.

use std::collections::{HashMap, HashSet};

use super::history::{HistoryError, HistoryEvent};
use super::oracle::{key_bits, DictOp};

/// Checks the recorder's invariants: `invoke < response` for every event
/// and no overlap between consecutive events of one thread.
pub fn check_well_formed(history: &[HistoryEvent]) -> Result<(), HistoryError> {
    let mut last: HashMap<usize, &HistoryEvent> = HashMap::new();
    let mut by_thread: Vec<&HistoryEvent> = history.iter().collect();
    by_thread.sort_by_key(|e| (e.thread, e.invoke_ns));
    for e in by_thread {
        if e.invoke_ns >= e.response_ns {
            return Err(HistoryError::Malformed(format!(
                "thread {}: {} responds at {} before invoking at {}",
                e.thread, e.op, e.response_ns, e.invoke_ns
            )));
        }
        if let Some(prev) = last.insert(e.thread, e) {
            if prev.response_ns > e.invoke_ns {
                return Err(HistoryError::Malformed(format!(
                    "thread {}: {} overlaps {}",
                    e.thread, prev.op, e.op
                )));
            }
        }
    }
    Ok(())
}

/// Interned form of one event.
#[derive(Clone, Copy)]
struct Step {
    kind: Kind,
    a: usize,
    b: usize,
    result: bool,
    invoke: u64,
    response: u64,
}

#[derive(Clone, Copy)]
enum Kind {
    Insert,
    Remove,
    Contains,
    Move,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    next: Vec<u32>,
    keys: Vec<u64>,
}

impl State {
    fn has(&self, k: usize) -> bool {
        self.keys[k / 64] >> (k % 64) & 1 == 1
    }

    fn set(&mut self, k: usize, on: bool) {
        if on {
            self.keys[k / 64] |= 1 << (k % 64);
        } else {
            self.keys[k / 64] &= !(1 << (k % 64));
        }
    }

    /// Applies `s` if its recorded result matches the sequential one.
    fn step(&self, s: &Step) -> Option<State> {
        let (expected, change): (bool, &[(usize, bool)]) = match s.kind {
            Kind::Insert => (!self.has(s.a), &[(s.a, true)]),
            Kind::Remove => (self.has(s.a), &[(s.a, false)]),
            Kind::Contains => (self.has(s.a), &[]),
            Kind::Move => (s.a != s.b && self.has(s.a) && !self.has(s.b), &[(s.a, false), (s.b, true)]),
        };
        if expected != s.result {
            return None;
        }
        let mut next = self.clone();
        if expected {
            for &(k, on) in change {
                next.set(k, on);
            }
        }
        Some(next)
    }
}

/// Returns whether some total order of `history` that respects real-time
/// precedence replays correctly against the sequential dictionary, starting
/// from an empty tree. Events with `response < invoke` of another are
/// ordered; everything else may interleave freely.
pub fn check_linearizable(history: &[HistoryEvent]) -> Result<bool, HistoryError> {
    check_well_formed(history)?;

    let mut ids: HashMap<(u64, u64), usize> = HashMap::new();
    let mut intern = |p| {
        let n = ids.len();
        *ids.entry(key_bits(p)).or_insert(n)
    };
    let mut threads: HashMap<usize, Vec<Step>> = HashMap::new();
    for e in history {
        let (kind, a, b) = match e.op {
            DictOp::Insert(k) => (Kind::Insert, intern(k), 0),
            DictOp::Remove(k) => (Kind::Remove, intern(k), 0),
            DictOp::Contains(k) => (Kind::Contains, intern(k), 0),
            DictOp::Move { old, new } => (Kind::Move, intern(old), intern(new)),
        };
        threads.entry(e.thread).or_default().push(Step {
            kind,
            a,
            b,
            result: e.result,
            invoke: e.invoke_ns,
            response: e.response_ns,
        });
    }
    let mut threads: Vec<Vec<Step>> = threads.into_values().collect();
    for t in &mut threads {
        t.sort_by_key(|s| s.invoke);
    }
    let words = ids.len().div_ceil(64).max(1);

    let start = State {
        next: vec![0; threads.len()],
        keys: vec![0; words],
    };
    let mut seen: HashSet<State> = HashSet::new();
    let mut stack = vec![start];
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let heads: Vec<Option<&Step>> = threads
            .iter()
            .zip(&state.next)
            .map(|(t, &i)| t.get(i as usize))
            .collect();
        if heads.iter().all(Option::is_none) {
            return Ok(true);
        }
        // an event may go next unless some other pending event finished
        // before it started; per-thread order makes heads sufficient
        let mut first = u64::MAX;
        let mut second = u64::MAX;
        for h in heads.iter().flatten() {
            if h.response < first {
                second = first;
                first = h.response;
            } else if h.response < second {
                second = h.response;
            }
        }
        for (t, h) in heads.iter().enumerate() {
            let Some(h) = h else { continue };
            let bound = if h.response == first { second } else { first };
            if h.invoke > bound {
                continue;
            }
            if let Some(mut next) = state.step(h) {
                next.next[t] += 1;
                if !seen.contains(&next) {
                    stack.push(next);
                }
            }
        }
    }
    Ok(false)
}
