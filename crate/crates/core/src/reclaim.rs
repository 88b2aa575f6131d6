//! Deferred reclamation of unlinked nodes and replaced descriptors.
//!
//! Every node and descriptor lives in an `Arc`. Each shared slot (child link,
//! op slot) owns one strong count, stored as a raw pointer. Traversals read
//! raw pointers while pinned to the global epoch and never touch reference
//! counts. When a CAS swings a slot, the winner hands the slot's old strong
//! count to [`retire`], which drops it only after every thread pinned at that
//! moment has unpinned. Descriptors keep strong counts on the nodes and prior
//! descriptors they name, so a helper comparing against them can never see a
//! recycled address.
//!
//! [`ReclaimMode::Leak`] turns `retire` into a no-op, mirroring a garbage
//! collected runtime where nothing is ever freed while reachable.

use std::cell::Cell;
use std::sync::atomic::{AtomicIsize, AtomicUsize, Ordering};
use std::sync::Arc;

use crossbeam_epoch::Guard;
use crossbeam_utils::CachePadded;

/// Environment variable consulted by [`ReclaimMode::from_env`].
pub const RECLAIM_ENV: &str = "QUADBOOST_RECLAIM";

/// How unlinked objects are disposed of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReclaimMode {
    /// Epoch-based deferred reclamation.
    #[default]
    Epoch,
    /// Never free unlinked objects.
    Leak,
}

impl ReclaimMode {
    /// Reads `QUADBOOST_RECLAIM` (`epoch` or `leak`); anything else falls
    /// back to [`ReclaimMode::Epoch`].
    pub fn from_env() -> Self {
        match std::env::var(RECLAIM_ENV).as_deref() {
            Ok("leak") => ReclaimMode::Leak,
            _ => ReclaimMode::Epoch,
        }
    }
}

impl std::str::FromStr for ReclaimMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "epoch" => Ok(ReclaimMode::Epoch),
            "leak" => Ok(ReclaimMode::Leak),
            other => Err(format!("unknown reclamation mode `{other}`")),
        }
    }
}

/// Pins the current thread. Nothing retired after this call is freed until
/// the guard drops.
#[inline]
pub fn pin() -> Guard {
    crossbeam_epoch::pin()
}

/// Releases one slot-owned strong count of `ptr` once the epoch allows it.
///
/// # Safety
/// `ptr` must come from `Arc::into_raw` and the caller must own the strong
/// count being released (it won the CAS that unlinked it).
pub(crate) unsafe fn retire<T>(guard: &Guard, mode: ReclaimMode, ptr: *const T) {
    RETIRED.fetch_add(1, Ordering::Relaxed);
    match mode {
        ReclaimMode::Leak => {}
        ReclaimMode::Epoch => {
            let ptr = SendPtr(ptr);
            guard.defer_unchecked(move || {
                let ptr = ptr;
                drop(Arc::from_raw(ptr.0));
            });
        }
    }
}

/// Takes an extra strong count on an object reached through a slot.
///
/// # Safety
/// `r` must point into a live `Arc` allocation, which holds for anything
/// read from a slot while pinned.
#[inline]
pub(crate) unsafe fn arc_from_ref<T>(r: &T) -> Arc<T> {
    let p = r as *const T;
    Arc::increment_strong_count(p);
    Arc::from_raw(p)
}

struct SendPtr<T>(*const T);
unsafe impl<T> Send for SendPtr<T> {}

/// Repeatedly pins and flushes so that pending deferred drops get a chance
/// to run. Only meaningful in quiescent states.
pub fn flush() {
    for _ in 0..256 {
        let g = pin();
        g.flush();
    }
}

const STRIPES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ObjectKind {
    Internal = 0,
    Leaf = 1,
    Empty = 2,
    Descriptor = 3,
}

struct Striped {
    cells: [[CachePadded<AtomicIsize>; 4]; STRIPES],
}

static LIVE: Striped = Striped {
    cells: [const { [const { CachePadded::new(AtomicIsize::new(0)) }; 4] }; STRIPES],
};
static RETIRED: AtomicUsize = AtomicUsize::new(0);
static NEXT_STRIPE: AtomicUsize = AtomicUsize::new(0);

thread_local! {
    static STRIPE: Cell<usize> = Cell::new(NEXT_STRIPE.fetch_add(1, Ordering::Relaxed) % STRIPES);
}

#[inline]
pub(crate) fn count_alloc(kind: ObjectKind) {
    let s = STRIPE.with(|s| s.get());
    LIVE.cells[s][kind as usize].fetch_add(1, Ordering::Relaxed);
}

#[inline]
pub(crate) fn count_free(kind: ObjectKind) {
    // thread-locals may already be gone while a thread exits and runs
    // deferred drops
    let s = STRIPE.try_with(|s| s.get()).unwrap_or(0);
    LIVE.cells[s][kind as usize].fetch_sub(1, Ordering::Relaxed);
}

/// Process-wide count of allocated, not yet freed objects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LiveObjects {
    pub internal: isize,
    pub leaf: isize,
    pub empty: isize,
    pub descriptors: isize,
}

impl LiveObjects {
    pub fn nodes(&self) -> isize {
        self.internal + self.leaf + self.empty
    }

    pub fn total(&self) -> isize {
        self.nodes() + self.descriptors
    }
}

/// Snapshot of the live-object counters.
pub fn live_objects() -> LiveObjects {
    let mut sums = [0isize; 4];
    for stripe in &LIVE.cells {
        for (k, c) in stripe.iter().enumerate() {
            sums[k] += c.load(Ordering::Relaxed);
        }
    }
    LiveObjects {
        internal: sums[0],
        leaf: sums[1],
        empty: sums[2],
        descriptors: sums[3],
    }
}

/// Number of slot references handed to [`retire`] so far.
pub fn retired_count() -> usize {
    RETIRED.load(Ordering::Relaxed)
}
