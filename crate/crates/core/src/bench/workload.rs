use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{BenchError, KeyType};
use crate::checker::DictOp;
use crate::geometry::Point;
use crate::reclaim::ReclaimMode;
use crate::variants::Variant;

/// Operation mix as percentages of insert, remove, contain and move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mix {
    pub insert: u8,
    pub remove: u8,
    pub contain: u8,
    pub moves: u8,
}

impl Mix {
    pub fn new(insert: u8, remove: u8, contain: u8, moves: u8) -> Result<Self, BenchError> {
        let sum = insert as u32 + remove as u32 + contain as u32 + moves as u32;
        if sum != 100 {
            return Err(BenchError::InvalidMix(format!("{insert}:{remove}:{contain}:{moves}")));
        }
        Ok(Mix {
            insert,
            remove,
            contain,
            moves,
        })
    }

    /// Picks an operation by the mix and its key(s) uniformly from `keys`.
    /// A move draws its two keys independently.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, keys: &[Point]) -> DictOp {
        let r = rng.gen_range(0..100u8);
        let mut key = || keys[rng.gen_range(0..keys.len())];
        if r < self.insert {
            DictOp::Insert(key())
        } else if r < self.insert + self.remove {
            DictOp::Remove(key())
        } else if r < self.insert + self.remove + self.contain {
            DictOp::Contains(key())
        } else {
            let old = key();
            DictOp::Move { old, new: key() }
        }
    }
}

impl fmt::Display for Mix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.insert, self.remove, self.contain, self.moves)
    }
}

impl FromStr for Mix {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<u8> = s
            .split(':')
            .map(|p| p.trim().parse::<u8>())
            .collect::<Result<_, _>>()
            .map_err(|_| BenchError::InvalidMix(s.to_string()))?;
        match parts[..] {
            [i, r, c, m] => Mix::new(i, r, c, m).map_err(|_| BenchError::InvalidMix(s.to_string())),
            _ => Err(BenchError::InvalidMix(s.to_string())),
        }
    }
}

/// Everything one benchmark configuration needs.
#[derive(Clone, Debug)]
pub struct WorkloadSpec {
    pub algo: Variant,
    pub threads: usize,
    pub duration_ms: u64,
    pub range: f64,
    /// Size of the key set.
    pub keys: usize,
    pub key_type: KeyType,
    pub mix: Mix,
    /// Fraction of the key set inserted before each run.
    pub prefill: f64,
    pub runs: usize,
    pub warmup: usize,
    pub seed: u64,
    pub reclaim: ReclaimMode,
    /// When set, every thread performs exactly this many operations instead
    /// of running for `duration_ms`.
    pub ops_per_thread: Option<u64>,
}

impl WorkloadSpec {
    /// Defaults: 1 thread, 1 s runs, 50% prefill, 8 runs of which 3 warm up.
    pub fn new(algo: Variant, range: f64, keys: usize, mix: Mix) -> Self {
        WorkloadSpec {
            algo,
            threads: 1,
            duration_ms: 1000,
            range,
            keys,
            key_type: KeyType::Int,
            mix,
            prefill: 0.5,
            runs: 8,
            warmup: 3,
            seed: 1,
            reclaim: ReclaimMode::Epoch,
            ops_per_thread: None,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.mix.moves > 0 && !self.algo.supports_move() {
            return Err(BenchError::MoveUnsupported(self.algo));
        }
        let bad = |m: &str| Err(BenchError::InvalidSpec(m.to_string()));
        if !(0.0..=1.0).contains(&self.prefill) {
            return bad("prefill fraction must be in [0, 1]");
        }
        if self.threads == 0 {
            return bad("need at least one thread");
        }
        if self.keys == 0 {
            return bad("need at least one key");
        }
        if self.warmup >= self.runs {
            return bad("warmup runs must be fewer than runs");
        }
        Ok(())
    }

    /// Number of keys inserted before each run.
    pub fn prefill_count(&self) -> usize {
        ((self.prefill * self.keys as f64).ceil() as usize).min(self.keys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mix_parse_and_display() {
        let m: Mix = "10:10:0:80".parse().unwrap();
        assert_eq!(m, Mix::new(10, 10, 0, 80).unwrap());
        assert_eq!(m.to_string(), "10:10:0:80");
        assert!("50:50:0".parse::<Mix>().is_err());
        assert!("50:50:1:0".parse::<Mix>().is_err());
        assert!("a:b:c:d".parse::<Mix>().is_err());
    }

    #[test]
    fn mix_proportions_within_one_percent() {
        let m = Mix::new(20, 30, 40, 10).unwrap();
        let keys = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 200_000;
        let mut c = [0usize; 4];
        for _ in 0..n {
            c[match m.sample(&mut rng, &keys) {
                DictOp::Insert(_) => 0,
                DictOp::Remove(_) => 1,
                DictOp::Contains(_) => 2,
                DictOp::Move { .. } => 3,
            }] += 1;
        }
        for (got, want) in c.iter().zip([20.0, 30.0, 40.0, 10.0]) {
            let pct = 100.0 * *got as f64 / n as f64;
            assert!((pct - want).abs() <= 1.0, "{pct} vs {want}");
        }
    }

    #[test]
    fn qc_with_move_is_rejected() {
        let s = WorkloadSpec::new(Variant::Qc, 10.0, 100, "25:25:0:50".parse().unwrap());
        assert_eq!(s.validate(), Err(BenchError::MoveUnsupported(Variant::Qc)));
        let s = WorkloadSpec::new(Variant::QbO, 10.0, 100, "25:25:0:50".parse().unwrap());
        assert!(s.validate().is_ok());
    }

    #[test]
    fn prefill_rounds_up() {
        let mut s = WorkloadSpec::new(Variant::QbO, 10.0, 7, "50:50:0:0".parse().unwrap());
        assert_eq!(s.prefill_count(), 4);
        s.prefill = 1.0;
        assert_eq!(s.prefill_count(), 7);
        s.prefill = 0.0;
        assert_eq!(s.prefill_count(), 0);
    }
}
