use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BenchError;
use crate::geometry::Point;

/// Float keys are multiples of `1 / FLOAT_KEY_SCALE`.
pub const FLOAT_KEY_SCALE: f64 = 65536.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyType {
    /// Lattice points `(i, j)` with `0 <= i, j < range`.
    Int,
    /// Uniform doubles rounded down to a multiple of `2^-16`.
    Float,
}

impl fmt::Display for KeyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyType::Int => "int",
            KeyType::Float => "float",
        })
    }
}

impl FromStr for KeyType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "int" => Ok(KeyType::Int),
            "float" => Ok(KeyType::Float),
            _ => Err(format!("unknown key type `{s}` (expected int or float)")),
        }
    }
}

/// Draws `count` distinct keys inside `[0, range)^2`, deterministically
/// for a given `seed`. The order is random; callers prefill from the front.
///
/// In int mode with `count == range^2` the result is a permutation of the
/// full grid.
pub fn generate_keys(range: f64, count: usize, key_type: KeyType, seed: u64) -> Result<Vec<Point>, BenchError> {
    if !(range.is_finite() && range > 0.0) {
        return Err(BenchError::InvalidSpec(format!("range must be positive, got {range}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match key_type {
        KeyType::Int => {
            let side = range.ceil();
            let capacity = side * side;
            if count as f64 > capacity {
                return Err(BenchError::TooManyKeys { count, capacity });
            }
            let side = side as u64;
            if 2.0 * count as f64 >= capacity {
                let mut all: Vec<Point> = (0..side * side)
                    .map(|i| Point::new((i / side) as f64, (i % side) as f64))
                    .collect();
                all.shuffle(&mut rng);
                all.truncate(count);
                Ok(all)
            } else {
                let mut seen = HashSet::with_capacity(count);
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let (x, y) = (rng.gen_range(0..side), rng.gen_range(0..side));
                    if seen.insert((x, y)) {
                        out.push(Point::new(x as f64, y as f64));
                    }
                }
                Ok(out)
            }
        }
        KeyType::Float => {
            let steps = (range * FLOAT_KEY_SCALE).floor();
            let capacity = steps * steps;
            // keep rejection sampling cheap
            if 2.0 * count as f64 > capacity {
                return Err(BenchError::TooManyKeys { count, capacity });
            }
            let coord = |rng: &mut ChaCha8Rng| (rng.gen::<f64>() * steps).floor() / FLOAT_KEY_SCALE;
            let mut seen = HashSet::with_capacity(count);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let p = Point::new(coord(&mut rng), coord(&mut rng));
                if seen.insert((p.x.to_bits(), p.y.to_bits())) {
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}
