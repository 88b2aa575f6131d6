//! Routing geometry shared by every tree variant.
//!
//! Regions are square, half-open on both axes, and addressed by their
//! upper-left corner. A point at exactly the midpoint of an axis belongs to
//! the east/south half.

use std::cmp::Ordering;
use std::fmt;

/// A two-dimensional key.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An axis-aligned region `[x, x + w) x [y, y + h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}x{}]", self.x, self.y, self.w, self.h)
    }
}

/// One of the four children of an internal node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quadrant {
    Nw = 0,
    Ne = 1,
    Sw = 2,
    Se = 3,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Nw, Quadrant::Ne, Quadrant::Sw, Quadrant::Se];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Quadrant::Nw => "nw",
            Quadrant::Ne => "ne",
            Quadrant::Sw => "sw",
            Quadrant::Se => "se",
        }
    }
}

/// Geometry precondition failures. These indicate a caller bug: the trees
/// reject out-of-range keys before routing them.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("point {point} lies outside region {region}")]
    OutsideRegion { point: Point, region: Region },
    #[error("region must have positive finite extent, got {0}")]
    Degenerate(Region),
}

impl Region {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        let r = Region { x, y, w, h };
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite() && x.is_finite() && y.is_finite())
        {
            return Err(GeometryError::Degenerate(r));
        }
        Ok(r)
    }

    /// The square `[0, range)^2`.
    pub fn square(range: f64) -> Result<Self, GeometryError> {
        Region::new(0.0, 0.0, range, range)
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.x <= p.x && p.x < self.x + self.w && self.y <= p.y && p.y < self.y + self.h
    }

    /// Quadrant routing without the containment check, used on hot paths
    /// where the key is already known to be inside.
    #[inline]
    pub(crate) fn route(&self, p: Point) -> Quadrant {
        if p.x < self.x + self.w / 2.0 {
            if p.y < self.y + self.h / 2.0 {
                Quadrant::Nw
            } else {
                Quadrant::Sw
            }
        } else if p.y < self.y + self.h / 2.0 {
            Quadrant::Ne
        } else {
            Quadrant::Se
        }
    }

    /// The child region for `q`.
    #[inline]
    pub fn subregion(&self, q: Quadrant) -> Region {
        let w = self.w / 2.0;
        let h = self.h / 2.0;
        match q {
            Quadrant::Nw => Region { x: self.x, y: self.y, w, h },
            Quadrant::Ne => Region { x: self.x + w, y: self.y, w, h },
            Quadrant::Sw => Region { x: self.x, y: self.y + h, w, h },
            Quadrant::Se => Region { x: self.x + w, y: self.y + h, w, h },
        }
    }
}

/// Selects the quadrant of `r` that holds `p`.
pub fn quadrant_of(r: &Region, p: Point) -> Result<Quadrant, GeometryError> {
    if !r.contains(p) {
        return Err(GeometryError::OutsideRegion { point: p, region: *r });
    }
    Ok(r.route(p))
}

/// The child region of `r` in direction `q`.
pub fn subregion(r: &Region, q: Quadrant) -> Region {
    r.subregion(q)
}

/// Total order on square regions: `x`, then `y`, then `w`.
///
/// Two distinct internal nodes of one tree never compare equal, so this
/// order fixes which of two parents a move flags first.
pub fn spatial_order(a: &Region, b: &Region) -> Ordering {
    a.x.total_cmp(&b.x)
        .then(a.y.total_cmp(&b.y))
        .then(a.w.total_cmp(&b.w))
}

/// Maps a 2D key to a scalar as `x * range + y`. Only the harness uses it.
pub fn flatten_key(p: Point, range: f64) -> f64 {
    p.x * range + p.y
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x: f64, y: f64, w: f64) -> Region {
        Region::new(x, y, w, w).unwrap()
    }

    #[test]
    fn quadrant_examples() {
        let root = r(0.0, 0.0, 16.0);
        assert_eq!(quadrant_of(&root, Point::new(3.0, 2.0)).unwrap(), Quadrant::Nw);
        assert_eq!(quadrant_of(&root, Point::new(8.0, 8.0)).unwrap(), Quadrant::Se);
        assert_eq!(quadrant_of(&root, Point::new(12.0, 3.0)).unwrap(), Quadrant::Ne);
        assert_eq!(quadrant_of(&root, Point::new(3.0, 12.0)).unwrap(), Quadrant::Sw);
    }

    #[test]
    fn quadrant_outside_is_an_error() {
        let root = r(0.0, 0.0, 16.0);
        assert!(quadrant_of(&root, Point::new(16.0, 0.0)).is_err());
        assert!(quadrant_of(&root, Point::new(-0.5, 3.0)).is_err());
        assert!(quadrant_of(&root, Point::new(f64::NAN, 3.0)).is_err());
    }

    #[test]
    fn subregion_examples() {
        assert_eq!(subregion(&r(0.0, 0.0, 16.0), Quadrant::Nw), r(0.0, 0.0, 8.0));
        assert_eq!(subregion(&r(0.0, 0.0, 16.0), Quadrant::Se), r(8.0, 8.0, 8.0));
        assert_eq!(subregion(&r(8.0, 8.0, 8.0), Quadrant::Sw), r(8.0, 12.0, 4.0));
        assert_eq!(subregion(&r(8.0, 8.0, 8.0), Quadrant::Ne), r(12.0, 8.0, 4.0));
    }

    #[test]
    fn spatial_order_examples() {
        assert_eq!(spatial_order(&r(0.0, 0.0, 8.0), &r(0.0, 8.0, 8.0)), Ordering::Less);
        assert_eq!(spatial_order(&r(4.0, 0.0, 4.0), &r(0.0, 0.0, 16.0)), Ordering::Greater);
        assert_eq!(spatial_order(&r(2.0, 2.0, 2.0), &r(2.0, 2.0, 2.0)), Ordering::Equal);
        // a child sharing its parent's corner sorts before the parent
        assert_eq!(spatial_order(&r(0.0, 0.0, 4.0), &r(0.0, 0.0, 8.0)), Ordering::Less);
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten_key(Point::new(3.0, 7.0), 10.0), 37.0);
        assert_eq!(flatten_key(Point::new(0.0, 0.0), 10.0), 0.0);
        assert_eq!(flatten_key(Point::new(1.0, 2.0), 1000.0), 1002.0);
    }

    #[test]
    fn flatten_is_injective_on_integer_grid() {
        let range = 100.0;
        let mut seen = std::collections::HashSet::new();
        for x in 0..100 {
            for y in 0..100 {
                let k = flatten_key(Point::new(x as f64, y as f64), range);
                assert!(seen.insert(k.to_bits()), "collision at ({x}, {y})");
            }
        }
        assert_eq!(seen.len(), 10_000);
    }

    #[test]
    fn degenerate_regions_rejected() {
        assert!(Region::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(Region::new(0.0, 0.0, -1.0, -1.0).is_err());
        assert!(Region::square(f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn quadrant_partitions_region(
            exp in 0i32..40,
            fx in 0.0f64..1.0,
            fy in 0.0f64..1.0,
            ox in -1000i32..1000,
            oy in -1000i32..1000,
        ) {
            let w = 2f64.powi(exp);
            let reg = r(ox as f64 * w, oy as f64 * w, w);
            let p = Point::new(reg.x + fx * w, reg.y + fy * w);
            prop_assume!(reg.contains(p));
            let q = quadrant_of(&reg, p).unwrap();
            prop_assert!(reg.subregion(q).contains(p));
            let holders = Quadrant::ALL.iter().filter(|&&c| reg.subregion(c).contains(p)).count();
            prop_assert_eq!(holders, 1);
        }

        #[test]
        fn spatial_order_is_a_strict_total_order(
            a in (0u8..8, 0u8..8, 0u8..4),
            b in (0u8..8, 0u8..8, 0u8..4),
            c in (0u8..8, 0u8..8, 0u8..4),
        ) {
            let mk = |(x, y, e): (u8, u8, u8)| r(x as f64, y as f64, 2f64.powi(e as i32));
            let (ra, rb, rc) = (mk(a), mk(b), mk(c));
            let ab = spatial_order(&ra, &rb);
            prop_assert_eq!(ab, spatial_order(&rb, &ra).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if ab == Ordering::Less && spatial_order(&rb, &rc) == Ordering::Less {
                prop_assert_eq!(spatial_order(&ra, &rc), Ordering::Less);
            }
        }
    }
}
