//! The 16-pixel Bresenham circle of radius 3.

/// Pixel displacement relative to a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Offset {
    pub dx: i32,
    pub dy: i32,
}

impl Offset {
    pub const fn new(dx: i32, dy: i32) -> Self {
        Self { dx, dy }
    }

    /// Chebyshev magnitude.
    pub fn magnitude(self) -> usize {
        self.dx.unsigned_abs().max(self.dy.unsigned_abs()) as usize
    }

    /// Linear displacement in a row-major buffer with the given stride.
    #[inline]
    pub fn delta(self, stride: usize) -> isize {
        self.dy as isize * stride as isize + self.dx as isize
    }
}

impl core::ops::Neg for Offset {
    type Output = Offset;
    fn neg(self) -> Offset {
        Offset::new(-self.dx, -self.dy)
    }
}

impl core::ops::Add for Offset {
    type Output = Offset;
    fn add(self, o: Offset) -> Offset {
        Offset::new(self.dx + o.dx, self.dy + o.dy)
    }
}

/// Index 1 is straight up; indices advance clockwise (with `y` pointing down).
const RING: [Offset; 16] = [
    Offset::new(0, -3),
    Offset::new(1, -3),
    Offset::new(2, -2),
    Offset::new(3, -1),
    Offset::new(3, 0),
    Offset::new(3, 1),
    Offset::new(2, 2),
    Offset::new(1, 3),
    Offset::new(0, 3),
    Offset::new(-1, 3),
    Offset::new(-2, 2),
    Offset::new(-3, 1),
    Offset::new(-3, 0),
    Offset::new(-3, -1),
    Offset::new(-2, -2),
    Offset::new(-1, -3),
];

/// The ring, indexed `1..=16` through [`RingOffsets::index`] or `0..16` as a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingOffsets([Offset; 16]);

impl RingOffsets {
    /// Offset at 1-based ring index `i`.
    pub fn index(&self, i: usize) -> Offset {
        assert!((1..=16).contains(&i), "ring index {i} out of 1..=16");
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[Offset] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Offset> + '_ {
        self.0.iter().copied()
    }
}

pub const RING_MARGIN: usize = 3;

pub fn ring_offsets() -> RingOffsets {
    RingOffsets(RING)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_indices() {
        let ring = ring_offsets();
        assert_eq!(ring.index(1), Offset::new(0, -3));
        assert_eq!(ring.index(9), Offset::new(0, 3));
        assert_eq!(ring.index(5), -ring.index(13));
    }

    #[test]
    fn antipodal_and_distinct() {
        let ring = ring_offsets();
        for i in 0..16 {
            let a = ring.as_slice()[i];
            let b = ring.as_slice()[(i + 8) % 16];
            assert_eq!(a + b, Offset::new(0, 0));
            assert!((2..=3).contains(&a.magnitude()));
            assert!((8..=10).contains(&(a.dx * a.dx + a.dy * a.dy)));
            for j in 0..i {
                assert_ne!(a, ring.as_slice()[j]);
            }
        }
    }

    #[test]
    fn matches_bresenham_enumeration() {
        // Every lattice point whose distance from the origin rounds to 3.
        let mut circle: alloc::vec::Vec<Offset> = alloc::vec::Vec::new();
        for dy in -4..=4i32 {
            for dx in -4..=4i32 {
                let r = libm::sqrt((dx * dx + dy * dy) as f64);
                if libm::round(r) == 3.0 {
                    circle.push(Offset::new(dx, dy));
                }
            }
        }
        circle.sort();
        let mut ring: alloc::vec::Vec<Offset> = ring_offsets().iter().collect();
        ring.sort();
        assert_eq!(circle, ring);
    }
}
