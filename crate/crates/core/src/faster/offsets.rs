use alloc::vec::Vec;

use crate::ring::Offset;

use super::FasterError;

/// Number of offsets a FAST-ER tree may test.
pub const FASTER_OFFSET_COUNT: usize = 48;

/// The shipped table: every lattice point with `4 <= dx² + dy² <= 17`,
/// outermost ring first. Index 0 is `(-1, 4)`.
pub const DEFAULT_FASTER_OFFSETS: [Offset; FASTER_OFFSET_COUNT] = [
    Offset::new(-1, 4), Offset::new(-4, 1), Offset::new(-4, -1), Offset::new(-1, -4),
    Offset::new(1, -4), Offset::new(4, -1), Offset::new(4, 1), Offset::new(1, 4),
    Offset::new(-4, 0), Offset::new(0, -4), Offset::new(4, 0), Offset::new(0, 4),
    Offset::new(-2, 3), Offset::new(-3, 2), Offset::new(-3, -2), Offset::new(-2, -3),
    Offset::new(2, -3), Offset::new(3, -2), Offset::new(3, 2), Offset::new(2, 3),
    Offset::new(-1, 3), Offset::new(-3, 1), Offset::new(-3, -1), Offset::new(-1, -3),
    Offset::new(1, -3), Offset::new(3, -1), Offset::new(3, 1), Offset::new(1, 3),
    Offset::new(-3, 0), Offset::new(0, -3), Offset::new(3, 0), Offset::new(0, 3),
    Offset::new(-2, 2), Offset::new(-2, -2), Offset::new(2, -2), Offset::new(2, 2),
    Offset::new(-1, 2), Offset::new(-2, 1), Offset::new(-2, -1), Offset::new(-1, -2),
    Offset::new(1, -2), Offset::new(2, -1), Offset::new(2, 1), Offset::new(1, 2),
    Offset::new(-2, 0), Offset::new(0, -2), Offset::new(2, 0), Offset::new(0, 2),
];

/// The eight rotations and reflections of the pixel lattice. Element 0 is
/// the identity; elements 0..4 are rotations by multiples of 90°.
pub fn dihedral(g: usize, o: Offset) -> Offset {
    let (dx, dy) = (o.dx, o.dy);
    let (rx, ry) = match g % 4 {
        0 => (dx, dy),
        1 => (-dy, dx),
        2 => (-dx, -dy),
        _ => (dy, -dx),
    };
    if g < 4 {
        Offset::new(rx, ry)
    } else {
        Offset::new(-rx, ry)
    }
}

/// A validated 48-entry offset table, closed under the eight lattice
/// symmetries, with the permutation each symmetry induces on indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FasterOffsets {
    table: [Offset; FASTER_OFFSET_COUNT],
    perms: [[u8; FASTER_OFFSET_COUNT]; 8],
}

impl Default for FasterOffsets {
    fn default() -> Self {
        Self::new(&DEFAULT_FASTER_OFFSETS).expect("shipped table is valid")
    }
}

impl FasterOffsets {
    /// Requires 48 distinct non-zero offsets, closure under rotation and
    /// reflection, and `(-1, 4)` at index 0 whenever the table contains it.
    pub fn new(table: &[Offset]) -> Result<Self, FasterError> {
        if table.len() != FASTER_OFFSET_COUNT {
            return Err(FasterError::OffsetCount(table.len()));
        }
        let anchor = Offset::new(-1, 4);
        if table.contains(&anchor) && table[0] != anchor {
            return Err(FasterError::AnchorOffset);
        }
        for (i, o) in table.iter().enumerate() {
            if o.dx == 0 && o.dy == 0 {
                return Err(FasterError::ZeroOffset);
            }
            if table[..i].contains(o) {
                return Err(FasterError::DuplicateOffset(*o));
            }
        }
        let mut perms = [[0u8; FASTER_OFFSET_COUNT]; 8];
        for (g, perm) in perms.iter_mut().enumerate() {
            for (i, o) in table.iter().enumerate() {
                let image = dihedral(g, *o);
                let j = table
                    .iter()
                    .position(|&q| q == image)
                    .ok_or(FasterError::NotSymmetric(*o))?;
                perm[i] = j as u8;
            }
        }
        let mut fixed = [Offset::new(0, 0); FASTER_OFFSET_COUNT];
        fixed.copy_from_slice(table);
        Ok(Self { table: fixed, perms })
    }

    pub fn as_slice(&self) -> &[Offset] {
        &self.table
    }

    /// Index of the offset symmetry `g` maps offset `i` to.
    pub fn permuted(&self, g: usize, i: usize) -> usize {
        self.perms[g][i] as usize
    }

    /// The table with symmetry `g` applied to every entry.
    pub fn transformed(&self, g: usize) -> Vec<Offset> {
        self.table.iter().map(|&o| dihedral(g, o)).collect()
    }

    /// Largest Chebyshev magnitude in the table.
    pub fn margin(&self) -> usize {
        self.table.iter().map(|o| o.magnitude()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_shape() {
        let t = FasterOffsets::default();
        assert_eq!(t.as_slice()[0], Offset::new(-1, 4));
        assert_eq!(t.margin(), 4);
        for o in t.as_slice() {
            let r2 = o.dx * o.dx + o.dy * o.dy;
            assert!((4..=17).contains(&r2));
        }
        // Exactly the lattice points of the annulus.
        let count = (-5..=5)
            .flat_map(|x: i32| (-5..=5).map(move |y: i32| x * x + y * y))
            .filter(|r2| (4..=17).contains(r2))
            .count();
        assert_eq!(count, FASTER_OFFSET_COUNT);
    }

    #[test]
    fn symmetries_form_a_group_of_permutations() {
        let t = FasterOffsets::default();
        for g in 0..8 {
            let mut seen = [false; FASTER_OFFSET_COUNT];
            for i in 0..FASTER_OFFSET_COUNT {
                seen[t.permuted(g, i)] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
        for i in 0..FASTER_OFFSET_COUNT {
            assert_eq!(t.permuted(0, i), i);
            // Four quarter turns are the identity.
            let mut j = i;
            for _ in 0..4 {
                j = t.permuted(1, j);
            }
            assert_eq!(j, i);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        let mut v = DEFAULT_FASTER_OFFSETS.to_vec();
        assert_eq!(FasterOffsets::new(&v[..47]), Err(FasterError::OffsetCount(47)));
        v.swap(0, 1);
        assert_eq!(FasterOffsets::new(&v), Err(FasterError::AnchorOffset));
        v.swap(0, 1);
        v[47] = Offset::new(5, 5);
        assert!(matches!(FasterOffsets::new(&v), Err(FasterError::NotSymmetric(_))));
        v[47] = v[46];
        assert!(matches!(FasterOffsets::new(&v), Err(FasterError::DuplicateOffset(_))));
    }
}
