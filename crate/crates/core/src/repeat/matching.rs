use alloc::vec;
use alloc::vec::Vec;

use crate::keypoint::Point;

/// Above this many points the index buckets them on a grid.
pub const GRID_THRESHOLD: usize = 10_000;

/// Answers "is any detection within `epsilon` of this position" for one frame.
/// Both layouts apply the same `dx² + dy² <= epsilon²` test, so they agree
/// exactly.
#[derive(Debug, Clone)]
pub enum PointIndex {
    Brute { points: Vec<(f64, f64)>, eps2: f64 },
    Grid(Grid),
}

#[derive(Debug, Clone)]
pub struct Grid {
    cell: f64,
    cols: usize,
    rows: usize,
    x0: f64,
    y0: f64,
    /// Bucket `k` holds `points[starts[k]..starts[k + 1]]`.
    starts: Vec<usize>,
    points: Vec<(f64, f64)>,
    eps2: f64,
}

impl PointIndex {
    /// Brute force below [`GRID_THRESHOLD`] points, grid above.
    pub fn new(points: &[Point], epsilon: f64) -> Self {
        if points.len() < GRID_THRESHOLD {
            Self::brute(points, epsilon)
        } else {
            Self::grid(points, epsilon)
        }
    }

    pub fn brute(points: &[Point], epsilon: f64) -> Self {
        PointIndex::Brute {
            points: points.iter().map(|p| (p.x as f64, p.y as f64)).collect(),
            eps2: epsilon * epsilon,
        }
    }

    pub fn grid(points: &[Point], epsilon: f64) -> Self {
        assert!(epsilon > 0.0, "epsilon must be positive");
        let eps2 = epsilon * epsilon;
        if points.is_empty() {
            return PointIndex::Brute {
                points: Vec::new(),
                eps2,
            };
        }
        let cell = epsilon;
        let x0 = points.iter().map(|p| p.x).min().unwrap() as f64;
        let y0 = points.iter().map(|p| p.y).min().unwrap() as f64;
        let x1 = points.iter().map(|p| p.x).max().unwrap() as f64;
        let y1 = points.iter().map(|p| p.y).max().unwrap() as f64;
        let cols = ((x1 - x0) / cell) as usize + 1;
        let rows = ((y1 - y0) / cell) as usize + 1;
        let bucket = |p: &Point| {
            let cx = ((p.x as f64 - x0) / cell) as usize;
            let cy = ((p.y as f64 - y0) / cell) as usize;
            cy * cols + cx
        };
        let mut starts = vec![0usize; cols * rows + 1];
        for p in points {
            starts[bucket(p) + 1] += 1;
        }
        for k in 1..starts.len() {
            starts[k] += starts[k - 1];
        }
        let mut fill = starts.clone();
        let mut sorted = vec![(0.0, 0.0); points.len()];
        for p in points {
            let b = bucket(p);
            sorted[fill[b]] = (p.x as f64, p.y as f64);
            fill[b] += 1;
        }
        PointIndex::Grid(Grid {
            cell,
            cols,
            rows,
            x0,
            y0,
            starts,
            points: sorted,
            eps2,
        })
    }

    /// True if some indexed point lies within `epsilon` of `(x, y)`.
    pub fn any_within(&self, x: f64, y: f64) -> bool {
        let near = |eps2: f64, &(px, py): &(f64, f64)| {
            let (dx, dy) = (px - x, py - y);
            dx * dx + dy * dy <= eps2
        };
        match self {
            PointIndex::Brute { points, eps2 } => points.iter().any(|p| near(*eps2, p)),
            PointIndex::Grid(g) => {
                let fx = libm::floor((x - g.x0) / g.cell);
                let fy = libm::floor((y - g.y0) / g.cell);
                let lo_x = (fx - 1.0).max(0.0);
                let lo_y = (fy - 1.0).max(0.0);
                let hi_x = (fx + 1.0).min(g.cols as f64 - 1.0);
                let hi_y = (fy + 1.0).min(g.rows as f64 - 1.0);
                if lo_x > hi_x || lo_y > hi_y {
                    return false;
                }
                for cy in lo_y as usize..=hi_y as usize {
                    for cx in lo_x as usize..=hi_x as usize {
                        let k = cy * g.cols + cx;
                        if g.points[g.starts[k]..g.starts[k + 1]].iter().any(|p| near(g.eps2, p)) {
                            return true;
                        }
                    }
                }
                false
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_and_brute_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point> = (0..3000)
            .map(|_| Point::new(rng.random_range(0..400), rng.random_range(0..300)))
            .collect();
        for eps in [0.5, 1.0, 2.5, 5.0, 13.0] {
            let (b, g) = (PointIndex::brute(&pts, eps), PointIndex::grid(&pts, eps));
            for _ in 0..2000 {
                let x = rng.random_range(-20.0..420.0);
                let y = rng.random_range(-20.0..320.0);
                assert_eq!(b.any_within(x, y), g.any_within(x, y), "({x}, {y}) eps {eps}");
            }
            // Exactly on the radius counts as a match.
            let p = pts[0];
            assert!(g.any_within(p.x as f64 + eps, p.y as f64));
        }
    }

    #[test]
    fn empty_index_matches_nothing() {
        assert!(!PointIndex::grid(&[], 5.0).any_within(1.0, 1.0));
        assert!(!PointIndex::brute(&[], 5.0).any_within(1.0, 1.0));
    }
}
