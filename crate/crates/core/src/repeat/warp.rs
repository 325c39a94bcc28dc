use alloc::vec::Vec;

use super::RepeatError;
use crate::keypoint::Point;

/// 3×3 row-major matrix mapping homogeneous source coordinates to target ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography(pub [[f64; 3]; 3]);

impl Homography {
    pub const IDENTITY: Homography = Homography([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn translation(tx: f64, ty: f64) -> Self {
        Homography([[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]])
    }

    pub fn from_row_major(v: [f64; 9]) -> Self {
        Homography([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]])
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Maps `(x, y)`; `None` when the point goes to infinity.
    pub fn apply(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let m = &self.0;
        let w = m[2][0] * x + m[2][1] * y + m[2][2];
        if !(w.abs() > 1e-12) {
            return None;
        }
        Some((
            (m[0][0] * x + m[0][1] * y + m[0][2]) / w,
            (m[1][0] * x + m[1][1] * y + m[1][2]) / w,
        ))
    }

    /// `self` after `first`: maps through `first`, then `self`.
    pub fn compose(&self, first: &Homography) -> Homography {
        let (a, b) = (&self.0, &first.0);
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Homography(out)
    }

    /// Inverse via the adjugate, normalised so the bottom-right entry is
    /// positive.
    pub fn inverse(&self) -> Result<Homography, RepeatError> {
        let det = self.determinant();
        if !(det.abs() > 1e-12) {
            return Err(RepeatError::SingularHomography);
        }
        let m = &self.0;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let mut inv = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        let sign = if inv[2][2] / det < 0.0 { -1.0 } else { 1.0 };
        for row in &mut inv {
            for v in row {
                *v *= sign / det;
            }
        }
        Ok(Homography(inv))
    }
}

/// Per-pixel ground truth: where every source pixel lands in the target and
/// whether it is visible there.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMap {
    pub width: usize,
    pub height: usize,
    pub targets: Vec<(f32, f32)>,
    pub visible: Vec<bool>,
}

impl DenseMap {
    pub fn new(width: usize, height: usize, targets: Vec<(f32, f32)>, visible: Vec<bool>) -> Result<Self, RepeatError> {
        if targets.len() != width * height || visible.len() != width * height {
            return Err(RepeatError::DenseMapSize);
        }
        Ok(Self {
            width,
            height,
            targets,
            visible,
        })
    }
}

/// Ground-truth transfer of points from frame `i` to frame `j`.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpModel {
    Homography(Homography),
    Dense(DenseMap),
}

impl WarpModel {
    /// Validates the model: homographies must be non-singular.
    pub fn check(&self) -> Result<(), RepeatError> {
        match self {
            WarpModel::Homography(h) if !(h.determinant().abs() > 1e-12) => Err(RepeatError::SingularHomography),
            _ => Ok(()),
        }
    }
}

/// Where `p` appears in a `target_width`×`target_height` frame, or `None` if
/// it is occluded or falls outside the frame.
pub fn project(
    warp: &WarpModel,
    p: Point,
    target_width: usize,
    target_height: usize,
) -> Result<Option<(f64, f64)>, RepeatError> {
    let mapped = match warp {
        WarpModel::Homography(h) => {
            if !(h.determinant().abs() > 1e-12) {
                return Err(RepeatError::SingularHomography);
            }
            h.apply(p.x as f64, p.y as f64)
        }
        WarpModel::Dense(map) => {
            let (x, y) = (p.x as usize, p.y as usize);
            if x >= map.width || y >= map.height {
                return Ok(None);
            }
            let i = y * map.width + x;
            map.visible[i].then(|| (map.targets[i].0 as f64, map.targets[i].1 as f64))
        }
    };
    Ok(mapped.filter(|&(x, y)| {
        x >= 0.0 && y >= 0.0 && x <= (target_width - 1) as f64 && y <= (target_height - 1) as f64
    }))
}
