//! Detected positions and scored keypoints.

use core::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// Raster (row-major) ordering: by `y`, then `x`.
    pub fn raster_cmp(&self, other: &Point) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }

    pub fn chebyshev(&self, other: &Point) -> u32 {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.raster_cmp(other)
    }
}

/// A corner with its response. For segment-test detectors the score is the
/// largest threshold at which the pixel is still a corner (`u8`, in 1..=255).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint<S = u8> {
    pub x: u32,
    pub y: u32,
    pub score: S,
}

impl<S> Keypoint<S> {
    pub const fn new(x: u32, y: u32, score: S) -> Self {
        Self { x, y, score }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

pub fn sort_raster(points: &mut [Point]) {
    points.sort_unstable();
}
