//! Uniform detector interface used by the repeatability harness.

use alloc::vec::Vec;

use crate::baselines::{harris_response, random_order, response_maxima, shi_tomasi_response, structure_tensor};
use crate::image::GrayImage;
use crate::keypoint::{Keypoint, Point};
use crate::ring::{Offset, RING_MARGIN};
use crate::runtime::{detect, nearest_cut, nonmax_suppress, rank_by_score, score_points, tie_boundaries, CompiledTree};
use crate::segment::{detect_fast_n, segment_score};
use crate::tree::TernaryTree;

/// Detections of one frame in decreasing order of strength.
///
/// `cuts`, when present, lists the prefix lengths that do not split a group
/// of equal scores; only those lengths are achievable by thresholding.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ranking {
    points: Vec<Point>,
    cuts: Option<Vec<usize>>,
}

impl Ranking {
    /// Any prefix length is allowed.
    pub fn exact(points: Vec<Point>) -> Self {
        Self { points, cuts: None }
    }

    /// Ranks by descending score (raster order within ties); prefixes must
    /// not split ties when `respect_ties` is set.
    pub fn from_scored<S: PartialOrd + Copy>(keypoints: &[Keypoint<S>], respect_ties: bool) -> Self {
        let ranked = rank_by_score(keypoints);
        let cuts = respect_ties.then(|| tie_boundaries(&ranked));
        Self {
            points: ranked.iter().map(|k| k.point()).collect(),
            cuts,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The strongest detections, as close to `n` of them as the ranking allows.
    pub fn take(&self, n: usize) -> &[Point] {
        let k = match &self.cuts {
            None => n.min(self.points.len()),
            Some(cuts) => nearest_cut(cuts, n),
        };
        &self.points[..k]
    }
}

/// A feature detector as seen by the benchmark. `frame` is the index of the
/// image within its sequence; only image-independent detectors use it.
pub trait Detector: Sync {
    fn rank(&self, img: &GrayImage, frame: usize) -> Ranking;
}

/// Direct segment test at threshold `t`, scored, suppressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastRef {
    pub n: usize,
    pub t: u8,
}

impl FastRef {
    pub fn keypoints(&self, img: &GrayImage) -> Vec<Keypoint> {
        let scored: Vec<Keypoint> = detect_fast_n(img, self.n, self.t)
            .into_iter()
            .filter_map(|p| segment_score(img, p.x as usize, p.y as usize, self.n).map(|s| Keypoint::new(p.x, p.y, s)))
            .collect();
        nonmax_suppress(&scored)
    }
}

impl Detector for FastRef {
    fn rank(&self, img: &GrayImage, _frame: usize) -> Ranking {
        Ranking::from_scored(&self.keypoints(img), true)
    }
}

/// A learned ternary tree at threshold `t`, scored by bisection, suppressed.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeDetector {
    pub tree: TernaryTree,
    pub offsets: Vec<Offset>,
    pub t: u8,
}

impl TreeDetector {
    pub fn keypoints(&self, img: &GrayImage) -> Vec<Keypoint> {
        let compiled = CompiledTree::new(&self.tree, &self.offsets, img.width());
        nonmax_suppress(&score_points(&compiled, img, &detect(&compiled, img, self.t)))
    }
}

impl Detector for TreeDetector {
    fn rank(&self, img: &GrayImage, _frame: usize) -> Ranking {
        Ranking::from_scored(&self.keypoints(img), true)
    }
}

/// Which structure-tensor response to rank by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseKind {
    Harris { k: f64 },
    ShiTomasi,
}

/// Response maxima of a Gaussian-smoothed structure tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseDetector {
    pub kind: ResponseKind,
    pub sigma: f64,
    pub margin: usize,
}

impl ResponseDetector {
    pub fn keypoints(&self, img: &GrayImage) -> Vec<Keypoint<f64>> {
        let tensor = structure_tensor(img, self.sigma);
        let field = match self.kind {
            ResponseKind::Harris { k } => harris_response(&tensor, k),
            ResponseKind::ShiTomasi => shi_tomasi_response(&tensor),
        };
        response_maxima(&field, self.margin)
    }
}

impl Detector for ResponseDetector {
    fn rank(&self, img: &GrayImage, _frame: usize) -> Ranking {
        Ranking::from_scored(&self.keypoints(img), false)
    }
}

/// Uniformly scattered interior points, independent of the pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomDetector {
    pub seed: u64,
    pub margin: usize,
}

impl Default for RandomDetector {
    fn default() -> Self {
        Self {
            seed: 0,
            margin: RING_MARGIN,
        }
    }
}

impl RandomDetector {
    pub fn frame_seed(&self, frame: usize) -> u64 {
        self.seed ^ (frame as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

impl Detector for RandomDetector {
    fn rank(&self, img: &GrayImage, frame: usize) -> Ranking {
        Ranking::exact(random_order(img.width(), img.height(), self.margin, self.frame_seed(frame)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::make_test_square;
    use crate::learn::{build_tree, extract_training_data};
    use crate::ring::ring_offsets;

    #[test]
    fn take_respects_tie_groups() {
        let kps = [
            Keypoint::new(0, 0, 9u8),
            Keypoint::new(5, 0, 7),
            Keypoint::new(9, 0, 7),
            Keypoint::new(2, 4, 7),
            Keypoint::new(1, 8, 3),
        ];
        let r = Ranking::from_scored(&kps, true);
        assert_eq!(r.take(0).len(), 0);
        assert_eq!(r.take(1).len(), 1);
        assert_eq!(r.take(2).len(), 1);
        assert_eq!(r.take(3).len(), 4);
        assert_eq!(r.take(100).len(), 5);
        let e = Ranking::from_scored(&kps, false);
        assert_eq!(e.take(2), &[Point::new(0, 0), Point::new(5, 0)]);
    }

    #[test]
    fn learned_tree_matches_reference_on_square() {
        let img = make_test_square(32, 12, 200, 40);
        // Learned from the same image, so it is exact on every pixel of it.
        let tree = build_tree(&extract_training_data(core::slice::from_ref(&img), 9, 30)).unwrap();
        let compiled = CompiledTree::new(&tree, ring_offsets().as_slice(), img.width());
        assert_eq!(detect(&compiled, &img, 30), detect_fast_n(&img, 9, 30));
        let kps = FastRef { n: 9, t: 30 }.keypoints(&img);
        assert_eq!(kps.len(), 4);
    }

    #[test]
    fn random_detector_depends_on_frame_only() {
        let d = RandomDetector { seed: 4, margin: 3 };
        let a = GrayImage::filled(40, 30, 0);
        let b = GrayImage::filled(40, 30, 200);
        assert_eq!(d.rank(&a, 2), d.rank(&b, 2));
        assert_ne!(d.rank(&a, 2), d.rank(&a, 3));
    }
}
