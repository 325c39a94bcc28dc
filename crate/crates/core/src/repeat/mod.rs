//! Repeatability of detectors over image sequences with known geometry.
//!
//! A detection in frame `i` is *useful* for the pair `(i, j)` when its
//! ground-truth position in frame `j` is visible and inside the frame, and
//! *repeated* when frame `j` has a detection within `epsilon` pixels of that
//! position. Counts are pooled over all pairs.

mod matching;
mod warp;

pub use matching::{PointIndex, GRID_THRESHOLD};
pub use warp::{project, DenseMap, Homography, WarpModel};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::detectors::{Detector, Ranking};
use crate::image::{add_gaussian_noise, GrayImage};
use crate::keypoint::Point;

/// Default matching radius in pixels.
pub const DEFAULT_EPSILON: f64 = 5.0;
/// Upper end of the feature-count axis.
pub const CURVE_MAX: usize = 2000;
/// Spacing of the default feature-count grid.
pub const CURVE_STEP: usize = 25;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RepeatError {
    #[error("homography is singular")]
    SingularHomography,
    #[error("dense map size does not match its source frame")]
    DenseMapSize,
    #[error("no warp for frame pair {from} -> {to}")]
    MissingWarp { from: usize, to: usize },
    #[error("frame index {0} out of range")]
    FrameIndex(usize),
    #[error("the sequence has no frames")]
    NoFrames,
    #[error("epsilon must be positive")]
    InvalidEpsilon,
    #[error("curve does not span 0..={CURVE_MAX} features")]
    CurveDomain,
}

/// Useful and repeated counts for one pair, or a pooled sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RepeatSample {
    pub useful: u64,
    pub repeated: u64,
}

impl RepeatSample {
    /// `repeated / useful`; zero when nothing is useful.
    pub fn ratio(&self) -> f64 {
        if self.useful == 0 {
            0.0
        } else {
            self.repeated as f64 / self.useful as f64
        }
    }
}

impl core::ops::Add for RepeatSample {
    type Output = RepeatSample;
    fn add(self, o: RepeatSample) -> RepeatSample {
        RepeatSample {
            useful: self.useful + o.useful,
            repeated: self.repeated + o.repeated,
        }
    }
}

impl core::iter::Sum for RepeatSample {
    fn sum<I: Iterator<Item = RepeatSample>>(iter: I) -> Self {
        iter.fold(RepeatSample::default(), |a, b| a + b)
    }
}

/// Counts for detections `det_i` against `det_j`, which lives in a
/// `target_width`×`target_height` frame. Several points of `det_i` may
/// match the same point of `det_j`.
pub fn pair_repeatability(
    det_i: &[Point],
    det_j: &[Point],
    warp: &WarpModel,
    target_width: usize,
    target_height: usize,
    epsilon: f64,
) -> Result<RepeatSample, RepeatError> {
    if !(epsilon > 0.0) {
        return Err(RepeatError::InvalidEpsilon);
    }
    warp.check()?;
    let index = PointIndex::new(det_j, epsilon);
    let mut sample = RepeatSample::default();
    for &p in det_i {
        if let Some((x, y)) = project(warp, p, target_width, target_height)? {
            sample.useful += 1;
            sample.repeated += index.any_within(x, y) as u64;
        }
    }
    Ok(sample)
}

/// Which ordered frame pairs a sequence is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairPolicy {
    /// Every `(i, j)` with `i != j`.
    #[default]
    AllOrdered,
    /// `(i, i + 1)` and `(i + 1, i)` only.
    Adjacent,
}

impl PairPolicy {
    pub fn pairs(self, frames: usize) -> Vec<(usize, usize)> {
        match self {
            PairPolicy::AllOrdered => (0..frames)
                .flat_map(|i| (0..frames).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect(),
            PairPolicy::Adjacent => (0..frames.saturating_sub(1))
                .flat_map(|i| [(i, i + 1), (i + 1, i)])
                .collect(),
        }
    }
}

/// Frames, the ground truth between them, and the pairs to evaluate.
#[derive(Debug, Clone)]
pub struct Benchmark {
    frames: Vec<GrayImage>,
    warps: BTreeMap<(usize, usize), WarpModel>,
    pairs: Vec<(usize, usize)>,
}

impl Benchmark {
    /// Validates that every pair has a usable warp from `warps`.
    pub fn new(
        frames: Vec<GrayImage>,
        warps: BTreeMap<(usize, usize), WarpModel>,
        pairs: Vec<(usize, usize)>,
    ) -> Result<Self, RepeatError> {
        if frames.is_empty() {
            return Err(RepeatError::NoFrames);
        }
        for &(i, j) in &pairs {
            for k in [i, j] {
                if k >= frames.len() {
                    return Err(RepeatError::FrameIndex(k));
                }
            }
            let warp = warps.get(&(i, j)).ok_or(RepeatError::MissingWarp { from: i, to: j })?;
            warp.check()?;
            if let WarpModel::Dense(map) = warp {
                if map.width != frames[i].width() || map.height != frames[i].height() {
                    return Err(RepeatError::DenseMapSize);
                }
            }
        }
        Ok(Self { frames, warps, pairs })
    }

    /// Frames related by homographies `to_base[k]` (frame `k` into a common
    /// base plane); pair warps are derived as `inverse(to_base[j]) * to_base[i]`.
    pub fn from_homographies(
        frames: Vec<GrayImage>,
        to_base: &[Homography],
        policy: PairPolicy,
    ) -> Result<Self, RepeatError> {
        if to_base.len() != frames.len() {
            return Err(RepeatError::FrameIndex(to_base.len().min(frames.len())));
        }
        let pairs = policy.pairs(frames.len());
        let mut warps = BTreeMap::new();
        for &(i, j) in &pairs {
            let h = to_base[j].inverse()?.compose(&to_base[i]);
            warps.insert((i, j), WarpModel::Homography(h));
        }
        Self::new(frames, warps, pairs)
    }

    pub fn frames(&self) -> &[GrayImage] {
        &self.frames
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn warp(&self, i: usize, j: usize) -> Option<&WarpModel> {
        self.warps.get(&(i, j))
    }

    /// The same geometry with every frame replaced by `f(index, frame)`.
    pub fn map_frames(&self, mut f: impl FnMut(usize, &GrayImage) -> GrayImage) -> Benchmark {
        Benchmark {
            frames: self.frames.iter().enumerate().map(|(k, img)| f(k, img)).collect(),
            warps: self.warps.clone(),
            pairs: self.pairs.clone(),
        }
    }

    /// Per-pair counts for fixed per-frame detections.
    pub fn pair_samples(&self, detections: &[&[Point]], epsilon: f64) -> Result<Vec<RepeatSample>, RepeatError> {
        self.pairs
            .iter()
            .map(|&(i, j)| {
                let target = &self.frames[j];
                pair_repeatability(
                    detections[i],
                    detections[j],
                    &self.warps[&(i, j)],
                    target.width(),
                    target.height(),
                    epsilon,
                )
            })
            .collect()
    }

    /// Pooled counts for fixed per-frame detections.
    pub fn pooled(&self, detections: &[&[Point]], epsilon: f64) -> Result<RepeatSample, RepeatError> {
        Ok(self.pair_samples(detections, epsilon)?.into_iter().sum())
    }

    /// Runs `detector` once on every frame.
    pub fn rank_all<D: Detector + ?Sized>(&self, detector: &D) -> Vec<Ranking> {
        rank_frames(&self.frames, detector)
    }
}

#[cfg(feature = "parallel")]
fn rank_frames<D: Detector + ?Sized>(frames: &[GrayImage], detector: &D) -> Vec<Ranking> {
    use rayon::prelude::*;
    frames.par_iter().enumerate().map(|(k, img)| detector.rank(img, k)).collect()
}

#[cfg(not(feature = "parallel"))]
fn rank_frames<D: Detector + ?Sized>(frames: &[GrayImage], detector: &D) -> Vec<Ranking> {
    frames.iter().enumerate().map(|(k, img)| detector.rank(img, k)).collect()
}

fn sample_at(bench: &Benchmark, rankings: &[Ranking], n: usize, epsilon: f64) -> Result<RepeatSample, RepeatError> {
    let dets: Vec<&[Point]> = rankings.iter().map(|r| r.take(n)).collect();
    bench.pooled(&dets, epsilon)
}

/// Pooled repeatability of `detector` at `n_features` per frame.
pub fn sequence_repeatability<D: Detector + ?Sized>(
    bench: &Benchmark,
    detector: &D,
    n_features: usize,
    epsilon: f64,
) -> Result<f64, RepeatError> {
    Ok(sample_at(bench, &bench.rank_all(detector), n_features, epsilon)?.ratio())
}

/// `0, 25, ..., 2000`.
pub fn default_counts() -> Vec<usize> {
    (0..=CURVE_MAX).step_by(CURVE_STEP).collect()
}

/// `(count, R)` for each requested per-frame feature count. A count with no
/// useful features scores 0.
pub fn repeatability_curve<D: Detector + ?Sized>(
    bench: &Benchmark,
    detector: &D,
    counts: &[usize],
    epsilon: f64,
) -> Result<Vec<(usize, f64)>, RepeatError> {
    Ok(repeatability_samples(bench, detector, counts, epsilon)?
        .into_iter()
        .map(|(n, s)| (n, s.ratio()))
        .collect())
}

/// Pooled counts behind each point of [`repeatability_curve`].
pub fn repeatability_samples<D: Detector + ?Sized>(
    bench: &Benchmark,
    detector: &D,
    counts: &[usize],
    epsilon: f64,
) -> Result<Vec<(usize, RepeatSample)>, RepeatError> {
    let rankings = bench.rank_all(detector);
    counts
        .iter()
        .map(|&n| Ok((n, sample_at(bench, &rankings, n, epsilon)?)))
        .collect()
}

/// The curve with every point lacking useful features (where R is
/// undefined) given the ratio of the nearest defined point, the lower count
/// on ties. All points are 0 when none is defined.
pub fn defined_curve(samples: &[(usize, RepeatSample)]) -> Vec<(usize, f64)> {
    samples
        .iter()
        .map(|&(n, s)| {
            if s.useful > 0 {
                return (n, s.ratio());
            }
            let nearest = samples
                .iter()
                .filter(|(_, d)| d.useful > 0)
                .min_by_key(|(m, _)| (m.abs_diff(n), *m));
            (n, nearest.map_or(0.0, |(_, d)| d.ratio()))
        })
        .collect()
}

/// Trapezoidal area under `curve` over `0..=2000` features. Points beyond
/// that range are cut at its end by linear interpolation.
pub fn area_under_curve(curve: &[(usize, f64)]) -> Result<f64, RepeatError> {
    let (Some(first), Some(last)) = (curve.first(), curve.last()) else {
        return Err(RepeatError::CurveDomain);
    };
    if first.0 > 0 || last.0 < CURVE_MAX {
        return Err(RepeatError::CurveDomain);
    }
    let mut area = 0.0;
    for w in curve.windows(2) {
        let ((x0, y0), (x1, y1)) = ((w[0].0 as f64, w[0].1), (w[1].0 as f64, w[1].1));
        let end = CURVE_MAX as f64;
        if x0 >= end {
            break;
        }
        if x1 <= x0 {
            continue;
        }
        let (x1c, y1c) = if x1 > end {
            (end, y0 + (y1 - y0) * (end - x0) / (x1 - x0))
        } else {
            (x1, y1)
        };
        area += (x1c - x0) * (y0 + y1c) / 2.0;
    }
    Ok(area)
}

/// Repeatability at `n_features` per frame after adding Gaussian noise of
/// each standard deviation in `sigmas` to every frame. Noise differs per
/// frame and per sigma and is fixed by `seed`.
pub fn noise_sweep<D: Detector + ?Sized>(
    bench: &Benchmark,
    detector: &D,
    n_features: usize,
    sigmas: &[f64],
    seed: u64,
    epsilon: f64,
) -> Result<Vec<(f64, f64)>, RepeatError> {
    sigmas
        .iter()
        .enumerate()
        .map(|(s, &sigma)| {
            let noisy = bench.map_frames(|k, img| {
                let frame_seed = seed ^ ((s as u64) << 32 | k as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
                add_gaussian_noise(img, sigma, frame_seed)
            });
            Ok((sigma, sequence_repeatability(&noisy, detector, n_features, epsilon)?))
        })
        .collect()
}
