//! Applying a ternary tree to images: detection, corner scores, non-maximal
//! suppression and feature-count control.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::image::GrayImage;
use crate::keypoint::{Keypoint, Point};
use crate::ring::{Offset, RingOffsets};
use crate::segment::PixelState;
use crate::tree::TernaryTree;

const LEAF_FALSE: u32 = u32::MAX - 1;
const LEAF_TRUE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct FlatNode {
    delta: isize,
    next: [u32; 3],
}

/// A tree flattened for one image stride: every node holds its precomputed
/// buffer displacement, children are indices, leaves are sentinels.
#[derive(Debug, Clone)]
pub struct CompiledTree {
    nodes: Vec<FlatNode>,
    root: u32,
    stride: usize,
    margin: usize,
    /// Root offset and shared second offset, when the tree has that shape.
    shared: Option<(isize, isize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("pixel is not a corner even at threshold 1")]
    NotACorner,
}

impl CompiledTree {
    /// Flattens `tree` for images with row stride `stride`. Panics if the tree
    /// references an offset outside `offsets`.
    pub fn new(tree: &TernaryTree, offsets: &[Offset], stride: usize) -> Self {
        let mut nodes = Vec::with_capacity(tree.decision_count());
        let root = flatten(tree, offsets, stride, &mut nodes);
        let margin = offsets.iter().map(|o| o.magnitude()).max().unwrap_or(0);
        let shared = match tree {
            TernaryTree::Node { offset, children } if crate::learn::has_shared_second_test(tree) => children
                .iter()
                .find_map(|c| c.offset())
                .map(|second| (offsets[*offset as usize].delta(stride), offsets[second as usize].delta(stride))),
            _ => None,
        };
        Self {
            nodes,
            root,
            stride,
            margin,
            shared,
        }
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Border width never evaluated: the largest Chebyshev magnitude in the offset table.
    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn has_shared_second_test(&self) -> bool {
        self.shared.is_some()
    }

    #[inline]
    fn walk_from(&self, data: &[u8], idx: usize, hi: i16, lo: i16, mut node: u32) -> bool {
        while node < LEAF_FALSE {
            let n = &self.nodes[node as usize];
            let v = data[(idx as isize + n.delta) as usize] as i16;
            let branch = if v >= hi {
                PixelState::Brighter
            } else if v <= lo {
                PixelState::Darker
            } else {
                PixelState::Similar
            };
            node = n.next[branch as usize];
        }
        node == LEAF_TRUE
    }

    /// Classifies the pixel at buffer index `idx`; it must lie at least
    /// [`margin`](Self::margin) pixels inside the image.
    #[inline]
    pub fn classify_index(&self, data: &[u8], idx: usize, t: u8) -> bool {
        let c = data[idx] as i16;
        self.walk_from(data, idx, c + t as i16, c - t as i16, self.root)
    }

    /// Largest `t` in 1..=255 at which the pixel classifies as a corner, by
    /// binary search (8 classifications).
    pub fn score_bisect(&self, data: &[u8], idx: usize) -> Result<u8, ScoreError> {
        if !self.classify_index(data, idx, 1) {
            return Err(ScoreError::NotACorner);
        }
        // Invariant: corner at `lo`, not a corner at `hi` (256 stands for "above range").
        let (mut lo, mut hi) = (1u16, 256u16);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.classify_index(data, idx, mid as u8) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo as u8)
    }

    /// Same value as [`score_bisect`](Self::score_bisect) for trees over the
    /// 16-pixel ring: repeatedly raises `t` just past the smallest margin by
    /// which a passing ring pixel clears it, until classification fails.
    pub fn score_iterate(&self, ring: &RingOffsets, data: &[u8], idx: usize) -> Result<u8, ScoreError> {
        if !self.classify_index(data, idx, 1) {
            return Err(ScoreError::NotACorner);
        }
        let c = data[idx] as i16;
        let diffs: [i16; 16] =
            core::array::from_fn(|i| (data[(idx as isize + ring.as_slice()[i].delta(self.stride)) as usize] as i16 - c).abs());
        let mut t: i16 = 1;
        loop {
            // Nothing changes state for thresholds in [t, min_pass].
            let min_pass = match diffs.iter().copied().filter(|&d| d >= t).min() {
                Some(d) => d,
                None => return Ok(255),
            };
            if min_pass >= 255 {
                return Ok(255);
            }
            let next = min_pass + 1;
            if !self.classify_index(data, idx, next as u8) {
                return Ok(min_pass as u8);
            }
            t = next;
        }
    }
}

fn flatten(tree: &TernaryTree, offsets: &[Offset], stride: usize, nodes: &mut Vec<FlatNode>) -> u32 {
    match tree {
        TernaryTree::Leaf(true) => LEAF_TRUE,
        TernaryTree::Leaf(false) => LEAF_FALSE,
        TernaryTree::Node { offset, children } => {
            let id = nodes.len();
            nodes.push(FlatNode {
                delta: offsets[*offset as usize].delta(stride),
                next: [LEAF_FALSE; 3],
            });
            for s in 0..3 {
                let child = flatten(&children[s], offsets, stride, nodes);
                nodes[id].next[s] = child;
            }
            id as u32
        }
    }
}

/// How [`detect_rows`] evaluates pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Walk the tree from the root at every pixel.
    PerPixel,
    /// For trees whose root children share one offset, compute the first two
    /// tests for a whole scanline before walking the remaining tree per pixel.
    /// Falls back to `PerPixel` for other trees.
    Batched,
}

/// Classifies the pixel at `(x, y)`.
pub fn classify_pixel(tree: &CompiledTree, img: &GrayImage, x: usize, y: usize, t: u8) -> bool {
    tree.classify_index(img.data(), y * img.width() + x, t)
}

/// Raster-ordered positions the tree classifies as corners at threshold `t`.
pub fn detect(tree: &CompiledTree, img: &GrayImage, t: u8) -> Vec<Point> {
    detect_rows(tree, img, t, 0..img.height(), Strategy::Batched)
}

/// Detection restricted to `rows` (clipped to the interior margin). Both
/// strategies return identical output.
pub fn detect_rows(tree: &CompiledTree, img: &GrayImage, t: u8, rows: Range<usize>, strategy: Strategy) -> Vec<Point> {
    assert!(t >= 1, "threshold must be at least 1");
    assert_eq!(tree.stride, img.width(), "tree compiled for a different stride");
    let m = tree.margin;
    let mut out = Vec::new();
    let (w, h) = (img.width(), img.height());
    if w <= 2 * m || h <= 2 * m {
        return out;
    }
    let ys = rows.start.max(m)..rows.end.min(h - m);
    let data = img.data();
    match (strategy, tree.shared) {
        (Strategy::Batched, Some((first, second))) => {
            let root = &tree.nodes[tree.root as usize];
            let width = w - 2 * m;
            let mut s1 = vec![0u8; width];
            let mut s2 = vec![0u8; width];
            for y in ys {
                let base = y * w + m;
                batch_states(data, base, first, t, &mut s1);
                batch_states(data, base, second, t, &mut s2);
                for i in 0..width {
                    let mut node = root.next[s1[i] as usize];
                    if node < LEAF_FALSE {
                        node = tree.nodes[node as usize].next[s2[i] as usize];
                    }
                    let idx = base + i;
                    let c = data[idx] as i16;
                    if tree.walk_from(data, idx, c + t as i16, c - t as i16, node) {
                        out.push(Point::new((m + i) as u32, y as u32));
                    }
                }
            }
        }
        _ => {
            for y in ys {
                for x in m..w - m {
                    if tree.classify_index(data, y * w + x, t) {
                        out.push(Point::new(x as u32, y as u32));
                    }
                }
            }
        }
    }
    out
}

// Branch-free state computation for a run of candidates.
fn batch_states(data: &[u8], base: usize, delta: isize, t: u8, out: &mut [u8]) {
    let centres = &data[base..base + out.len()];
    let start = (base as isize + delta) as usize;
    let ring = &data[start..start + out.len()];
    let t = t as i16;
    for ((o, &c), &v) in out.iter_mut().zip(centres).zip(ring) {
        let (c, v) = (c as i16, v as i16);
        *o = 1 + (v >= c + t) as u8 - (v <= c - t) as u8;
    }
}

/// Scores each position with [`CompiledTree::score_bisect`]; positions that
/// are not corners at `t = 1` are dropped.
pub fn score_points(tree: &CompiledTree, img: &GrayImage, points: &[Point]) -> Vec<Keypoint> {
    points
        .iter()
        .filter_map(|p| {
            let idx = p.y as usize * img.width() + p.x as usize;
            tree.score_bisect(img.data(), idx).ok().map(|s| Keypoint::new(p.x, p.y, s))
        })
        .collect()
}

/// Detects at `t`, scores and suppresses non-maxima.
pub fn detect_scored(tree: &CompiledTree, img: &GrayImage, t: u8) -> Vec<Keypoint> {
    nonmax_suppress(&score_points(tree, img, &detect(tree, img, t)))
}

/// 3×3 non-maximal suppression. A keypoint survives iff no 8-neighbour has a
/// strictly greater score and no 8-neighbour with an equal score precedes it
/// in raster order. Positions are assumed distinct; output is raster-ordered.
pub fn nonmax_suppress<S: PartialOrd + Copy>(points: &[Keypoint<S>]) -> Vec<Keypoint<S>> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<Keypoint<S>> = points.to_vec();
    sorted.sort_by(|a, b| a.point().cmp(&b.point()));
    let x0 = sorted.iter().map(|p| p.x).min().unwrap() as usize;
    let x1 = sorted.iter().map(|p| p.x).max().unwrap() as usize;
    let y0 = sorted.first().unwrap().y as usize;
    let y1 = sorted.last().unwrap().y as usize;
    // Grid with a one-cell apron so neighbours never need bounds checks.
    let gw = x1 - x0 + 3;
    let gh = y1 - y0 + 3;
    let mut grid: Vec<u32> = vec![u32::MAX; gw * gh];
    let cell = |p: &Keypoint<S>| (p.y as usize - y0 + 1) * gw + (p.x as usize - x0 + 1);
    for (i, p) in sorted.iter().enumerate() {
        grid[cell(p)] = i as u32;
    }
    let neighbours = [
        -(gw as isize) - 1,
        -(gw as isize),
        -(gw as isize) + 1,
        -1,
        1,
        gw as isize - 1,
        gw as isize,
        gw as isize + 1,
    ];
    sorted
        .iter()
        .enumerate()
        .filter(|&(i, p)| {
            let c = cell(p) as isize;
            neighbours.iter().all(|&d| {
                let j = grid[(c + d) as usize];
                if j == u32::MAX {
                    return true;
                }
                let q = &sorted[j as usize];
                !(q.score > p.score || (q.score == p.score && (j as usize) < i))
            })
        })
        .map(|(_, p)| *p)
        .collect()
}

/// Orders keypoints by descending score, raster order among equal scores.
pub fn rank_by_score<S: PartialOrd + Copy>(points: &[Keypoint<S>]) -> Vec<Keypoint<S>> {
    let mut ranked = points.to_vec();
    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.point().cmp(&b.point()))
    });
    ranked
}

/// Counts at which a ranked list can be cut without splitting a group of
/// equal scores: `0`, the end of each group, and the total.
pub fn tie_boundaries<S: PartialOrd + Copy>(ranked: &[Keypoint<S>]) -> Vec<usize> {
    let mut cuts = vec![0];
    for i in 1..=ranked.len() {
        if i == ranked.len() || ranked[i].score != ranked[i - 1].score {
            cuts.push(i);
        }
    }
    cuts
}

/// Of the allowed cut counts, the one nearest `n` (the smaller on a tie).
pub fn nearest_cut(cuts: &[usize], n: usize) -> usize {
    cuts.iter()
        .copied()
        .min_by_key(|&c| (c.abs_diff(n), c))
        .unwrap_or(0)
}

/// The highest-scoring keypoints, as close to `n` of them as possible without
/// separating keypoints of equal score (the count a threshold on the score
/// can achieve). Output is raster-ordered.
pub fn top_n_by_score<S: PartialOrd + Copy>(points: &[Keypoint<S>], n: usize) -> Vec<Keypoint<S>> {
    let ranked = rank_by_score(points);
    let take = nearest_cut(&tie_boundaries(&ranked), n);
    let mut out = ranked[..take].to_vec();
    out.sort_by(|a, b| a.point().cmp(&b.point()));
    out
}

/// Exactly `min(n, len)` highest-scoring keypoints; ties at the cut are
/// resolved in raster order. Output is raster-ordered.
pub fn top_n_exact<S: PartialOrd + Copy>(points: &[Keypoint<S>], n: usize) -> Vec<Keypoint<S>> {
    let ranked = rank_by_score(points);
    let mut out = ranked[..n.min(ranked.len())].to_vec();
    out.sort_by(|a, b| a.point().cmp(&b.point()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ring_offsets;
    use TernaryTree::Leaf;

    fn kp(x: u32, y: u32, s: u8) -> Keypoint {
        Keypoint::new(x, y, s)
    }

    #[test]
    fn leaf_tree_classifies_constantly() {
        let img = GrayImage::filled(10, 10, 3);
        let yes = CompiledTree::new(&Leaf(true), ring_offsets().as_slice(), 10);
        assert!(classify_pixel(&yes, &img, 5, 5, 10));
        assert_eq!(detect(&yes, &img, 10).len(), 4 * 4);
        let no = CompiledTree::new(&Leaf(false), ring_offsets().as_slice(), 10);
        assert!(detect(&no, &img, 1).is_empty());
    }

    #[test]
    fn bisection_finds_constructed_boundary() {
        // Single test on ring index 1: corner iff that pixel is brighter.
        let tree = TernaryTree::node(0, Leaf(false), Leaf(false), Leaf(true));
        let mut img = GrayImage::filled(9, 9, 100);
        img.set(4, 1, 120);
        let ct = CompiledTree::new(&tree, ring_offsets().as_slice(), 9);
        let idx = 4 * 9 + 4;
        assert_eq!(ct.score_bisect(img.data(), idx), Ok(20));
        assert_eq!(ct.score_iterate(&ring_offsets(), img.data(), idx), Ok(20));
        let flat = GrayImage::filled(9, 9, 100);
        assert_eq!(ct.score_bisect(flat.data(), idx), Err(ScoreError::NotACorner));
        assert_eq!(ct.score_iterate(&ring_offsets(), flat.data(), idx), Err(ScoreError::NotACorner));
    }

    #[test]
    fn iteration_stops_after_one_step_when_margin_exceeds_headroom() {
        let tree = TernaryTree::node(0, Leaf(false), Leaf(false), Leaf(true));
        let mut img = GrayImage::filled(9, 9, 0);
        img.set(4, 1, 255);
        let ct = CompiledTree::new(&tree, ring_offsets().as_slice(), 9);
        assert_eq!(ct.score_iterate(&ring_offsets(), img.data(), 40), Ok(255));
        assert_eq!(ct.score_bisect(img.data(), 40), Ok(255));
    }

    #[test]
    fn nms_basic_cases() {
        assert_eq!(nonmax_suppress(&[kp(5, 5, 9)]), vec![kp(5, 5, 9)]);
        assert_eq!(nonmax_suppress(&[kp(5, 5, 10), kp(6, 5, 20)]), vec![kp(6, 5, 20)]);
        let plateau = [kp(7, 3, 4), kp(5, 3, 4), kp(6, 3, 4)];
        assert_eq!(nonmax_suppress(&plateau), vec![kp(5, 3, 4)]);
        let apart = [kp(1, 1, 4), kp(3, 1, 9)];
        assert_eq!(nonmax_suppress(&apart), vec![kp(1, 1, 4), kp(3, 1, 9)]);
        assert!(nonmax_suppress::<u8>(&[]).is_empty());
    }

    #[test]
    fn top_n_respects_tie_groups() {
        let pts = [kp(0, 0, 9), kp(1, 0, 7), kp(2, 0, 7), kp(3, 0, 7), kp(4, 0, 1)];
        assert!(top_n_by_score(&pts, 0).is_empty());
        assert_eq!(top_n_by_score(&pts, 10).len(), 5);
        // Cuts are {0, 1, 4, 5}; 2 is nearest to 1, 3 is nearest to 4.
        assert_eq!(top_n_by_score(&pts, 2), vec![kp(0, 0, 9)]);
        assert_eq!(top_n_by_score(&pts, 3).len(), 4);
        assert_eq!(top_n_exact(&pts, 2), vec![kp(0, 0, 9), kp(1, 0, 7)]);
    }

    #[test]
    fn nearest_cut_prefers_smaller_on_ties() {
        assert_eq!(nearest_cut(&[0, 490, 510], 500), 490);
        assert_eq!(nearest_cut(&[0, 480, 503], 500), 503);
    }
}
