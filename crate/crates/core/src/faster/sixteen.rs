use alloc::vec;
use alloc::vec::Vec;

use crate::image::GrayImage;
use crate::keypoint::{Keypoint, Point};
use crate::runtime::{nonmax_suppress, CompiledTree};
use crate::tree::TernaryTree;

use super::offsets::FasterOffsets;
use super::tree::FasterTree;

/// Swaps the darker and brighter subtrees everywhere: the tree applied to
/// the intensity-inverted image.
pub fn swap_polarity(tree: &TernaryTree) -> TernaryTree {
    match tree {
        TernaryTree::Leaf(c) => TernaryTree::Leaf(*c),
        TernaryTree::Node { offset, children } => TernaryTree::node(
            *offset,
            swap_polarity(&children[2]),
            swap_polarity(&children[1]),
            swap_polarity(&children[0]),
        ),
    }
}

/// A tree compiled under all eight lattice symmetries, each with and without
/// intensity inversion. A pixel is a corner if any of the sixteen says so.
#[derive(Debug, Clone)]
pub struct Sixteenfold {
    variants: Vec<CompiledTree>,
    margin: usize,
    stride: usize,
}

impl Sixteenfold {
    pub fn new(tree: &FasterTree, offsets: &FasterOffsets, stride: usize) -> Self {
        let inverted = swap_polarity(tree.tree());
        let mut variants = Vec::with_capacity(16);
        for g in 0..8 {
            let table = offsets.transformed(g);
            variants.push(CompiledTree::new(tree.tree(), &table, stride));
            variants.push(CompiledTree::new(&inverted, &table, stride));
        }
        Self {
            variants,
            margin: offsets.margin(),
            stride,
        }
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Each of the sixteen applications at one pixel, in symmetry order with
    /// the inverted variant second.
    pub fn applications(&self, data: &[u8], idx: usize, t: u8) -> [bool; 16] {
        let mut out = [false; 16];
        for (o, v) in out.iter_mut().zip(&self.variants) {
            *o = v.classify_index(data, idx, t);
        }
        out
    }

    #[inline]
    pub fn classify_index(&self, data: &[u8], idx: usize, t: u8) -> bool {
        self.variants.iter().any(|v| v.classify_index(data, idx, t))
    }

    /// Largest `t` in `1..=255` found by bisection at which the pixel
    /// classifies as a corner; `None` if it is not a corner at `t = 1`.
    pub fn score(&self, data: &[u8], idx: usize) -> Option<u8> {
        if !self.classify_index(data, idx, 1) {
            return None;
        }
        let (mut lo, mut hi) = (1u16, 256u16);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.classify_index(data, idx, mid as u8) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo as u8)
    }
}

fn interior(img: &GrayImage, margin: usize) -> Option<(core::ops::Range<usize>, core::ops::Range<usize>)> {
    let (w, h) = (img.width(), img.height());
    (w > 2 * margin && h > 2 * margin).then(|| (margin..w - margin, margin..h - margin))
}

/// Per-pixel corner field at threshold `t`; the border is false.
pub fn apply_sixteenfold(tree: &FasterTree, offsets: &FasterOffsets, img: &GrayImage, t: u8) -> Vec<bool> {
    let sf = Sixteenfold::new(tree, offsets, img.width());
    let mut field = vec![false; img.width() * img.height()];
    if let Some((xs, ys)) = interior(img, sf.margin) {
        for y in ys {
            for x in xs.clone() {
                let idx = y * img.width() + x;
                field[idx] = sf.classify_index(img.data(), idx, t);
            }
        }
    }
    field
}

/// Raster-ordered corners at threshold `t`.
pub fn detect_sixteenfold(sf: &Sixteenfold, img: &GrayImage, t: u8) -> Vec<Point> {
    assert_eq!(sf.stride, img.width(), "compiled for a different stride");
    let mut out = Vec::new();
    if let Some((xs, ys)) = interior(img, sf.margin) {
        for y in ys {
            for x in xs.clone() {
                if sf.classify_index(img.data(), y * img.width() + x, t) {
                    out.push(Point::new(x as u32, y as u32));
                }
            }
        }
    }
    out
}

/// Detects at `t`, scores by bisection and suppresses non-maxima.
pub fn detect_sixteenfold_scored(sf: &Sixteenfold, img: &GrayImage, t: u8) -> Vec<Keypoint> {
    let scored: Vec<Keypoint> = detect_sixteenfold(sf, img, t)
        .into_iter()
        .filter_map(|p| {
            sf.score(img.data(), p.y as usize * img.width() + p.x as usize)
                .map(|s| Keypoint::new(p.x, p.y, s))
        })
        .collect();
    nonmax_suppress(&scored)
}
