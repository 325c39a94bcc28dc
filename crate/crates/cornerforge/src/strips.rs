//! Data-parallel detection over horizontal strips.
//!
//! Each strip is detected independently and the results are concatenated in
//! strip order, so the output equals the sequential raster-ordered output
//! for any strip height and worker count.

use cornerforge_core::runtime::{detect_rows, nonmax_suppress, score_points, CompiledTree, Strategy};
use cornerforge_core::segment::detect_fast_n_rows;
use cornerforge_core::{GrayImage, Keypoint, Point};
use rayon::prelude::*;

pub const DEFAULT_STRIP_ROWS: usize = 32;

fn strips(height: usize, rows: usize) -> Vec<std::ops::Range<usize>> {
    let rows = rows.max(1);
    (0..height).step_by(rows).map(|s| s..(s + rows).min(height)).collect()
}

pub fn detect_tree_strips(tree: &CompiledTree, img: &GrayImage, t: u8, rows: usize) -> Vec<Point> {
    strips(img.height(), rows)
        .into_par_iter()
        .map(|r| detect_rows(tree, img, t, r, Strategy::Batched))
        .collect::<Vec<_>>()
        .concat()
}

pub fn detect_fast_strips(img: &GrayImage, n: usize, t: u8, rows: usize) -> Vec<Point> {
    strips(img.height(), rows)
        .into_par_iter()
        .map(|r| detect_fast_n_rows(img, n, t, r))
        .collect::<Vec<_>>()
        .concat()
}

/// Strip-parallel detection and scoring followed by suppression.
pub fn detect_scored_strips(tree: &CompiledTree, img: &GrayImage, t: u8, rows: usize) -> Vec<Keypoint> {
    let scored: Vec<Keypoint> = strips(img.height(), rows)
        .into_par_iter()
        .map(|r| score_points(tree, img, &detect_rows(tree, img, t, r, Strategy::Batched)))
        .collect::<Vec<_>>()
        .concat();
    nonmax_suppress(&scored)
}
