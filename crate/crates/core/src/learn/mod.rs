//! Compiling the segment test into a ternary decision tree.
//!
//! Ring configurations are extracted from images and labelled with the
//! reference segment test, optionally augmented with all 3^16 configurations
//! so the learned tree is exact, and fed to ID3. The resulting tree can be
//! emitted as nested conditionals in C or Rust.

mod emit;
mod id3;
mod training;

pub use emit::{emit_source, EmitTarget};
pub use id3::{
    best_split, build_tree, build_tree_owned, build_tree_shared, entropy, force_shared_second_test,
    has_shared_second_test, information_gain, split_counts, StateCounts,
};
pub use training::{augment_exhaustive, extract_training_data, Features, Record, TrainingSet};

use crate::segment::{is_corner_config, RingConfig};
use crate::tree::TernaryTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LearnError {
    #[error("the same configuration appears with both labels")]
    LabelConflict,
    #[error("no attribute splits an impure subset; labels are not a function of the attributes")]
    Inconsistent,
    #[error("training set contains a single class; there is nothing to split")]
    PureSet,
}

/// Number of ring configurations on which `tree` disagrees with the FAST-`n`
/// segment test. Walks all 3^16 configurations.
pub fn count_mismatches(tree: &TernaryTree, n: usize) -> u64 {
    RingConfig::all()
        .filter(|&cfg| tree.classify(|attr| cfg.state(attr)) != is_corner_config(cfg, n))
        .count() as u64
}

/// Learns the tree that reproduces FAST-`n` exactly, from the exhaustive set alone.
pub fn exact_segment_tree(n: usize) -> Result<TernaryTree, LearnError> {
    let ts = augment_exhaustive(&TrainingSet::default(), n, 1)?;
    build_tree_owned(ts)
}
