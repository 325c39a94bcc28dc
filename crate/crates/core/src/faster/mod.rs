//! FAST-ER: ternary trees over a 48-offset neighbourhood, applied under all
//! sixteen combinations of rotation, reflection and intensity inversion and
//! optimized for repeatability by simulated annealing.

mod anneal;
mod distill;
mod offsets;
mod sixteen;
mod tree;

pub use anneal::{
    acceptance_probability, anneal, cost, evaluate, multi_run, temperature, AnnealParams, AnnealResult, CostWeights,
    Evaluation, MultiRun, TraceRow, DEFAULT_RUNS, DESK_RUNS,
};
pub use distill::{agreement, distill, patch_training_set, PatchConfig};
pub use offsets::{dihedral, FasterOffsets, DEFAULT_FASTER_OFFSETS, FASTER_OFFSET_COUNT};
pub use sixteen::{apply_sixteenfold, detect_sixteenfold, detect_sixteenfold_scored, swap_polarity, Sixteenfold};
pub use tree::{satisfies_constraint, FasterTree, MutationKind};

use crate::detectors::{Detector, Ranking};
use crate::image::GrayImage;
use crate::learn::LearnError;
use crate::repeat::RepeatError;
use crate::ring::Offset;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FasterError {
    #[error("offset table has {0} entries, expected 48")]
    OffsetCount(usize),
    #[error("offset (-1, 4) must be at index 0")]
    AnchorOffset,
    #[error("offset table contains (0, 0)")]
    ZeroOffset,
    #[error("offset ({}, {}) appears twice", .0.dx, .0.dy)]
    DuplicateOffset(Offset),
    #[error("offset table is not closed under rotation and reflection at ({}, {})", .0.dx, .0.dy)]
    NotSymmetric(Offset),
    #[error("tree references offset {0}, beyond the table")]
    OffsetIndex(u8),
    #[error("a similar branch ends in a corner leaf")]
    SimilarLeaf,
    #[error("optimizer parameters must be positive")]
    InvalidParams,
    #[error("training sequence has no frames or no pairs")]
    EmptyTraining,
    #[error("at least one run is required")]
    NoRuns,
    #[error("no interior pixels to learn from")]
    NoPixels,
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Repeat(#[from] RepeatError),
}

/// The sixteen-fold detector at threshold `t` as a benchmark detector.
#[derive(Debug, Clone)]
pub struct FasterDetector {
    pub tree: FasterTree,
    pub offsets: FasterOffsets,
    pub t: u8,
}

impl Detector for FasterDetector {
    fn rank(&self, img: &GrayImage, _frame: usize) -> Ranking {
        let sf = Sixteenfold::new(&self.tree, &self.offsets, img.width());
        Ranking::from_scored(&detect_sixteenfold_scored(&sf, img, self.t), true)
    }
}
