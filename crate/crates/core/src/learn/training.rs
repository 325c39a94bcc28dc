use alloc::vec::Vec;

use crate::image::GrayImage;
use crate::ring::RING_MARGIN;
use crate::segment::{is_corner_config, ring_config, PixelState, RingConfig, RING_CONFIGS};

use super::LearnError;

/// A fixed-length vector of ternary attributes that the ID3 learner can split on.
pub trait Features: Copy + Ord + Send + Sync {
    const ATTRIBUTES: usize;

    fn state(&self, attr: usize) -> PixelState;
}

impl Features for RingConfig {
    const ATTRIBUTES: usize = 16;

    #[inline]
    fn state(&self, attr: usize) -> PixelState {
        RingConfig::state(*self, attr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Record<F> {
    pub config: F,
    pub weight: u32,
    pub corner: bool,
}

/// Distinct configurations with their label and multiplicity, sorted by
/// configuration. A configuration never carries both labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSet<F> {
    records: Vec<Record<F>>,
}

impl<F> Default for TrainingSet<F> {
    fn default() -> Self {
        Self { records: Vec::new() }
    }
}

impl<F: Features> TrainingSet<F> {
    /// Sorts, merges duplicate configurations (summing weights) and drops
    /// zero-weight records.
    pub fn from_records(mut records: Vec<Record<F>>) -> Result<Self, LearnError> {
        records.retain(|r| r.weight > 0);
        records.sort_unstable_by(|a, b| a.config.cmp(&b.config));
        let mut merged: Vec<Record<F>> = Vec::with_capacity(records.len());
        for r in records {
            match merged.last_mut() {
                Some(last) if last.config == r.config => {
                    if last.corner != r.corner {
                        return Err(LearnError::LabelConflict);
                    }
                    last.weight = last.weight.saturating_add(r.weight);
                }
                _ => merged.push(r),
            }
        }
        Ok(Self { records: merged })
    }

    pub fn records(&self) -> &[Record<F>] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record<F>> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Weighted (corner, non-corner) totals.
    pub fn class_weights(&self) -> (u64, u64) {
        self.records.iter().fold((0, 0), |(c, n), r| {
            if r.corner {
                (c + r.weight as u64, n)
            } else {
                (c, n + r.weight as u64)
            }
        })
    }

    /// Multiplies every weight by `factor` (saturating).
    pub fn scale_weights(mut self, factor: u32) -> Self {
        for r in &mut self.records {
            r.weight = r.weight.saturating_mul(factor);
        }
        self.records.retain(|r| r.weight > 0);
        self
    }

    pub fn label_of(&self, config: &F) -> Option<bool> {
        self.records
            .binary_search_by(|r| r.config.cmp(config))
            .ok()
            .map(|i| self.records[i].corner)
    }
}

/// One weighted record per distinct ring configuration observed in the
/// interior of `images`, labelled by the FAST-`n` segment test at threshold `t`.
pub fn extract_training_data(images: &[GrayImage], n: usize, t: u8) -> TrainingSet<RingConfig> {
    let mut configs: Vec<RingConfig> = Vec::new();
    for img in images {
        if img.width() <= 2 * RING_MARGIN || img.height() <= 2 * RING_MARGIN {
            continue;
        }
        for y in RING_MARGIN..img.height() - RING_MARGIN {
            for x in RING_MARGIN..img.width() - RING_MARGIN {
                configs.push(ring_config(img, x, y, t));
            }
        }
    }
    configs.sort_unstable();
    let mut records: Vec<Record<RingConfig>> = Vec::new();
    for cfg in configs {
        match records.last_mut() {
            Some(last) if last.config == cfg => last.weight = last.weight.saturating_add(1),
            _ => records.push(Record {
                config: cfg,
                weight: 1,
                corner: is_corner_config(cfg, n),
            }),
        }
    }
    TrainingSet { records }
}

/// Adds every one of the 3^16 ring configurations with weight `low_weight`
/// and its segment-test label; existing records keep their weight plus
/// `low_weight`.
pub fn augment_exhaustive(
    ts: &TrainingSet<RingConfig>,
    n: usize,
    low_weight: u32,
) -> Result<TrainingSet<RingConfig>, LearnError> {
    assert!(low_weight >= 1, "low_weight must be at least 1");
    let mut records = Vec::with_capacity(RING_CONFIGS as usize);
    let mut existing = ts.records.iter().peekable();
    for cfg in RingConfig::all() {
        let corner = is_corner_config(cfg, n);
        let mut weight = low_weight;
        if let Some(r) = existing.next_if(|r| r.config == cfg) {
            if r.corner != corner {
                return Err(LearnError::LabelConflict);
            }
            weight = weight.saturating_add(r.weight);
        }
        records.push(Record {
            config: cfg,
            weight,
            corner,
        });
    }
    Ok(TrainingSet { records })
}
