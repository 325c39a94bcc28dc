use alloc::vec::Vec;

use crate::image::GrayImage;
use crate::learn::{build_tree_owned, Features, Record, TrainingSet};
use crate::runtime::CompiledTree;
use crate::segment::{pixel_state, PixelState};
use crate::tree::TernaryTree;

use super::offsets::{FasterOffsets, FASTER_OFFSET_COUNT};
use super::sixteen::Sixteenfold;
use super::tree::FasterTree;
use super::FasterError;

/// States of the 48 FAST-ER offsets around one pixel, two bits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatchConfig(u128);

impl PatchConfig {
    pub fn from_states(states: &[PixelState; FASTER_OFFSET_COUNT]) -> Self {
        Self(states.iter().enumerate().fold(0u128, |acc, (i, &s)| acc | (s as u128) << (2 * i)))
    }

    /// Configuration at `(x, y)` for threshold `t`; the pixel must be at
    /// least the table's margin inside the image.
    pub fn at(img: &GrayImage, offsets: &FasterOffsets, x: usize, y: usize, t: u8) -> Self {
        let c = img.get(x, y);
        let mut packed = 0u128;
        for (i, o) in offsets.as_slice().iter().enumerate() {
            let v = img.get((x as isize + o.dx as isize) as usize, (y as isize + o.dy as isize) as usize);
            packed |= (pixel_state(c, v, t) as u128) << (2 * i);
        }
        Self(packed)
    }
}

impl Features for PatchConfig {
    const ATTRIBUTES: usize = FASTER_OFFSET_COUNT;

    #[inline]
    fn state(&self, attr: usize) -> PixelState {
        PixelState::from_code(((self.0 >> (2 * attr)) & 3) as u32)
    }
}

/// Every interior pixel of `images` as a patch configuration labelled by
/// the sixteen-fold detector at threshold `t`.
pub fn patch_training_set(
    tree: &FasterTree,
    offsets: &FasterOffsets,
    images: &[GrayImage],
    t: u8,
) -> Result<TrainingSet<PatchConfig>, FasterError> {
    let m = offsets.margin();
    let mut records = Vec::new();
    for img in images {
        let (w, h) = (img.width(), img.height());
        if w <= 2 * m || h <= 2 * m {
            continue;
        }
        let sf = Sixteenfold::new(tree, offsets, w);
        for y in m..h - m {
            for x in m..w - m {
                records.push(Record {
                    config: PatchConfig::at(img, offsets, x, y, t),
                    weight: 1,
                    corner: sf.classify_index(img.data(), y * w + x, t),
                });
            }
        }
    }
    if records.is_empty() {
        return Err(FasterError::NoPixels);
    }
    Ok(TrainingSet::from_records(records)?)
}

/// A single tree over the 48 offsets reproducing the sixteen-fold detector
/// at threshold `t` on every interior pixel of `images`.
pub fn distill(
    tree: &FasterTree,
    offsets: &FasterOffsets,
    images: &[GrayImage],
    t: u8,
) -> Result<TernaryTree, FasterError> {
    let ts = patch_training_set(tree, offsets, images, t)?;
    Ok(build_tree_owned(ts)?)
}

/// `(agreeing, total)` interior pixels between a distilled tree and the
/// sixteen-fold detector at threshold `t`.
pub fn agreement(
    distilled: &TernaryTree,
    tree: &FasterTree,
    offsets: &FasterOffsets,
    img: &GrayImage,
    t: u8,
) -> (usize, usize) {
    let m = offsets.margin();
    let (w, h) = (img.width(), img.height());
    if w <= 2 * m || h <= 2 * m {
        return (0, 0);
    }
    let single = CompiledTree::new(distilled, offsets.as_slice(), w);
    let sf = Sixteenfold::new(tree, offsets, w);
    let mut agree = 0;
    for y in m..h - m {
        for x in m..w - m {
            let idx = y * w + x;
            agree += (single.classify_index(img.data(), idx, t) == sf.classify_index(img.data(), idx, t)) as usize;
        }
    }
    (agree, (w - 2 * m) * (h - 2 * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::synthetic_scene;
    use TernaryTree::Leaf;

    #[test]
    fn patch_states_round_trip() {
        let mut states = [PixelState::Similar; FASTER_OFFSET_COUNT];
        states[0] = PixelState::Brighter;
        states[47] = PixelState::Darker;
        states[20] = PixelState::Brighter;
        let p = PatchConfig::from_states(&states);
        for (i, s) in states.iter().enumerate() {
            assert_eq!(p.state(i), *s);
        }
    }

    #[test]
    fn silent_detector_distills_to_negative_leaf() {
        let tree = FasterTree::new(Leaf(false)).unwrap();
        let img = synthetic_scene(40, 30, 1);
        let d = distill(&tree, &FasterOffsets::default(), &[img], 20).unwrap();
        assert_eq!(d, Leaf(false));
    }

    #[test]
    fn distilled_tree_is_exact_on_training_images() {
        let tree = FasterTree::new(TernaryTree::node(
            7,
            TernaryTree::node(30, Leaf(true), Leaf(false), Leaf(false)),
            Leaf(false),
            Leaf(true),
        ))
        .unwrap();
        let offsets = FasterOffsets::default();
        let imgs = [synthetic_scene(60, 40, 2), synthetic_scene(60, 40, 3)];
        let d = distill(&tree, &offsets, &imgs, 15).unwrap();
        for img in &imgs {
            let (agree, total) = agreement(&d, &tree, &offsets, img, 15);
            assert_eq!(agree, total);
        }
    }
}
