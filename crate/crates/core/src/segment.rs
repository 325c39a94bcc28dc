//! Reference FAST-n segment test.
//!
//! This is the ground truth every learned detector is checked against, so it
//! is written for clarity rather than speed.

use alloc::vec::Vec;
use core::ops::Range;

use crate::image::GrayImage;
use crate::keypoint::Point;
use crate::ring::{ring_offsets, RING_MARGIN};

/// Ternary outcome of comparing one ring pixel against the nucleus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum PixelState {
    Darker = 0,
    Similar = 1,
    Brighter = 2,
}

impl PixelState {
    pub const ALL: [PixelState; 3] = [PixelState::Darker, PixelState::Similar, PixelState::Brighter];

    #[inline]
    pub fn from_code(code: u32) -> PixelState {
        match code {
            0 => PixelState::Darker,
            1 => PixelState::Similar,
            2 => PixelState::Brighter,
            _ => panic!("invalid pixel state code {code}"),
        }
    }

    /// Swaps darker and brighter, as intensity inversion does.
    #[inline]
    pub fn inverted(self) -> PixelState {
        match self {
            PixelState::Darker => PixelState::Brighter,
            PixelState::Similar => PixelState::Similar,
            PixelState::Brighter => PixelState::Darker,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PixelState::Darker => 'd',
            PixelState::Similar => 's',
            PixelState::Brighter => 'b',
        }
    }
}

/// Darker iff `ring <= center - t`, brighter iff `ring >= center + t`.
#[inline]
pub fn pixel_state(center: u8, ring: u8, t: u8) -> PixelState {
    let (c, v, t) = (center as i16, ring as i16, t as i16);
    if v >= c + t {
        PixelState::Brighter
    } else if v <= c - t {
        PixelState::Darker
    } else {
        PixelState::Similar
    }
}

/// Number of distinct ring configurations, 3^16.
pub const RING_CONFIGS: u32 = 43_046_721;

const EVEN_BITS: u32 = 0x5555_5555;

/// The sixteen ring states of one candidate.
///
/// Stored as 2-bit fields: field `i` (bits `2i..2i+2`) holds the state code
/// of ring index `i + 1`. Numeric order of the packed word coincides with the
/// order of the canonical base-3 index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingConfig(u32);

impl RingConfig {
    pub fn from_states(states: &[PixelState; 16]) -> Self {
        let mut packed = 0u32;
        for (i, s) in states.iter().enumerate() {
            packed |= (*s as u32) << (2 * i);
        }
        RingConfig(packed)
    }

    /// Every ring pixel similar.
    pub const fn uniform() -> Self {
        RingConfig(EVEN_BITS)
    }

    /// Accepts a packed word only if no field holds the unused code 3.
    pub fn from_packed(packed: u32) -> Option<Self> {
        let bad = (packed & (packed >> 1)) & EVEN_BITS;
        (bad == 0).then_some(RingConfig(packed))
    }

    #[inline]
    pub fn packed(self) -> u32 {
        self.0
    }

    /// State at 0-based attribute `i` (ring index `i + 1`).
    #[inline]
    pub fn state(self, i: usize) -> PixelState {
        PixelState::from_code((self.0 >> (2 * i)) & 3)
    }

    pub fn states(self) -> [PixelState; 16] {
        core::array::from_fn(|i| self.state(i))
    }

    /// Canonical base-3 code in `[0, 3^16)`: digit `i` is the state of ring index `i + 1`.
    pub fn index(self) -> u32 {
        (0..16).rev().fold(0u32, |acc, i| acc * 3 + ((self.0 >> (2 * i)) & 3))
    }

    pub fn from_index(mut index: u32) -> Option<Self> {
        if index >= RING_CONFIGS {
            return None;
        }
        let mut packed = 0u32;
        for i in 0..16 {
            packed |= (index % 3) << (2 * i);
            index /= 3;
        }
        Some(RingConfig(packed))
    }

    /// Bit `i` set iff ring index `i + 1` is brighter.
    #[inline]
    pub fn brighter_mask(self) -> u16 {
        compress_even((self.0 >> 1) & EVEN_BITS)
    }

    /// Bit `i` set iff ring index `i + 1` is darker.
    #[inline]
    pub fn darker_mask(self) -> u16 {
        compress_even(!(self.0 | (self.0 >> 1)) & EVEN_BITS)
    }

    /// Same configuration with darker and brighter exchanged.
    pub fn inverted(self) -> Self {
        let low = self.0 & EVEN_BITS;
        let high = (self.0 >> 1) & EVEN_BITS;
        let darker = !(low | high) & EVEN_BITS;
        RingConfig(low | (darker << 1))
    }

    /// All 3^16 configurations in canonical index order.
    pub fn all() -> impl Iterator<Item = RingConfig> {
        let mut next = Some(RingConfig(0));
        core::iter::from_fn(move || {
            let current = next?;
            next = current.successor();
            Some(current)
        })
    }

    fn successor(self) -> Option<RingConfig> {
        let mut packed = self.0;
        for i in 0..16 {
            let shift = 2 * i;
            if (packed >> shift) & 3 < 2 {
                return Some(RingConfig(packed + (1 << shift)));
            }
            packed &= !(3 << shift);
        }
        None
    }
}

#[inline]
fn compress_even(mut x: u32) -> u16 {
    x &= EVEN_BITS;
    x = (x | (x >> 1)) & 0x3333_3333;
    x = (x | (x >> 2)) & 0x0F0F_0F0F;
    x = (x | (x >> 4)) & 0x00FF_00FF;
    x = (x | (x >> 8)) & 0x0000_FFFF;
    x as u16
}

/// True iff `mask` contains a circular run of at least `n` set bits.
#[inline]
pub fn has_circular_run(mask: u16, n: usize) -> bool {
    if n == 0 {
        return true;
    }
    if n > 16 {
        return false;
    }
    let doubled = mask as u32 | ((mask as u32) << 16);
    let mut run = doubled;
    for k in 1..n {
        run &= doubled >> k;
    }
    run != 0
}

/// Segment test on a configuration: some circular run of at least `n` ring
/// pixels is all brighter or all darker.
#[inline]
pub fn is_corner_config(cfg: RingConfig, n: usize) -> bool {
    has_circular_run(cfg.brighter_mask(), n) || has_circular_run(cfg.darker_mask(), n)
}

/// Ring configuration of the candidate at `(x, y)`; the candidate must be
/// at least 3 pixels from every border.
pub fn ring_config(img: &GrayImage, x: usize, y: usize, t: u8) -> RingConfig {
    let center = img.get(x, y);
    let mut packed = 0u32;
    for (i, off) in ring_offsets().iter().enumerate() {
        let v = img.get((x as i32 + off.dx) as usize, (y as i32 + off.dy) as usize);
        packed |= (pixel_state(center, v, t) as u32) << (2 * i);
    }
    RingConfig(packed)
}

/// The FAST-12 high-speed test on a configuration. Returns true when the
/// candidate can be rejected without running the full test.
pub fn high_speed_reject_config(cfg: RingConfig) -> bool {
    let (p1, p9) = (cfg.state(0), cfg.state(8));
    if p1 == PixelState::Similar && p9 == PixelState::Similar {
        return true;
    }
    let compass = [p1, cfg.state(4), p9, cfg.state(12)];
    let brighter = compass.iter().filter(|&&s| s == PixelState::Brighter).count();
    let darker = compass.iter().filter(|&&s| s == PixelState::Darker).count();
    brighter < 3 && darker < 3
}

/// High-speed rejection at an image position (FAST-12 only).
pub fn high_speed_reject(img: &GrayImage, x: usize, y: usize, t: u8) -> bool {
    high_speed_reject_config(ring_config(img, x, y, t))
}

pub fn is_corner_at(img: &GrayImage, x: usize, y: usize, n: usize, t: u8) -> bool {
    is_corner_config(ring_config(img, x, y, t), n)
}

/// Range of rows whose pixels are evaluated.
pub fn interior_rows(img: &GrayImage, margin: usize) -> Range<usize> {
    margin..img.height().saturating_sub(margin).max(margin)
}

/// All positions passing the FAST-n segment test at threshold `t`, in raster
/// order. Candidates within 3 pixels of the border are skipped.
pub fn detect_fast_n(img: &GrayImage, n: usize, t: u8) -> Vec<Point> {
    detect_fast_n_rows(img, n, t, interior_rows(img, RING_MARGIN))
}

/// [`detect_fast_n`] restricted to a range of rows (clipped to the interior).
pub fn detect_fast_n_rows(img: &GrayImage, n: usize, t: u8, rows: Range<usize>) -> Vec<Point> {
    assert!(t >= 1, "threshold must be at least 1");
    let interior = interior_rows(img, RING_MARGIN);
    let mut out = Vec::new();
    if img.width() <= 2 * RING_MARGIN {
        return out;
    }
    let start = rows.start.max(interior.start);
    let end = rows.end.min(interior.end);
    for y in start..end {
        for x in RING_MARGIN..img.width() - RING_MARGIN {
            if is_corner_at(img, x, y, n, t) {
                out.push(Point::new(x as u32, y as u32));
            }
        }
    }
    out
}

/// Largest `t` in 1..=255 at which `(x, y)` passes FAST-n, by binary search
/// over the segment test. `None` if it fails even at `t = 1`.
pub fn segment_score(img: &GrayImage, x: usize, y: usize, n: usize) -> Option<u8> {
    if !is_corner_at(img, x, y, n, 1) {
        return None;
    }
    let (mut lo, mut hi) = (1u16, 256u16);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if is_corner_at(img, x, y, n, mid as u8) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo as u8)
}
