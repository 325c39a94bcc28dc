//! Segment-test corner detection and the machinery around it.
//!
//! The crate is `no_std` with `alloc`. It covers:
//!
//! * the FAST-n segment test and its high-speed rejection test ([`segment`]),
//! * compilation of the segment test into a ternary decision tree by ID3
//!   ([`learn`]) and fast application of such trees ([`runtime`]),
//! * corner scores, 3×3 non-maximal suppression and feature-count control,
//! * Harris / Shi–Tomasi / random baselines ([`baselines`]),
//! * the repeatability benchmark ([`repeat`]),
//! * FAST-ER: simulated annealing over ternary trees applied with
//!   sixteen-fold symmetry, and distillation back to a single tree ([`faster`]).
//!
//! Enable the `parallel` feature for rayon-backed tree building and
//! multi-run annealing. All parallel paths produce the same output as the
//! sequential ones.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod detectors;
pub mod faster;
pub mod image;
pub mod keypoint;
pub mod learn;
pub mod repeat;
pub mod ring;
pub mod runtime;
pub mod segment;
pub mod tree;

pub use image::GrayImage;
pub use keypoint::{Keypoint, Point};
pub use ring::{ring_offsets, Offset, RingOffsets};
pub use segment::{PixelState, RingConfig};
pub use tree::TernaryTree;
