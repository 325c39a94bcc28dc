//! ID3 over ternary attributes with total (count-weighted) entropy.

use alloc::vec;
use alloc::vec::Vec;

use crate::segment::PixelState;
use crate::tree::TernaryTree;

use super::training::{Features, Record, TrainingSet};
use super::LearnError;

/// Below this many records the three child builds run sequentially.
#[cfg(feature = "parallel")]
const PARALLEL_MIN_RECORDS: usize = 1 << 16;

/// Total entropy `(c + c̄) log2(c + c̄) - c log2 c - c̄ log2 c̄`, with `0 log 0 = 0`.
pub fn entropy(c: u64, cbar: u64) -> f64 {
    fn xlog2x(v: u64) -> f64 {
        if v == 0 {
            0.0
        } else {
            let v = v as f64;
            v * libm::log2(v)
        }
    }
    xlog2x(c + cbar) - xlog2x(c) - xlog2x(cbar)
}

/// Weighted `[state][is_corner]` counts for one attribute.
pub type StateCounts = [[u64; 2]; 3];

/// Information gain `H(P) - H(P_d) - H(P_s) - H(P_b)` of one split.
pub fn information_gain(counts: &StateCounts) -> f64 {
    let c: u64 = counts.iter().map(|s| s[1]).sum();
    let cbar: u64 = counts.iter().map(|s| s[0]).sum();
    // Summed in a fixed order so that attributes whose counts are a
    // permutation of each other get bit-identical gains and tie exactly.
    let mut parts = counts.map(|s| entropy(s[1], s[0]));
    parts.sort_by(f64::total_cmp);
    entropy(c, cbar) - parts[0] - parts[1] - parts[2]
}

fn is_nontrivial(counts: &StateCounts) -> bool {
    counts.iter().filter(|s| s[0] + s[1] > 0).count() >= 2
}

/// Per-attribute weighted counts over `records` in one pass.
pub fn split_counts<F: Features>(records: &[Record<F>]) -> Vec<StateCounts> {
    let mut counts = vec![[[0u64; 2]; 3]; F::ATTRIBUTES];
    for r in records {
        let w = r.weight as u64;
        let label = r.corner as usize;
        for (attr, c) in counts.iter_mut().enumerate() {
            c[r.config.state(attr) as usize][label] += w;
        }
    }
    counts
}

/// Index of the maximum-gain attribute among those that actually split the
/// set; ties go to the lowest index.
fn argmax_gain(counts: &[StateCounts]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (attr, c) in counts.iter().enumerate() {
        if !is_nontrivial(c) {
            continue;
        }
        let gain = information_gain(c);
        if best.map_or(true, |(_, g)| gain > g) {
            best = Some((attr, gain));
        }
    }
    best.map(|(a, _)| a)
}

fn totals<F>(records: &[Record<F>]) -> (u64, u64) {
    records.iter().fold((0, 0), |(c, n), r| {
        if r.corner {
            (c + r.weight as u64, n)
        } else {
            (c, n + r.weight as u64)
        }
    })
}

/// The attribute with the largest information gain. The set must contain
/// both classes.
pub fn best_split<F: Features>(ts: &TrainingSet<F>) -> Result<usize, LearnError> {
    let (c, cbar) = ts.class_weights();
    if c == 0 || cbar == 0 {
        return Err(LearnError::PureSet);
    }
    argmax_gain(&split_counts(ts.records())).ok_or(LearnError::Inconsistent)
}

/// Builds the ID3 tree: recursive max-gain splits until every subset is
/// pure, then merges nodes whose three subtrees are identical.
pub fn build_tree<F: Features>(ts: &TrainingSet<F>) -> Result<TernaryTree, LearnError> {
    build_tree_owned(ts.clone())
}

/// [`build_tree`] consuming the set, which avoids copying large sets.
pub fn build_tree_owned<F: Features>(ts: TrainingSet<F>) -> Result<TernaryTree, LearnError> {
    let mut records = ts.into_records();
    grow(&mut records)
}

fn grow<F: Features>(records: &mut [Record<F>]) -> Result<TernaryTree, LearnError> {
    let (c, cbar) = totals(records);
    if c == 0 {
        return Ok(TernaryTree::Leaf(false));
    }
    if cbar == 0 {
        return Ok(TernaryTree::Leaf(true));
    }
    let counts = split_counts(records);
    let attr = argmax_gain(&counts).ok_or(LearnError::Inconsistent)?;
    debug_assert!(
        counts
            .iter()
            .all(|c| information_gain(c) >= -1e-9 * (1.0 + entropy(c[0][1] + c[1][1] + c[2][1], c[0][0] + c[1][0] + c[2][0]))),
        "negative information gain"
    );
    let [d, s, b] = partition(records, attr);
    let (d, s, b) = grow_three(d, s, b, grow)?;
    Ok(if d == s && s == b {
        d
    } else {
        TernaryTree::node(attr as u8, d, s, b)
    })
}

type Grow<F> = fn(&mut [Record<F>]) -> Result<TernaryTree, LearnError>;

#[cfg(feature = "parallel")]
fn grow_three<F: Features>(
    d: &mut [Record<F>],
    s: &mut [Record<F>],
    b: &mut [Record<F>],
    f: Grow<F>,
) -> Result<(TernaryTree, TernaryTree, TernaryTree), LearnError> {
    if d.len() + s.len() + b.len() < PARALLEL_MIN_RECORDS {
        return Ok((f(d)?, f(s)?, f(b)?));
    }
    let (d, (s, b)) = rayon::join(|| f(d), || rayon::join(|| f(s), || f(b)));
    Ok((d?, s?, b?))
}

#[cfg(not(feature = "parallel"))]
fn grow_three<F: Features>(
    d: &mut [Record<F>],
    s: &mut [Record<F>],
    b: &mut [Record<F>],
    f: Grow<F>,
) -> Result<(TernaryTree, TernaryTree, TernaryTree), LearnError> {
    Ok((f(d)?, f(s)?, f(b)?))
}

/// In-place three-way partition by the state of `attr`: darker, similar, brighter.
fn partition<F: Features>(records: &mut [Record<F>], attr: usize) -> [&mut [Record<F>]; 3] {
    let (mut lo, mut mid, mut hi) = (0usize, 0usize, records.len());
    while mid < hi {
        match records[mid].config.state(attr) {
            PixelState::Darker => {
                records.swap(lo, mid);
                lo += 1;
                mid += 1;
            }
            PixelState::Similar => mid += 1,
            PixelState::Brighter => {
                hi -= 1;
                records.swap(mid, hi);
            }
        }
    }
    let (d, rest) = records.split_at_mut(lo);
    let (s, b) = rest.split_at_mut(mid - lo);
    [d, s, b]
}

/// True when every non-leaf child of the root tests the same offset.
pub fn has_shared_second_test(tree: &TernaryTree) -> bool {
    match tree {
        TernaryTree::Leaf(_) => true,
        TernaryTree::Node { children, .. } => {
            let mut offsets = children.iter().filter_map(|c| c.offset());
            match offsets.next() {
                None => true,
                Some(first) => offsets.all(|o| o == first),
            }
        }
    }
}

/// Returns `tree` unchanged if its second test is already shared; otherwise
/// rebuilds from `ts` with the root's children all testing the single
/// offset of greatest summed gain. Below that level ID3 runs unconstrained.
pub fn force_shared_second_test<F: Features>(
    tree: &TernaryTree,
    ts: &TrainingSet<F>,
) -> Result<TernaryTree, LearnError> {
    if has_shared_second_test(tree) {
        return Ok(tree.clone());
    }
    build_tree_shared(ts)
}

/// ID3 with the second test constrained to one offset.
pub fn build_tree_shared<F: Features>(ts: &TrainingSet<F>) -> Result<TernaryTree, LearnError> {
    let mut records = ts.clone().into_records();
    let (c, cbar) = totals(&records);
    if c == 0 || cbar == 0 {
        return grow(&mut records);
    }
    let root = argmax_gain(&split_counts(&records)).ok_or(LearnError::Inconsistent)?;
    let parts = partition(&mut records, root);

    let mut gains = vec![0.0f64; F::ATTRIBUTES];
    let mut usable = vec![false; F::ATTRIBUTES];
    for part in parts.iter() {
        let (c, cbar) = totals(part);
        if c == 0 || cbar == 0 {
            continue;
        }
        for (attr, counts) in split_counts(part).iter().enumerate() {
            gains[attr] += information_gain(counts);
            usable[attr] |= is_nontrivial(counts);
        }
    }
    let mut second: Option<(usize, f64)> = None;
    for attr in 0..F::ATTRIBUTES {
        if usable[attr] && second.map_or(true, |(_, g)| gains[attr] > g) {
            second = Some((attr, gains[attr]));
        }
    }
    let second = second.map(|(a, _)| a);

    let [pd, ps, pb] = parts;
    let mut children: Vec<TernaryTree> = Vec::with_capacity(3);
    for part in [pd, ps, pb] {
        let (c, cbar) = totals(part);
        let child = match second {
            Some(attr) if c > 0 && cbar > 0 => {
                let [d, s, b] = partition(part, attr);
                let (d, s, b) = grow_three(d, s, b, grow)?;
                TernaryTree::node(attr as u8, d, s, b)
            }
            _ => grow(part)?,
        };
        children.push(child);
    }
    let b = children.pop().unwrap();
    let s = children.pop().unwrap();
    let d = children.pop().unwrap();
    Ok(TernaryTree::node(root as u8, d, s, b))
}
