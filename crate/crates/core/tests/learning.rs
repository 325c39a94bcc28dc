use std::collections::BTreeMap;

use cornerforge_core::learn::{
    best_split, build_tree, build_tree_shared, has_shared_second_test, LearnError, Record, TrainingSet,
};
use cornerforge_core::{PixelState, RingConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random set over a few active attributes; others stay similar so splits
/// and ties are common.
fn random_set(seed: u64, records: usize, active: usize) -> Option<TrainingSet<RingConfig>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attrs: Vec<usize> = (0..active).map(|_| rng.random_range(0..16)).collect();
    let mut map = BTreeMap::new();
    for _ in 0..records {
        let mut s = [PixelState::Similar; 16];
        for &a in &attrs {
            s[a] = PixelState::from_code(rng.random_range(0..3));
        }
        let cfg = RingConfig::from_states(&s);
        let label = rng.random_bool(0.4);
        let w = rng.random_range(1..6u32);
        map.entry(cfg).or_insert((label, 0)).1 += w;
    }
    let recs: Vec<_> = map
        .into_iter()
        .map(|(config, (corner, weight))| Record { config, weight, corner })
        .collect();
    TrainingSet::from_records(recs).ok()
}

// Gain as parent impurity minus children, each `n * H(p)` with natural
// logarithms converted at the end.
fn oracle_gain(ts: &TrainingSet<RingConfig>, attr: usize) -> (f64, bool) {
    let total = |f: &dyn Fn(&Record<RingConfig>) -> bool| {
        let (mut c, mut n) = (0f64, 0f64);
        for r in ts.records().iter().filter(|r| f(r)) {
            if r.corner {
                c += r.weight as f64;
            } else {
                n += r.weight as f64;
            }
        }
        (c, n)
    };
    let impurity = |(c, n): (f64, f64)| {
        let m = c + n;
        let mut h = 0.0;
        for v in [c, n] {
            if v > 0.0 {
                h -= v * (v / m).ln();
            }
        }
        h / std::f64::consts::LN_2
    };
    let parent = impurity(total(&|_| true));
    let mut children = 0.0;
    let mut nonempty = 0;
    for s in PixelState::ALL {
        let part = total(&|r| r.config.state(attr) == s);
        if part.0 + part.1 > 0.0 {
            nonempty += 1;
        }
        children += impurity(part);
    }
    (parent - children, nonempty >= 2)
}

#[test]
fn best_split_matches_brute_force_on_100_sets() {
    let mut checked = 0;
    let mut seed = 0;
    while checked < 100 {
        seed += 1;
        let Some(ts) = random_set(seed, 40, 5) else { continue };
        let (c, n) = ts.class_weights();
        if c == 0 || n == 0 {
            assert_eq!(best_split(&ts), Err(LearnError::PureSet));
            continue;
        }
        let gains: Vec<(f64, bool)> = (0..16).map(|a| oracle_gain(&ts, a)).collect();
        let max = gains.iter().filter(|g| g.1).map(|g| g.0).fold(f64::NEG_INFINITY, f64::max);
        let expect = gains.iter().position(|g| g.1 && g.0 >= max - 1e-9);
        assert_eq!(best_split(&ts).ok(), expect, "seed {seed}");
        checked += 1;
    }
}

#[test]
fn zero_gain_split_is_not_an_error() {
    // XOR of two attributes: each alone has zero gain, but the labels are
    // a function of the attributes.
    let mut recs = Vec::new();
    for a in [PixelState::Darker, PixelState::Brighter] {
        for b in [PixelState::Darker, PixelState::Brighter] {
            let mut s = [PixelState::Similar; 16];
            s[2] = a;
            s[9] = b;
            recs.push(Record { config: RingConfig::from_states(&s), weight: 1, corner: a == b });
        }
    }
    let ts = TrainingSet::from_records(recs).unwrap();
    assert_eq!(best_split(&ts), Ok(2));
    let tree = build_tree(&ts).unwrap();
    for r in ts.records() {
        assert_eq!(tree.classify(|a| r.config.state(a)), r.corner);
    }
}

#[test]
fn conflicting_labels_are_rejected() {
    let cfg = RingConfig::uniform();
    let recs = vec![
        Record { config: cfg, weight: 1, corner: true },
        Record { config: cfg, weight: 2, corner: false },
    ];
    assert_eq!(TrainingSet::from_records(recs), Err(LearnError::LabelConflict));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn id3_is_exact_on_its_training_data(seed in any::<u64>(), active in 2usize..9) {
        if let Some(ts) = random_set(seed, 120, active) {
            let tree = build_tree(&ts).unwrap();
            for r in ts.records() {
                prop_assert_eq!(tree.classify(|a| r.config.state(a)), r.corner);
            }
            prop_assert_eq!(tree.clone().merge_identical(), tree);

            let shared = build_tree_shared(&ts).unwrap();
            prop_assert!(has_shared_second_test(&shared));
            for r in ts.records() {
                prop_assert_eq!(shared.classify(|a| r.config.state(a)), r.corner);
            }
        }
    }
}
