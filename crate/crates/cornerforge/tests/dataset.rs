use std::fs;

use cornerforge::dataset::{dense_name, homography_name, load_dataset, make_dataset, write_dataset, DatasetParams};
use cornerforge::warpfile::encode_dense;
use cornerforge::Provenance;
use cornerforge_core::detectors::TreeDetector;
use cornerforge_core::image::synthetic_scene;
use cornerforge_core::repeat::{repeatability_curve, DenseMap, PairPolicy, WarpModel};
use cornerforge_core::ring_offsets;

fn fast9() -> TreeDetector {
    TreeDetector {
        tree: cornerforge::assets::fast_tree(9).clone(),
        offsets: ring_offsets().as_slice().to_vec(),
        t: 1,
    }
}

#[test]
fn written_dataset_loads_to_the_same_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let base = synthetic_scene(160, 120, 5);
    let ds = make_dataset(&base, &DatasetParams { frames: 3, ..Default::default() }).unwrap();
    write_dataset(dir.path(), &ds, &Provenance::new("test")).unwrap();
    let loaded = load_dataset(dir.path()).unwrap();
    let direct = ds.benchmark().unwrap();
    assert_eq!(loaded.frames(), direct.frames());
    assert_eq!(loaded.pairs(), direct.pairs());
    let counts = [0, 100, 300];
    assert_eq!(
        repeatability_curve(&loaded, &fast9(), &counts, 5.0).unwrap(),
        repeatability_curve(&direct, &fast9(), &counts, 5.0).unwrap()
    );
}

#[test]
fn adjacent_policy_writes_only_neighbour_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let base = synthetic_scene(64, 48, 1);
    let params = DatasetParams {
        frames: 4,
        policy: PairPolicy::Adjacent,
        ..Default::default()
    };
    write_dataset(dir.path(), &make_dataset(&base, &params).unwrap(), &Provenance::new("test")).unwrap();
    assert!(dir.path().join(homography_name(2, 3)).exists());
    assert!(!dir.path().join(homography_name(0, 2)).exists());
    assert_eq!(load_dataset(dir.path()).unwrap().pairs().len(), 6);
}

#[test]
fn dense_map_takes_precedence_and_can_hide_points() {
    let dir = tempfile::tempdir().unwrap();
    let base = synthetic_scene(96, 72, 8);
    let ds = make_dataset(&base, &DatasetParams { frames: 2, noise: 0.0, ..Default::default() }).unwrap();
    write_dataset(dir.path(), &ds, &Provenance::new("test")).unwrap();

    // A dense rendering of the same homographies changes nothing.
    for (i, j) in [(0, 1), (1, 0)] {
        let h = ds.pair_homography(i, j);
        let mut targets = Vec::new();
        for y in 0..72 {
            for x in 0..96 {
                let (u, v) = h.apply(x as f64, y as f64).unwrap();
                targets.push((u as f32, v as f32));
            }
        }
        let map = DenseMap::new(96, 72, targets, vec![true; 96 * 72]).unwrap();
        fs::write(dir.path().join(dense_name(i, j)), encode_dense(&map)).unwrap();
    }
    let with_dense = load_dataset(dir.path()).unwrap();
    assert!(matches!(with_dense.warp(0, 1), Some(WarpModel::Dense(_))));
    let counts = [200, 400];
    let a = repeatability_curve(&with_dense, &fast9(), &counts, 5.0).unwrap();
    let b = repeatability_curve(&ds.benchmark().unwrap(), &fast9(), &counts, 5.0).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.1 - y.1).abs() < 0.02, "{a:?} {b:?}");
    }

    // Marking everything occluded leaves no useful features for that pair.
    let hidden = DenseMap::new(96, 72, vec![(0.0, 0.0); 96 * 72], vec![false; 96 * 72]).unwrap();
    fs::write(dir.path().join(dense_name(0, 1)), encode_dense(&hidden)).unwrap();
    fs::write(dir.path().join(dense_name(1, 0)), encode_dense(&hidden)).unwrap();
    let occluded = load_dataset(dir.path()).unwrap();
    assert_eq!(repeatability_curve(&occluded, &fast9(), &[200], 5.0).unwrap(), vec![(200, 0.0)]);
}

#[test]
fn corrupt_dense_map_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let base = synthetic_scene(32, 24, 2);
    let ds = make_dataset(&base, &DatasetParams { frames: 2, ..Default::default() }).unwrap();
    write_dataset(dir.path(), &ds, &Provenance::new("test")).unwrap();
    fs::write(dir.path().join(dense_name(0, 1)), b"WARP v1 32 24\n\x00").unwrap();
    let err = load_dataset(dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
