use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cornerforge::pgm::{encode_pgm, save_pgm};
use cornerforge::treefile::parse_tree;
use cornerforge_core::image::{add_gaussian_noise, make_test_square, synthetic_scene};
use cornerforge_core::GrayImage;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cornerforge"))
        .args(args)
        .env_remove("CORNERFORGE_JOBS")
        .output()
        .expect("binary runs")
}

fn body_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn constant_image_gives_no_keypoints() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("flat.pgm");
    save_pgm(&img, &GrayImage::filled(40, 30, 128)).unwrap();
    let out = dir.path().join("kp.txt");
    let o = run(&["detect", p(&img), "--algo", "fast-ref", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# cornerforge "));
    assert!(body_lines(&text).is_empty());
}

#[test]
fn square_fixture_has_four_corners() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("sq.pgm");
    save_pgm(&img, &make_test_square(32, 12, 200, 40)).unwrap();
    let o = run(&["detect", p(&img), "--algo", "fast-tree", "--n", "9", "--t", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let pts: Vec<(i32, i32)> = body_lines(&text)
        .iter()
        .map(|l| {
            let f: Vec<i32> = l.split(' ').map(|v| v.parse().unwrap()).collect();
            (f[0], f[1])
        })
        .collect();
    assert_eq!(pts.len(), 4, "{text}");
    // The square spans 10..=21; every keypoint sits near one of its corners.
    for (x, y) in pts {
        assert!([10, 21].iter().any(|c| (x - c).abs() <= 2), "{x}");
        assert!([10, 21].iter().any(|c| (y - c).abs() <= 2), "{y}");
    }
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["detect", "x.pgm", "--algo", "nosuch"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["detect", p(&dir.path().join("absent.pgm"))]).status.code(), Some(2));
    let bad = dir.path().join("bad.pgm");
    fs::write(&bad, b"P5\n4 4\n255\nab").unwrap();
    let o = run(&["detect", p(&bad)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncated"));
    assert_eq!(run(&["learn-tree", p(&bad)]).status.code(), Some(3));
    assert_eq!(run(&["detect", p(&bad), "--t", "0"]).status.code(), Some(1));
    assert_eq!(run(&["learn-tree"]).status.code(), Some(1));
}

#[test]
fn learn_tree_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut imgs = Vec::new();
    for s in 0..2 {
        let path = dir.path().join(format!("i{s}.pgm"));
        save_pgm(&path, &synthetic_scene(120, 90, s)).unwrap();
        imgs.push(path);
    }
    let a = dir.path().join("a.tree");
    let b = dir.path().join("b.tree");
    for out in [&a, &b] {
        let o = run(&["learn-tree", p(&imgs[0]), p(&imgs[1]), "--n", "12", "--t", "15", "-o", p(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains('\r'));
    parse_tree(&text).unwrap();
}

#[test]
fn bench_without_images_writes_an_empty_table() {
    let o = run(&["bench", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(body_lines(&text), vec!["algo,mpix_per_s"]);
}

#[test]
fn make_dataset_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = run(&["make-dataset", "--frames", "3", "--width", "64", "--height", "48", "--seed", "9", "-o", p(d)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 1 + 3 + 6);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn single_frame_dataset_is_the_base() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.pgm");
    let img = synthetic_scene(50, 40, 3);
    save_pgm(&base, &img).unwrap();
    let out = dir.path().join("ds");
    let o = run(&["make-dataset", "--base", p(&base), "--frames", "1", "--noise", "0", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(out.join("frame_000.pgm")).unwrap(), encode_pgm(&img));
}

fn identical_pair(dir: &Path) {
    let img = add_gaussian_noise(&GrayImage::filled(120, 100, 128), 30.0, 5);
    save_pgm(&dir.join("frame_000.pgm"), &img).unwrap();
    save_pgm(&dir.join("frame_001.pgm"), &img).unwrap();
    fs::write(dir.join("dataset.txt"), "frames 2\nsize 120 100\npairs all-ordered\n").unwrap();
    for name in ["H_0_to_1.txt", "H_1_to_0.txt"] {
        fs::write(dir.join(name), "1 0 0\n0 1 0\n0 0 1\n").unwrap();
    }
}

#[test]
fn identical_frames_give_full_area() {
    let dir = tempfile::tempdir().unwrap();
    identical_pair(dir.path());
    let out = dir.path().join("eval");
    let o = run(&["eval-repeat", p(dir.path()), "--algo", "fast-ref:9,fast-tree:12", "-o", p(&out), "--plot"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let auc = fs::read_to_string(out.join("auc.csv")).unwrap();
    assert_eq!(body_lines(&auc), vec!["detector,A", "fast-ref-9,2000", "fast-tree-12,2000"]);
    let curve = fs::read_to_string(out.join("curve_fast-ref-9.csv")).unwrap();
    assert_eq!(body_lines(&curve).len(), 1 + 81);
    assert!(fs::read_to_string(out.join("plot.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn missing_homography_names_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    identical_pair(dir.path());
    fs::remove_file(dir.path().join("H_1_to_0.txt")).unwrap();
    let o = run(&["eval-repeat", p(dir.path()), "--algo", "random", "-o", p(&dir.path().join("e"))]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("pair 1 -> 0") && err.contains("H_1_to_0.txt"), "{err}");
}

#[test]
fn mismatched_frame_size_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    identical_pair(dir.path());
    save_pgm(&dir.path().join("frame_001.pgm"), &GrayImage::filled(60, 50, 0)).unwrap();
    let o = run(&["eval-repeat", p(dir.path()), "--algo", "random", "-o", p(&dir.path().join("e"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    run(&["make-dataset", "--frames", "3", "--width", "96", "--height", "72", "-o", p(&ds)]);
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.path().join(format!("e{jobs}"));
        let o = run(&["--jobs", jobs, "eval-repeat", p(&ds), "--algo", "fast-tree:9,random", "-o", p(&out)]);
        assert_eq!(o.status.code(), Some(0));
        outputs.push(fs::read(out.join("auc.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn anneal_distill_detect_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    run(&["make-dataset", "--frames", "2", "--width", "64", "--height", "48", "--seed", "2", "-o", p(&ds)]);
    let tree = dir.path().join("fe.tree");
    let traces = dir.path().join("traces");
    let o = run(&[
        "anneal", p(&ds), "--imax", "40", "--runs", "2", "--seed", "7", "-o", p(&tree), "--trace-dir", p(&traces),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&tree).unwrap();
    assert!(text.contains("FASTTREE v1 offsets=48\nO 0 -1 4\n"));
    let trace = fs::read_to_string(traces.join("trace_8.csv")).unwrap();
    assert_eq!(body_lines(&trace)[0], "iteration,cost,best_cost,temperature");
    assert_eq!(body_lines(&trace).len(), 42);

    let distilled = dir.path().join("single.tree");
    let frame = ds.join("frame_000.pgm");
    let o = run(&["distill", "--tree", p(&tree), p(&frame), "-o", p(&distilled)]);
    assert_eq!(o.status.code(), Some(0));
    let sixteen = run(&["detect", p(&frame), "--algo", "faster", "--tree", p(&tree), "--t", "35"]);
    assert_eq!(sixteen.status.code(), Some(0));
    let single = run(&["detect", p(&frame), "--algo", "faster", "--distilled", "--tree", p(&distilled), "--t", "35"]);
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(run(&["detect", p(&frame), "--algo", "faster"]).status.code(), Some(1));
}

#[test]
fn emit_writes_one_function() {
    let o = run(&["emit", "--lang", "rust", "--name", "corner9"]);
    assert_eq!(o.status.code(), Some(0));
    let src = String::from_utf8(o.stdout).unwrap();
    assert!(src.starts_with("// cornerforge "));
    assert_eq!(src.matches("pub fn corner9(").count(), 1);
    assert_eq!(run(&["emit", "--name", "9bad"]).status.code(), Some(1));
}
