//! Compiles emitted C with the system compiler and compares it with the
//! tree runtime. Runs only when `CORNERFORGE_CC_TEST` is set.

use std::process::Command;

use cornerforge_core::image::synthetic_scene;
use cornerforge_core::learn::{emit_source, EmitTarget};
use cornerforge_core::ring_offsets;
use cornerforge_core::runtime::{detect, CompiledTree};

const HARNESS: &str = r#"
#include <stdio.h>
#include <stdlib.h>
int main(int argc, char** argv) {
    int w = atoi(argv[2]), h = atoi(argv[3]), t = atoi(argv[4]);
    unsigned char* img = malloc((size_t)w * h);
    FILE* f = fopen(argv[1], "rb");
    if (!f || fread(img, 1, (size_t)w * h, f) != (size_t)w * h) return 2;
    for (int y = 3; y < h - 3; y++)
        for (int x = 3; x < w - 3; x++)
            if (corner(img + y * w + x, w, t)) printf("%d %d\n", x, y);
    return 0;
}
"#;

#[test]
fn emitted_c_matches_runtime() {
    if std::env::var_os("CORNERFORGE_CC_TEST").is_none() {
        eprintln!("skipped: set CORNERFORGE_CC_TEST=1 to compile emitted C");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let img = synthetic_scene(150, 110, 12);
    let raw = dir.path().join("img.raw");
    std::fs::write(&raw, img.data()).unwrap();
    for n in [9, 12] {
        let tree = cornerforge::assets::fast_tree(n);
        let src = emit_source(tree, ring_offsets().as_slice(), EmitTarget::C, "corner") + HARNESS;
        let c = dir.path().join(format!("fast{n}.c"));
        let exe = dir.path().join(format!("fast{n}"));
        std::fs::write(&c, src).unwrap();
        let status = Command::new("cc").args(["-O1", "-o"]).arg(&exe).arg(&c).status().unwrap();
        assert!(status.success());
        let compiled = CompiledTree::new(tree, ring_offsets().as_slice(), img.width());
        for t in [5u8, 20, 60] {
            let out = Command::new(&exe)
                .arg(&raw)
                .args(["150", "110", &t.to_string()])
                .output()
                .unwrap();
            assert!(out.status.success());
            let expected: String = detect(&compiled, &img, t)
                .iter()
                .map(|p| format!("{} {}\n", p.x, p.y))
                .collect();
            assert_eq!(String::from_utf8(out.stdout).unwrap(), expected, "n={n} t={t}");
        }
    }
}
