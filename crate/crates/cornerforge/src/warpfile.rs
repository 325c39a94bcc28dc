//! Ground-truth files.
//!
//! A homography file holds nine ASCII reals in row-major order. A dense warp
//! file is the line `WARP v1 <w> <h>` followed by `w*h` little-endian records
//! of `f32 x`, `f32 y`, `u8 visible`, in raster order of the source frame.

use cornerforge_core::repeat::{DenseMap, Homography};

use crate::provenance::strip_header;

pub fn format_homography(h: &Homography) -> String {
    let v = h.to_row_major();
    let mut out = String::new();
    for row in v.chunks(3) {
        out.push_str(&format!("{} {} {}\n", row[0], row[1], row[2]));
    }
    out
}

pub fn parse_homography(text: &str) -> Result<Homography, String> {
    let mut v = Vec::with_capacity(9);
    for (n, line) in strip_header(text) {
        for tok in line.split_whitespace() {
            let x: f64 = tok.parse().map_err(|_| format!("line {n}: {tok:?} is not a number"))?;
            if !x.is_finite() {
                return Err(format!("line {n}: non-finite entry"));
            }
            v.push(x);
        }
    }
    let arr: [f64; 9] = v
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 9 numbers, found {}", v.len()))?;
    Ok(Homography::from_row_major(arr))
}

pub fn encode_dense(map: &DenseMap) -> Vec<u8> {
    let mut out = format!("WARP v1 {} {}\n", map.width, map.height).into_bytes();
    out.reserve(map.targets.len() * 9);
    for (&(x, y), &vis) in map.targets.iter().zip(&map.visible) {
        out.extend_from_slice(&x.to_le_bytes());
        out.extend_from_slice(&y.to_le_bytes());
        out.push(vis as u8);
    }
    out
}

pub fn parse_dense(bytes: &[u8]) -> Result<DenseMap, String> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or("missing WARP header line")?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| "header is not text")?;
    let f: Vec<&str> = header.split(' ').collect();
    let (w, h) = match f.as_slice() {
        ["WARP", "v1", w, h] => (
            w.parse::<usize>().map_err(|_| "bad width")?,
            h.parse::<usize>().map_err(|_| "bad height")?,
        ),
        _ => return Err(format!("unrecognised header {header:?}")),
    };
    let n = w.checked_mul(h).ok_or("dimensions overflow")?;
    let body = &bytes[nl + 1..];
    if body.len() != n * 9 {
        return Err(format!("expected {} record bytes, found {}", n * 9, body.len()));
    }
    let mut targets = Vec::with_capacity(n);
    let mut visible = Vec::with_capacity(n);
    for r in body.chunks_exact(9) {
        let x = f32::from_le_bytes(r[0..4].try_into().unwrap());
        let y = f32::from_le_bytes(r[4..8].try_into().unwrap());
        let v = match r[8] {
            0 => false,
            1 => true,
            b => return Err(format!("visibility byte {b} is not 0 or 1")),
        };
        targets.push((x, y));
        visible.push(v);
    }
    DenseMap::new(w, h, targets, visible).map_err(|e| e.to_string())
}
