//! Synthetic warped-view datasets and their on-disk layout.
//!
//! ```text
//! dataset.txt          manifest: frame count, size, pair policy
//! frame_000.pgm ...    frames
//! H_<i>_to_<j>.txt     homography taking frame i into frame j
//! W_<i>_to_<j>.warp    dense map; preferred over H when both exist
//! ```
//!
//! Frame `k` is the base image seen through a homography `G_k` from frame
//! coordinates into the base plane. `G_0` is the identity.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cornerforge_core::image::add_gaussian_noise;
use cornerforge_core::repeat::{Benchmark, Homography, PairPolicy, WarpModel};
use cornerforge_core::GrayImage;
use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pgm::{encode_pgm, load_pgm};
use crate::provenance::{strip_header, Provenance};
use crate::warpfile::{format_homography, parse_dense, parse_homography};
use crate::{read_text, write_file, Error};

pub const MANIFEST: &str = "dataset.txt";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetParams {
    pub frames: usize,
    /// Largest inward corner displacement as a fraction of the frame size.
    pub warp: f64,
    pub noise: f64,
    pub seed: u64,
    pub policy: PairPolicy,
}

impl Default for DatasetParams {
    fn default() -> Self {
        Self {
            frames: 6,
            warp: 0.15,
            noise: 2.0,
            seed: 0,
            policy: PairPolicy::AllOrdered,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub frames: Vec<GrayImage>,
    /// Frame `k` coordinates into base-image coordinates.
    pub to_base: Vec<Homography>,
    pub policy: PairPolicy,
}

impl Dataset {
    /// Homography taking frame `i` into frame `j`.
    pub fn pair_homography(&self, i: usize, j: usize) -> Homography {
        self.to_base[j]
            .inverse()
            .expect("generated homographies are invertible")
            .compose(&self.to_base[i])
    }

    pub fn benchmark(&self) -> Result<Benchmark, Error> {
        Benchmark::from_homographies(self.frames.clone(), &self.to_base, self.policy)
            .map_err(|e| Error::data(e.to_string()))
    }
}

/// Homography mapping each `src[k]` onto `dst[k]`, `h33 = 1`.
pub fn homography_from_points(src: &[(f64, f64); 4], dst: &[(f64, f64); 4]) -> Option<Homography> {
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut b = SVector::<f64, 8>::zeros();
    for k in 0..4 {
        let ((x, y), (u, v)) = (src[k], dst[k]);
        let r = 2 * k;
        a.row_mut(r).copy_from_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]);
        a.row_mut(r + 1).copy_from_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]);
        b[r] = u;
        b[r + 1] = v;
    }
    let h = a.lu().solve(&b)?;
    Some(Homography::from_row_major([h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0]))
}

fn corners(w: usize, h: usize) -> [(f64, f64); 4] {
    let (mx, my) = ((w - 1) as f64, (h - 1) as f64);
    [(0.0, 0.0), (mx, 0.0), (mx, my), (0.0, my)]
}

/// Corners of the base-plane quadrilateral seen by frame `k > 0`: each
/// corner pulled inward by a random amount, then the quad rotated about the
/// centre by a small angle.
fn view_quad(w: usize, h: usize, warp: f64, rng: &mut ChaCha8Rng) -> [(f64, f64); 4] {
    let (mx, my) = ((w - 1) as f64, (h - 1) as f64);
    let (cx, cy) = (mx / 2.0, my / 2.0);
    let mut q = corners(w, h);
    for (k, p) in q.iter_mut().enumerate() {
        let ix = rng.random_range(0.25..=1.0) * warp * mx;
        let iy = rng.random_range(0.25..=1.0) * warp * my;
        p.0 += if k == 0 || k == 3 { ix } else { -ix };
        p.1 += if k < 2 { iy } else { -iy };
    }
    let theta = rng.random_range(-0.2..=0.2) * warp;
    let (s, c) = theta.sin_cos();
    q.map(|(x, y)| {
        let (dx, dy) = (x - cx, y - cy);
        (cx + c * dx - s * dy, cy + s * dx + c * dy)
    })
}

pub fn make_dataset(base: &GrayImage, params: &DatasetParams) -> Result<Dataset, Error> {
    if params.frames == 0 {
        return Err(Error::Usage("--frames must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&params.warp) {
        return Err(Error::Usage("--warp must lie in [0, 0.5)".into()));
    }
    if !(params.noise >= 0.0 && params.noise.is_finite()) {
        return Err(Error::Usage("--noise must be finite and non-negative".into()));
    }
    let (w, h) = (base.width(), base.height());
    if w < 2 || h < 2 {
        return Err(Error::data("base image must be at least 2x2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut frames = Vec::with_capacity(params.frames);
    let mut to_base = Vec::with_capacity(params.frames);
    for k in 0..params.frames {
        let (frame, g) = if k == 0 {
            (base.clone(), Homography::IDENTITY)
        } else {
            let quad = view_quad(w, h, params.warp, &mut rng);
            let g = homography_from_points(&corners(w, h), &quad)
                .ok_or_else(|| Error::data("degenerate view quadrilateral"))?;
            let frame = GrayImage::from_fn(w, h, |x, y| {
                let (bx, by) = g.apply(x as f64, y as f64).unwrap_or((-1.0, -1.0));
                base.sample_bilinear(bx, by).round().clamp(0.0, 255.0) as u8
            });
            (frame, g)
        };
        let noise_seed = params.seed ^ (k as u64 + 1).wrapping_mul(0xA076_1D64_78BD_642F);
        frames.push(add_gaussian_noise(&frame, params.noise, noise_seed));
        to_base.push(g);
    }
    Ok(Dataset {
        frames,
        to_base,
        policy: params.policy,
    })
}

pub fn frame_name(k: usize) -> String {
    format!("frame_{k:03}.pgm")
}

pub fn homography_name(i: usize, j: usize) -> String {
    format!("H_{i}_to_{j}.txt")
}

pub fn dense_name(i: usize, j: usize) -> String {
    format!("W_{i}_to_{j}.warp")
}

pub fn policy_name(p: PairPolicy) -> &'static str {
    match p {
        PairPolicy::AllOrdered => "all-ordered",
        PairPolicy::Adjacent => "adjacent",
    }
}

pub fn parse_policy(s: &str) -> Option<PairPolicy> {
    match s {
        "all-ordered" => Some(PairPolicy::AllOrdered),
        "adjacent" => Some(PairPolicy::Adjacent),
        _ => None,
    }
}

pub fn write_dataset(dir: &Path, ds: &Dataset, prov: &Provenance) -> Result<(), Error> {
    let (w, h) = (ds.frames[0].width(), ds.frames[0].height());
    let manifest = format!(
        "{}frames {}\nsize {w} {h}\npairs {}\n",
        prov.header(),
        ds.frames.len(),
        policy_name(ds.policy)
    );
    write_file(&dir.join(MANIFEST), manifest)?;
    for (k, f) in ds.frames.iter().enumerate() {
        write_file(&dir.join(frame_name(k)), encode_pgm(f))?;
    }
    for (i, j) in ds.policy.pairs(ds.frames.len()) {
        write_file(&dir.join(homography_name(i, j)), format_homography(&ds.pair_homography(i, j)))?;
    }
    Ok(())
}

struct Manifest {
    frames: usize,
    size: (usize, usize),
    policy: PairPolicy,
}

fn parse_manifest(path: &Path, text: &str) -> Result<Manifest, Error> {
    let bad = |n: usize, what: &str| Error::data(format!("{}:{n}: {what}", path.display()));
    let (mut frames, mut size, mut policy) = (None, None, None);
    for (n, line) in strip_header(text) {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            [] => {}
            ["frames", k] => frames = Some(k.parse().map_err(|_| bad(n, "bad frame count"))?),
            ["size", w, h] => {
                size = Some((
                    w.parse().map_err(|_| bad(n, "bad width"))?,
                    h.parse().map_err(|_| bad(n, "bad height"))?,
                ))
            }
            ["pairs", p] => policy = Some(parse_policy(p).ok_or_else(|| bad(n, "unknown pair policy"))?),
            _ => return Err(bad(n, "unrecognised manifest line")),
        }
    }
    let missing = |k: &str| Error::data(format!("{}: missing `{k}` line", path.display()));
    Ok(Manifest {
        frames: frames.ok_or_else(|| missing("frames"))?,
        size: size.ok_or_else(|| missing("size"))?,
        policy: policy.ok_or_else(|| missing("pairs"))?,
    })
}

/// Loads a dataset directory as a benchmark, validating frame sizes and the
/// presence of a warp for every evaluated pair.
pub fn load_dataset(dir: &Path) -> Result<Benchmark, Error> {
    let mpath = dir.join(MANIFEST);
    let manifest = parse_manifest(&mpath, &read_text(&mpath)?)?;
    if manifest.frames == 0 {
        return Err(Error::data(format!("{}: dataset has no frames", mpath.display())));
    }
    let mut frames = Vec::with_capacity(manifest.frames);
    for k in 0..manifest.frames {
        let p = dir.join(frame_name(k));
        let img = load_pgm(&p)?;
        if (img.width(), img.height()) != manifest.size {
            return Err(Error::data(format!(
                "{}: frame is {}x{}, manifest says {}x{}",
                p.display(),
                img.width(),
                img.height(),
                manifest.size.0,
                manifest.size.1
            )));
        }
        frames.push(img);
    }
    let pairs = manifest.policy.pairs(manifest.frames);
    let mut warps = BTreeMap::new();
    for &(i, j) in &pairs {
        warps.insert((i, j), load_warp(dir, i, j)?);
    }
    Benchmark::new(frames, warps, pairs).map_err(|e| Error::data(format!("{}: {e}", dir.display())))
}

fn load_warp(dir: &Path, i: usize, j: usize) -> Result<WarpModel, Error> {
    let dense: PathBuf = dir.join(dense_name(i, j));
    if dense.exists() {
        let bytes = std::fs::read(&dense).map_err(|e| Error::io(&dense, e))?;
        return parse_dense(&bytes)
            .map(WarpModel::Dense)
            .map_err(|e| Error::data(format!("{}: {e}", dense.display())));
    }
    let hpath = dir.join(homography_name(i, j));
    if !hpath.exists() {
        return Err(Error::data(format!(
            "missing ground truth for pair {i} -> {j}: expected {} or {}",
            homography_name(i, j),
            dense_name(i, j)
        )));
    }
    parse_homography(&read_text(&hpath)?)
        .map(WarpModel::Homography)
        .map_err(|e| Error::data(format!("{}: {e}", hpath.display())))
}
