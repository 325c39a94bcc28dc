//! Comparison detectors: Harris, Shi–Tomasi and uniformly random points.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::image::GrayImage;
use crate::keypoint::{Keypoint, Point};
use crate::runtime::top_n_exact;

/// Harris sensitivity constant.
pub const HARRIS_K: f64 = 0.04;
/// Standard deviation of the Gaussian window over gradient products.
pub const DEFAULT_BLUR_SIGMA: f64 = 2.5;

/// Gaussian-weighted second-moment matrix `[xx xy; xy yy]` at every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    pub width: usize,
    pub height: usize,
    pub xx: Vec<f64>,
    pub xy: Vec<f64>,
    pub yy: Vec<f64>,
}

impl StructureTensor {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> (f64, f64, f64) {
        let i = y * self.width + x;
        (self.xx[i], self.xy[i], self.yy[i])
    }

    /// `(smaller, larger)` eigenvalue at `(x, y)`.
    pub fn eigenvalues(&self, x: usize, y: usize) -> (f64, f64) {
        let (a, b, c) = self.at(x, y);
        eigenvalues(a, b, c)
    }
}

/// Eigenvalues of the symmetric matrix `[a b; b c]`, smaller first.
pub fn eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = (a + c) / 2.0;
    let half = (a - c) / 2.0;
    let r = libm::sqrt(half * half + b * b);
    (mean - r, mean + r)
}

/// Normalised Gaussian taps truncated at `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let radius = libm::ceil(3.0 * sigma) as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| libm::exp(-((i * i) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Central-difference gradients, products smoothed by a Gaussian of standard
/// deviation `sigma`. Borders replicate the nearest pixel.
pub fn structure_tensor(img: &GrayImage, sigma: f64) -> StructureTensor {
    let (w, h) = (img.width(), img.height());
    let mut xx = vec![0.0; w * h];
    let mut xy = vec![0.0; w * h];
    let mut yy = vec![0.0; w * h];
    for y in 0..h {
        let (ym, yp) = (y.saturating_sub(1), (y + 1).min(h - 1));
        for x in 0..w {
            let (xm, xp) = (x.saturating_sub(1), (x + 1).min(w - 1));
            let gx = (img.get(xp, y) as f64 - img.get(xm, y) as f64) / 2.0;
            let gy = (img.get(x, yp) as f64 - img.get(x, ym) as f64) / 2.0;
            let i = y * w + x;
            xx[i] = gx * gx;
            xy[i] = gx * gy;
            yy[i] = gy * gy;
        }
    }
    let kernel = gaussian_kernel(sigma);
    for plane in [&mut xx, &mut xy, &mut yy] {
        blur_separable(plane, w, h, &kernel);
    }
    StructureTensor {
        width: w,
        height: h,
        xx,
        xy,
        yy,
    }
}

fn blur_separable(plane: &mut [f64], w: usize, h: usize, kernel: &[f64]) {
    let r = (kernel.len() / 2) as isize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &tap) in kernel.iter().enumerate() {
                let sx = (x as isize + k as isize - r).clamp(0, w as isize - 1) as usize;
                acc += tap * row[sx];
            }
            tmp[y * w + x] = acc;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &tap) in kernel.iter().enumerate() {
                let sy = (y as isize + k as isize - r).clamp(0, h as isize - 1) as usize;
                acc += tap * tmp[sy * w + x];
            }
            plane[y * w + x] = acc;
        }
    }
}

/// Per-pixel scalar corner response.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseField {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl ResponseField {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// `det(H) - k trace(H)^2`.
pub fn harris_response(tensor: &StructureTensor, k: f64) -> ResponseField {
    let values = (0..tensor.xx.len())
        .map(|i| {
            let (a, b, c) = (tensor.xx[i], tensor.xy[i], tensor.yy[i]);
            let trace = a + c;
            a * c - b * b - k * trace * trace
        })
        .collect();
    ResponseField {
        width: tensor.width,
        height: tensor.height,
        values,
    }
}

/// Smallest eigenvalue of the tensor.
pub fn shi_tomasi_response(tensor: &StructureTensor) -> ResponseField {
    let values = (0..tensor.xx.len())
        .map(|i| eigenvalues(tensor.xx[i], tensor.xy[i], tensor.yy[i]).0)
        .collect();
    ResponseField {
        width: tensor.width,
        height: tensor.height,
        values,
    }
}

/// Positive-response pixels at least `margin` from the border that survive
/// 3×3 non-maximal suppression, with the same tie rule as
/// [`crate::runtime::nonmax_suppress`]. Raster-ordered.
pub fn response_maxima(field: &ResponseField, margin: usize) -> Vec<Keypoint<f64>> {
    let (w, h) = (field.width, field.height);
    let mut out = Vec::new();
    if w <= 2 * margin || h <= 2 * margin {
        return out;
    }
    let candidate = |x: usize, y: usize| {
        x >= margin && y >= margin && x < w - margin && y < h - margin && field.at(x, y) > 0.0
    };
    for y in margin..h - margin {
        for x in margin..w - margin {
            let v = field.at(x, y);
            if !(v > 0.0) {
                continue;
            }
            let mut keep = true;
            'scan: for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = ((x as isize + dx) as usize, (y as isize + dy) as usize);
                    if !candidate(nx, ny) {
                        continue;
                    }
                    let q = field.at(nx, ny);
                    let earlier = dy < 0 || (dy == 0 && dx < 0);
                    if q > v || (q == v && earlier) {
                        keep = false;
                        break 'scan;
                    }
                }
            }
            if keep {
                out.push(Keypoint::new(x as u32, y as u32, v));
            }
        }
    }
    out
}

/// Non-maximal suppression followed by the `n_features` strongest responses.
pub fn detect_response(field: &ResponseField, n_features: usize, margin: usize) -> Vec<Keypoint<f64>> {
    top_n_exact(&response_maxima(field, margin), n_features)
}

/// Every interior position in a seeded uniformly random order.
pub fn random_order(width: usize, height: usize, margin: usize, seed: u64) -> Vec<Point> {
    let iw = width.saturating_sub(2 * margin);
    let ih = height.saturating_sub(2 * margin);
    let len = iw * ih;
    if len == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    index::sample(&mut rng, len, len)
        .into_iter()
        .map(|i| Point::new((margin + i % iw) as u32, (margin + i / iw) as u32))
        .collect()
}

/// `n_features` distinct uniformly placed interior points, equal scores,
/// raster-ordered. Deterministic per seed.
pub fn detect_random(img: &GrayImage, n_features: usize, seed: u64, margin: usize) -> Vec<Keypoint> {
    let order = random_order(img.width(), img.height(), margin, seed);
    assert!(n_features <= order.len(), "more features requested than interior pixels");
    let mut pts: Vec<Point> = order[..n_features].to_vec();
    pts.sort_unstable();
    pts.into_iter().map(|p| Keypoint::new(p.x, p.y, 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::synthetic_scene;
    use crate::runtime::nonmax_suppress;

    #[test]
    fn constant_image_has_zero_tensor_and_responses() {
        let img = GrayImage::filled(20, 20, 90);
        let t = structure_tensor(&img, 2.5);
        assert!(t.xx.iter().chain(&t.xy).chain(&t.yy).all(|&v| v == 0.0));
        assert!(harris_response(&t, HARRIS_K).values.iter().all(|&v| v == 0.0));
        assert!(shi_tomasi_response(&t).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vertical_edge_tensor_shape() {
        let img = GrayImage::from_fn(40, 40, |x, _| if x < 20 { 10 } else { 200 });
        let t = structure_tensor(&img, 2.5);
        let (a, b, c) = t.at(20, 20);
        assert!(a > 1000.0, "xx {a}");
        assert_eq!(b, 0.0);
        assert_eq!(c, 0.0);
        // Straight edge: one large eigenvalue, one zero -> negative Harris.
        assert!(harris_response(&t, HARRIS_K).at(20, 20) < 0.0);
        assert_eq!(shi_tomasi_response(&t).at(20, 20), 0.0);
    }

    #[test]
    fn closed_forms() {
        let (lo, hi) = eigenvalues(2.0, 0.0, 1.0);
        assert_eq!((lo, hi), (1.0, 2.0));
        // eigenvalues (1, 1): det 1, trace 2.
        let t = StructureTensor {
            width: 1,
            height: 1,
            xx: vec![1.0],
            xy: vec![0.0],
            yy: vec![1.0],
        };
        assert!((harris_response(&t, HARRIS_K).values[0] - 0.84).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_normalised() {
        let k = gaussian_kernel(2.5);
        assert_eq!(k.len(), 17);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_nms_matches_sparse_rule() {
        let img = synthetic_scene(64, 48, 21);
        let field = harris_response(&structure_tensor(&img, 1.0), HARRIS_K);
        let mut sparse = Vec::new();
        for y in 3..45 {
            for x in 3..61 {
                if field.at(x, y) > 0.0 {
                    sparse.push(Keypoint::new(x as u32, y as u32, field.at(x, y)));
                }
            }
        }
        assert_eq!(response_maxima(&field, 3), nonmax_suppress(&sparse));
    }

    #[test]
    fn random_points_distinct_and_inside() {
        let img = GrayImage::filled(30, 20, 0);
        assert!(detect_random(&img, 0, 1, 3).is_empty());
        let pts = detect_random(&img, 200, 1, 3);
        assert_eq!(pts.len(), 200);
        for w in pts.windows(2) {
            assert!(w[0].point() < w[1].point());
        }
        assert!(pts.iter().all(|p| (3..27).contains(&p.x) && (3..17).contains(&p.y)));
        assert_eq!(pts, detect_random(&img, 200, 1, 3));
    }
}
