//! 8-bit grayscale rasters, synthetic fixtures and noise.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("pixel buffer holds {actual} bytes, expected {expected}")]
    DataLength { expected: usize, actual: usize },
}

/// Single-channel 8-bit image, row-major, `y` increasing downward.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        let expected = width * height;
        if data.len() != expected {
            return Err(ImageError::DataLength {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant image.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("non-zero dimensions")
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data).expect("non-zero dimensions")
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Number of pixels at least `margin` away from every border.
    pub fn interior_len(&self, margin: usize) -> usize {
        self.width.saturating_sub(2 * margin) * self.height.saturating_sub(2 * margin)
    }

    /// Bilinear sample with clamp-to-edge addressing.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        let x = x.clamp(0.0, max_x);
        let y = y.clamp(0.0, max_y);
        let x0 = libm::floor(x) as usize;
        let y0 = libm::floor(y) as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let top = self.get(x0, y0) as f64 * (1.0 - fx) + self.get(x1, y0) as f64 * fx;
        let bottom = self.get(x0, y1) as f64 * (1.0 - fx) + self.get(x1, y1) as f64 * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// Rotates by 90° clockwise: source `(x, y)` lands at `(height - 1 - y, x)`.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |nx, ny| self.get(ny, h - 1 - nx))
    }

    /// Mirrors left-right: source `(x, y)` lands at `(width - 1 - x, y)`.
    pub fn flip_horizontal(&self) -> Self {
        let w = self.width;
        Self::from_fn(w, self.height, |x, y| self.get(w - 1 - x, y))
    }

    /// Mirrors top-bottom: source `(x, y)` lands at `(x, height - 1 - y)`.
    pub fn flip_vertical(&self) -> Self {
        let h = self.height;
        Self::from_fn(self.width, h, |x, y| self.get(x, h - 1 - y))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }

    /// `I -> 255 - I`.
    pub fn invert(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| 255 - v).collect(),
        }
    }
}

/// Centered axis-aligned `square`×`square` block of `fg` on a `size`×`size`
/// background of `bg`.
pub fn make_test_square(size: usize, square: usize, fg: u8, bg: u8) -> GrayImage {
    assert!(square < size, "square must be smaller than the image");
    let start = (size - square) / 2;
    let end = start + square;
    GrayImage::from_fn(size, size, |x, y| {
        if (start..end).contains(&x) && (start..end).contains(&y) {
            fg
        } else {
            bg
        }
    })
}

/// Adds i.i.d. N(0, sigma²) noise to every pixel, rounding and clamping to
/// [0, 255]. A pure function of `(img, sigma, seed)`.
pub fn add_gaussian_noise(img: &GrayImage, sigma: f64, seed: u64) -> GrayImage {
    assert!(sigma >= 0.0 && sigma.is_finite(), "sigma must be finite and >= 0");
    if sigma == 0.0 {
        return img.clone();
    }
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = img
        .data
        .iter()
        .map(|&v| {
            let noisy = libm::round(v as f64 + normal.sample(&mut rng));
            noisy.clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        data,
    }
}

/// Piecewise-constant scene of random anti-aliased convex polygons over a
/// smooth gradient. Used as a stand-in for natural images in benchmarks.
pub fn synthetic_scene(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: f64 = rng.random_range(60.0..190.0);
    let gx: f64 = rng.random_range(-0.15..0.15);
    let gy: f64 = rng.random_range(-0.15..0.15);
    let mut canvas: Vec<f64> = (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            (base + gx * (x - width as f64 / 2.0) + gy * (y - height as f64 / 2.0)).clamp(0.0, 255.0)
        })
        .collect();

    let shapes = (width * height / 1200).max(4);
    let max_radius = (width.min(height) as f64 / 6.0).max(6.0);
    for _ in 0..shapes {
        let cx = rng.random_range(0.0..width as f64);
        let cy = rng.random_range(0.0..height as f64);
        let radius = rng.random_range(4.0..max_radius);
        let aspect = rng.random_range(0.4..1.0);
        let rotation = rng.random_range(0.0..core::f64::consts::TAU);
        let sides = rng.random_range(3..=6);
        let mut angles: Vec<f64> = (0..sides)
            .map(|_| rng.random_range(0.0..core::f64::consts::TAU))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (sr, cr) = libm::sincos(rotation);
        let poly: Vec<(f64, f64)> = angles
            .iter()
            .map(|&a| {
                let (s, c) = libm::sincos(a);
                let (px, py) = (radius * c, radius * aspect * s);
                (cx + px * cr - py * sr, cy + px * sr + py * cr)
            })
            .collect();
        let value: f64 = rng.random_range(0.0..255.0);
        fill_convex(&mut canvas, width, height, &poly, value);
    }

    let data = canvas
        .into_iter()
        .map(|v| libm::round(v).clamp(0.0, 255.0) as u8)
        .collect();
    GrayImage::new(width, height, data).expect("non-zero dimensions")
}

// 3x3 supersampled coverage; vertices are in angular (counter-clockwise) order.
fn fill_convex(canvas: &mut [f64], width: usize, height: usize, poly: &[(f64, f64)], value: f64) {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in poly {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let xs = libm::floor(x0).max(0.0) as usize;
    let ys = libm::floor(y0).max(0.0) as usize;
    let xe = (libm::ceil(x1).max(0.0) as usize).min(width.saturating_sub(1));
    let ye = (libm::ceil(y1).max(0.0) as usize).min(height.saturating_sub(1));
    if xs > xe || ys > ye {
        return;
    }
    let inside = |px: f64, py: f64| {
        poly.iter().zip(poly.iter().cycle().skip(1)).all(|(&(ax, ay), &(bx, by))| {
            (bx - ax) * (py - ay) - (by - ay) * (px - ax) >= 0.0
        })
    };
    const SUB: [f64; 3] = [-1.0 / 3.0, 0.0, 1.0 / 3.0];
    for y in ys..=ye {
        for x in xs..=xe {
            let mut hits = 0u32;
            for dy in SUB {
                for dx in SUB {
                    if inside(x as f64 + dx, y as f64 + dy) {
                        hits += 1;
                    }
                }
            }
            if hits > 0 {
                let alpha = hits as f64 / 9.0;
                let px = &mut canvas[y * width + x];
                *px = *px * (1.0 - alpha) + value * alpha;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_buffers() {
        assert_eq!(
            GrayImage::new(0, 3, vec![]),
            Err(ImageError::ZeroDimension {
                width: 0,
                height: 3
            })
        );
        assert!(matches!(
            GrayImage::new(2, 2, vec![0; 3]),
            Err(ImageError::DataLength { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn square_fixture_counts() {
        let img = make_test_square(64, 30, 255, 0);
        assert_eq!(img.data().iter().filter(|&&v| v == 255).count(), 900);
        let flat = make_test_square(16, 4, 7, 7);
        assert!(flat.data().iter().all(|&v| v == 7));
        let empty = make_test_square(16, 0, 255, 3);
        assert!(empty.data().iter().all(|&v| v == 3));
    }

    #[test]
    fn noise_zero_sigma_is_identity() {
        let img = synthetic_scene(40, 30, 1);
        assert_eq!(add_gaussian_noise(&img, 0.0, 9), img);
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let img = make_test_square(32, 10, 200, 50);
        let a = add_gaussian_noise(&img, 10.0, 42);
        let b = add_gaussian_noise(&img, 10.0, 42);
        let c = add_gaussian_noise(&img, 10.0, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn noise_clamping_biases_black_image_upward() {
        // 320 x 320 = 102400 samples. Clamping to [0, 255] gives
        // E = s/sqrt(2 pi) (1 - e^-1/2) + 255 P(X > s) ~ 40.0 + 40.5 for s = 255.
        let img = GrayImage::filled(320, 320, 0);
        let noisy = add_gaussian_noise(&img, 255.0, 5);
        let mean = noisy.data().iter().map(|&v| v as f64).sum::<f64>() / noisy.data().len() as f64;
        assert!(mean > 0.0);
        assert!((mean - 80.5).abs() < 3.0, "mean {mean}");
    }

    #[test]
    fn geometric_transforms_compose() {
        let img = synthetic_scene(23, 17, 3);
        let r4 = img.rotate90().rotate90().rotate90().rotate90();
        assert_eq!(r4, img);
        assert_eq!(img.flip_horizontal().flip_horizontal(), img);
        assert_eq!(img.transpose().flip_horizontal(), img.rotate90());
        assert_eq!(img.invert().invert(), img);
        let r = img.rotate90();
        assert_eq!(r.get(img.height() - 1 - 4, 7), img.get(7, 4));
    }

    #[test]
    fn scene_has_structure() {
        let img = synthetic_scene(128, 96, 11);
        let distinct = {
            let mut seen = [false; 256];
            img.data().iter().for_each(|&v| seen[v as usize] = true);
            seen.iter().filter(|&&s| s).count()
        };
        assert!(distinct > 20);
        assert_eq!(img, synthetic_scene(128, 96, 11));
    }

    #[test]
    fn bilinear_hits_pixel_centres() {
        let img = synthetic_scene(20, 20, 4);
        assert_eq!(img.sample_bilinear(3.0, 5.0), img.get(3, 5) as f64);
        let mid = img.sample_bilinear(3.5, 5.0);
        let expect = (img.get(3, 5) as f64 + img.get(4, 5) as f64) / 2.0;
        assert!((mid - expect).abs() < 1e-12);
    }
}
