//! Pixel-rate measurement.

use std::hint::black_box;
use std::time::Instant;

use cornerforge_core::GrayImage;

#[derive(Debug, Clone, PartialEq)]
pub struct Throughput {
    /// Megapixels per second of each timed repetition.
    pub runs: Vec<f64>,
    pub median: f64,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Runs `detect` over every image `warmup` times untimed, then `reps` times
/// timed. `detect` should include suppression and return the feature count.
/// `None` when there is nothing to time.
pub fn measure(images: &[GrayImage], reps: usize, warmup: usize, detect: impl Fn(&GrayImage) -> usize) -> Option<Throughput> {
    let pixels: usize = images.iter().map(|i| i.width() * i.height()).sum();
    if pixels == 0 || reps == 0 {
        return None;
    }
    for _ in 0..warmup {
        for img in images {
            black_box(detect(black_box(img)));
        }
    }
    let runs: Vec<f64> = (0..reps)
        .map(|_| {
            let start = Instant::now();
            for img in images {
                black_box(detect(black_box(img)));
            }
            let secs = start.elapsed().as_secs_f64().max(1e-9);
            pixels as f64 / secs / 1e6
        })
        .collect();
    Some(Throughput {
        median: median(&runs),
        runs,
    })
}
