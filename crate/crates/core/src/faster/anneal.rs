use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::keypoint::Point;
use crate::repeat::Benchmark;

use super::offsets::FasterOffsets;
use super::sixteen::{detect_sixteenfold, Sixteenfold};
use super::tree::{satisfies_constraint, FasterTree, MutationKind};
use super::FasterError;

/// Scales of the three cost factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    /// Repeatability weight.
    pub w_r: f64,
    /// Corners per frame.
    pub w_n: f64,
    /// Decision nodes.
    pub w_s: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            w_r: 1.0,
            w_n: 3500.0,
            w_s: 10000.0,
        }
    }
}

/// `(1 + (w_r/r)²)(1 + mean((d_i/w_n)²))(1 + (s/w_s)²)`; infinite when
/// `r <= 0`.
pub fn cost(r: f64, per_frame: &[usize], size: usize, w: &CostWeights) -> f64 {
    if !(r > 0.0) {
        return f64::INFINITY;
    }
    let rep = 1.0 + (w.w_r / r) * (w.w_r / r);
    let mean = if per_frame.is_empty() {
        0.0
    } else {
        per_frame
            .iter()
            .map(|&d| {
                let q = d as f64 / w.w_n;
                q * q
            })
            .sum::<f64>()
            / per_frame.len() as f64
    };
    let s = size as f64 / w.w_s;
    rep * (1.0 + mean) * (1.0 + s * s)
}

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub weights: CostWeights,
    /// Decay rate of the temperature.
    pub alpha: f64,
    /// Initial temperature.
    pub beta: f64,
    /// Detection threshold used during training.
    pub t: u8,
    pub i_max: u32,
    /// Matching radius for repeatability, pixels.
    pub epsilon: f64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            weights: CostWeights::default(),
            alpha: 30.0,
            beta: 100.0,
            t: 35,
            i_max: 100_000,
            epsilon: 5.0,
        }
    }
}

impl AnnealParams {
    /// The defaults with a budget that finishes in minutes: 5,000 iterations.
    pub fn desk() -> Self {
        Self {
            i_max: 5_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FasterError> {
        let w = &self.weights;
        let positive = [w.w_r, w.w_n, w.w_s, self.alpha, self.beta, self.epsilon];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || self.t == 0 || self.i_max == 0 {
            return Err(FasterError::InvalidParams);
        }
        Ok(())
    }
}

/// Number of independent runs in the full schedule.
pub const DEFAULT_RUNS: usize = 100;
/// Runs in the desk-scale schedule.
pub const DESK_RUNS: usize = 3;

/// `beta * exp(-alpha * i / i_max)`.
pub fn temperature(i: u32, params: &AnnealParams) -> f64 {
    params.beta * libm::exp(-params.alpha * i as f64 / params.i_max as f64)
}

/// Probability of moving from a state of cost `current` to one of cost
/// `proposed` at temperature `temp`.
pub fn acceptance_probability(current: f64, proposed: f64, temp: f64) -> f64 {
    if proposed <= current {
        1.0
    } else {
        libm::exp((current - proposed) / temp)
    }
}

/// What one tree scores on the training sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub repeatability: f64,
    pub per_frame: Vec<usize>,
    pub size: usize,
    pub cost: f64,
}

/// Detects with the sixteen-fold tree on every frame (no suppression) and
/// scores the result.
pub fn evaluate(
    tree: &FasterTree,
    offsets: &FasterOffsets,
    bench: &Benchmark,
    params: &AnnealParams,
) -> Result<Evaluation, FasterError> {
    let detections: Vec<Vec<Point>> = bench
        .frames()
        .iter()
        .map(|img| detect_sixteenfold(&Sixteenfold::new(tree, offsets, img.width()), img, params.t))
        .collect();
    let refs: Vec<&[Point]> = detections.iter().map(|d| d.as_slice()).collect();
    let repeatability = bench.pooled(&refs, params.epsilon)?.ratio();
    let per_frame: Vec<usize> = detections.iter().map(|d| d.len()).collect();
    let size = tree.tree().decision_count();
    let cost = cost(repeatability, &per_frame, size, &params.weights);
    Ok(Evaluation {
        repeatability,
        per_frame,
        size,
        cost,
    })
}

/// One row of the optimizer trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: u32,
    /// Cost of the state kept after the acceptance test.
    pub cost: f64,
    pub best_cost: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone)]
pub struct AnnealResult {
    pub seed: u64,
    pub best: FasterTree,
    pub best_cost: f64,
    pub initial_cost: f64,
    /// Row 0 is the initial tree; row `i` follows iteration `i`.
    pub trace: Vec<TraceRow>,
    /// Mutations applied, by kind.
    pub mutations: Vec<(MutationKind, u32)>,
    /// Mutated trees that broke the similar-branch constraint.
    pub constraint_violations: u32,
}

/// Simulated annealing from a random depth-1 tree. Deterministic for a
/// given `seed`.
pub fn anneal(
    bench: &Benchmark,
    offsets: &FasterOffsets,
    params: &AnnealParams,
    seed: u64,
) -> Result<AnnealResult, FasterError> {
    params.validate()?;
    if bench.frames().is_empty() || bench.pairs().is_empty() {
        return Err(FasterError::EmptyTraining);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = FasterTree::random_depth1(&mut rng);
    let mut current_cost = evaluate(&current, offsets, bench, params)?.cost;
    let initial_cost = current_cost;
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut trace = Vec::with_capacity(params.i_max as usize + 1);
    trace.push(TraceRow {
        iteration: 0,
        cost: current_cost,
        best_cost,
        temperature: temperature(0, params),
    });
    let mut mutations: Vec<(MutationKind, u32)> = Vec::new();
    let mut constraint_violations = 0;

    for i in 1..=params.i_max {
        let mut candidate = current.clone();
        let kind = candidate.mutate(&mut rng);
        match mutations.iter_mut().find(|(k, _)| *k == kind) {
            Some((_, n)) => *n += 1,
            None => mutations.push((kind, 1)),
        }
        if !satisfies_constraint(candidate.tree()) {
            constraint_violations += 1;
        }
        let proposed = evaluate(&candidate, offsets, bench, params)?.cost;
        let temp = temperature(i, params);
        let u: f64 = rng.random();
        if u < acceptance_probability(current_cost, proposed, temp) {
            current = candidate;
            current_cost = proposed;
        }
        if current_cost < best_cost {
            best = current.clone();
            best_cost = current_cost;
        }
        trace.push(TraceRow {
            iteration: i,
            cost: current_cost,
            best_cost,
            temperature: temp,
        });
    }
    mutations.sort();
    Ok(AnnealResult {
        seed,
        best,
        best_cost,
        initial_cost,
        trace,
        mutations,
        constraint_violations,
    })
}

/// Independent runs, one per seed.
#[derive(Debug, Clone)]
pub struct MultiRun {
    pub runs: Vec<AnnealResult>,
    /// Index of the lowest final cost; the earliest run on ties.
    pub best: usize,
}

impl MultiRun {
    pub fn best_run(&self) -> &AnnealResult {
        &self.runs[self.best]
    }
}

/// Anneals once per seed and keeps the cheapest tree.
pub fn multi_run(
    bench: &Benchmark,
    offsets: &FasterOffsets,
    params: &AnnealParams,
    seeds: &[u64],
) -> Result<MultiRun, FasterError> {
    if seeds.is_empty() {
        return Err(FasterError::NoRuns);
    }
    let runs = run_seeds(bench, offsets, params, seeds)?;
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.best_cost < runs[best].best_cost {
            best = k;
        }
    }
    Ok(MultiRun { runs, best })
}

#[cfg(feature = "parallel")]
fn run_seeds(
    bench: &Benchmark,
    offsets: &FasterOffsets,
    params: &AnnealParams,
    seeds: &[u64],
) -> Result<Vec<AnnealResult>, FasterError> {
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| anneal(bench, offsets, params, s)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_seeds(
    bench: &Benchmark,
    offsets: &FasterOffsets,
    params: &AnnealParams,
    seeds: &[u64],
) -> Result<Vec<AnnealResult>, FasterError> {
    seeds.iter().map(|&s| anneal(bench, offsets, params, s)).collect()
}
