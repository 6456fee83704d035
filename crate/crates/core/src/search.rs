//! Seeded maximisation over real parameter vectors.
//!
//! Every optimisation-based estimate in the crate goes through [`maximize`]:
//!
//! 1. candidate `i` is drawn from a ChaCha8 stream selected by `i` alone, so
//!    the candidate set never depends on how rayon schedules work;
//! 2. every candidate that beats all earlier candidates (a running record) is
//!    polished by compass search;
//! 3. the answer is the best polished record, ties going to the lowest index.
//!
//! Records of a prefix are records of every longer prefix, so the returned
//! value is nondecreasing in `samples`; compass search only accepts strict
//! improvements, so it is nondecreasing in `refine_steps` as well.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::space::NormSpec;

/// Sample count, refinement sweeps and seed for one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub samples: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            samples: 4096,
            refine_steps: 200,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn new(samples: usize, refine_steps: usize, seed: u64) -> Self {
        Self {
            samples: samples.max(1),
            refine_steps,
            seed,
        }
    }

    /// Same sizes, seed replaced by a child seed for sub-search `index`.
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: derive_seed(self.seed, index),
            ..*self
        }
    }
}

/// SplitMix64 mix of `(seed, index)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator used for candidate `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A certified lower bound together with the point that attains it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Maximiser, one vector per argument slot (a single vector for norms of
    /// maps, `n` vectors for multilinear forms, `(x, φ)` for tensor norms).
    pub witness: Vec<Vec<C64>>,
    pub budget: SearchBudget,
}

/// A real-parameter objective to maximise.
pub trait Landscape: Sync {
    /// Number of real parameters.
    fn dimension(&self) -> usize;

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;

    /// Objective value; non-finite values are treated as `-∞`.
    fn value(&self, params: &[f64]) -> f64;

    /// Deterministic candidates tried before the random ones.
    fn starts(&self) -> Vec<Vec<f64>> {
        Vec::new()
    }

    fn initial_step(&self) -> f64 {
        0.25
    }
}

/// Outcome of [`maximize`].
#[derive(Clone, Debug)]
pub struct Ascent {
    pub value: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Seeded random sampling followed by compass-search refinement of running
/// records. Deterministic for a fixed budget regardless of thread count.
pub fn maximize<L: Landscape + ?Sized>(landscape: &L, budget: &SearchBudget) -> Ascent {
    let starts = landscape.starts();
    let n_starts = starts.len();
    let samples = budget.samples.max(1);

    let mut candidates: Vec<(Vec<f64>, f64)> = starts
        .into_par_iter()
        .map(|p| {
            let v = sanitize(landscape.value(&p));
            (p, v)
        })
        .collect();
    let drawn: Vec<(Vec<f64>, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(budget.seed, i);
            let p = landscape.sample(&mut rng);
            let v = sanitize(landscape.value(&p));
            (p, v)
        })
        .collect();
    candidates.extend(drawn);

    let mut records = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (i, (_, v)) in candidates.iter().enumerate() {
        if *v > best || (records.is_empty() && *v == best) {
            best = *v;
            records.push(i);
        }
    }

    let polished: Vec<(usize, Vec<f64>, f64, usize)> = records
        .par_iter()
        .map(|&i| {
            let (p, v) = &candidates[i];
            let (p, v, evals) = compass(landscape, p.clone(), *v, budget.refine_steps);
            (i, p, v, evals)
        })
        .collect();

    let mut evaluations = n_starts + samples;
    let mut out: Option<(Vec<f64>, f64)> = None;
    for (_, p, v, evals) in polished {
        evaluations += evals;
        match &out {
            Some((_, bv)) if v <= *bv => {}
            _ => out = Some((p, v)),
        }
    }
    let (params, value) = out.expect("at least one candidate");
    Ascent {
        value,
        params,
        evaluations,
    }
}

fn compass<L: Landscape + ?Sized>(
    landscape: &L,
    mut p: Vec<f64>,
    mut v: f64,
    sweeps: usize,
) -> (Vec<f64>, f64, usize) {
    let mut step = landscape.initial_step();
    let mut evals = 0;
    if !v.is_finite() {
        return (p, v, evals);
    }
    for _ in 0..sweeps {
        if step < 1e-13 {
            break;
        }
        let before = v;
        let mut improved = false;
        for c in 0..p.len() {
            for dir in [1.0, -1.0] {
                let old = p[c];
                p[c] = old + dir * step;
                let trial = sanitize(landscape.value(&p));
                evals += 1;
                if trial > v {
                    v = trial;
                    improved = true;
                    break;
                }
                p[c] = old;
            }
        }
        if !improved {
            step *= 0.5;
        } else if v - before <= 1e-12 * v.abs() {
            break;
        }
    }
    (p, v, evals)
}

/// How a block of complex coordinates is pushed onto a unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub enum Gauge {
    /// Unit sphere of a norm.
    Norm(NormSpec),
    /// Unit sphere of the dual norm (functionals).
    Dual(NormSpec),
}

impl Gauge {
    fn measure(&self, z: &[C64]) -> f64 {
        match self {
            Gauge::Norm(spec) => spec.norm(z),
            Gauge::Dual(spec) => spec.dual_norm(z),
        }
    }
}

/// Polar parametrisation of a product of unit spheres.
///
/// Each complex coordinate is stored as `(r, θ)`; a block is mapped to the
/// sphere by radial projection `z / ‖z‖`, which is exact for every norm.
#[derive(Clone, Debug)]
pub struct SphereChart {
    blocks: Vec<(usize, Gauge)>,
}

impl SphereChart {
    pub fn new(blocks: Vec<(usize, Gauge)>) -> Self {
        Self { blocks }
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|(d, _)| 2 * d).sum()
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut params = Vec::with_capacity(self.dimension());
        for (dim, _) in &self.blocks {
            for _ in 0..*dim {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let z = C64::new(re, im);
                params.push(z.norm());
                params.push(z.arg());
            }
        }
        params
    }

    /// Unit vectors for every block, or `None` when a block degenerates.
    pub fn points(&self, params: &[f64]) -> Option<Vec<Vec<C64>>> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut offset = 0;
        for (dim, gauge) in &self.blocks {
            let z: Vec<C64> = (0..*dim)
                .map(|k| C64::from_polar(params[offset + 2 * k], params[offset + 2 * k + 1]))
                .collect();
            offset += 2 * dim;
            let n = gauge.measure(&z);
            if !(n > 0.0 && n.is_finite()) {
                return None;
            }
            out.push(z.into_iter().map(|c| c / n).collect());
        }
        Some(out)
    }

    /// Polar parameters of the given block vectors.
    pub fn params_of(&self, points: &[Vec<C64>]) -> Vec<f64> {
        points
            .iter()
            .flat_map(|v| v.iter().flat_map(|z| [z.norm(), z.arg()]))
            .collect()
    }
}
