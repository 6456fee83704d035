//! Seeded random instances for property checks and verification suites.
//!
//! Every generator draws from the caller's generator only, so a suite that
//! derives one [`stream_rng`](crate::search::stream_rng) per instance gets the
//! same instance regardless of how instances are scheduled.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::FiniteBanachAlgebra;
use crate::norms::CompactSet;
use crate::poly::{CMatrix, PowerSumRep, Term};
use crate::space::{FiniteSpace, NormSpec};

/// Complex number with independent standard normal parts.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex number uniform in the square `[-1, 1]²`.
pub fn unit_square<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| unit_square(rng)).collect()
}

/// One of `ℓ¹`, `ℓ²`, `ℓ³` and `ℓ^∞`.
pub fn norm_spec<R: Rng + ?Sized>(rng: &mut R) -> NormSpec {
    match rng.random_range(0..4) {
        0 => NormSpec::P(1.0),
        1 => NormSpec::P(2.0),
        2 => NormSpec::P(3.0),
        _ => NormSpec::Sup,
    }
}

/// A space of dimension `1..=max_dim` with a random [`norm_spec`].
pub fn space<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> FiniteSpace {
    let dim = rng.random_range(1..=max_dim.max(1));
    FiniteSpace::new(dim, norm_spec(rng)).expect("valid space")
}

/// A pointwise algebra of dimension `1..=max_dim` with a random norm.
pub fn pointwise_algebra<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> FiniteBanachAlgebra {
    let dim = rng.random_range(1..=max_dim.max(1));
    FiniteBanachAlgebra::pointwise(dim, norm_spec(rng)).expect("valid algebra")
}

/// A Lourenço algebra of dimension `dim ≥ 2` with unit `e₀` and random `ψ`
/// (`ψ(e₀) = 1`).
pub fn lourenco_algebra<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> FiniteBanachAlgebra {
    let base = norm_spec(rng);
    let space = FiniteSpace::new(dim, base).expect("valid space");
    let mut psi = vector(rng, dim);
    psi[0] = C64::new(1.0, 0.0);
    let unit = space.basis(0);
    FiniteBanachAlgebra::lourenco(&space, psi, unit).expect("valid Lourenço algebra")
}

/// Pointwise algebras two times out of three, otherwise a Lourenço algebra
/// (when `max_dim ≥ 2`).
pub fn algebra<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> FiniteBanachAlgebra {
    if max_dim >= 2 && rng.random_range(0..3) == 0 {
        let dim = rng.random_range(2..=max_dim);
        lourenco_algebra(rng, dim)
    } else {
        pointwise_algebra(rng, max_dim)
    }
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_rows((0..rows).map(|_| vector(rng, cols)).collect()).expect("nonempty matrix")
}

/// `Σ λᵢ Tᵢ(x)ⁿ` with `terms` random terms (`degree ≥ 1`) or a random
/// constant (`degree = 0`).
pub fn power_sum<R: Rng + ?Sized>(
    rng: &mut R,
    space: &FiniteSpace,
    algebra: &Arc<FiniteBanachAlgebra>,
    degree: usize,
    terms: usize,
) -> PowerSumRep {
    if degree == 0 {
        return PowerSumRep::constant(space.clone(), algebra.clone(), vector(rng, algebra.dim()))
            .expect("valid constant");
    }
    let terms = (0..terms)
        .map(|_| Term::new(unit_square(rng), matrix(rng, algebra.dim(), space.dim())))
        .collect();
    PowerSumRep::new(space.clone(), algebra.clone(), degree, terms).expect("valid power sum")
}

/// `count` points with coordinates in the unit square, then scaled by
/// `radius`.
pub fn points<R: Rng + ?Sized>(
    rng: &mut R,
    space: &FiniteSpace,
    count: usize,
    radius: f64,
) -> Vec<Vec<C64>> {
    (0..count)
        .map(|_| {
            vector(rng, space.dim())
                .into_iter()
                .map(|z| z * radius)
                .collect()
        })
        .collect()
}

pub fn compact<R: Rng + ?Sized>(
    rng: &mut R,
    space: &FiniteSpace,
    count: usize,
    radius: f64,
) -> CompactSet {
    CompactSet::new(space.clone(), points(rng, space, count.max(1), radius)).expect("nonempty set")
}

/// `count` equally spaced points on the unit circle of `ℂ`.
pub fn circle(count: usize) -> CompactSet {
    let space = FiniteSpace::new(1, NormSpec::P(2.0)).expect("valid space");
    let pts = (0..count)
        .map(|j| {
            vec![C64::from_polar(
                1.0,
                std::f64::consts::TAU * j as f64 / count as f64,
            )]
        })
        .collect();
    CompactSet::new(space, pts).expect("nonempty set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::stream_rng;

    #[test]
    fn generators_are_reproducible() {
        let a = power_sum(
            &mut stream_rng(5, 1),
            &FiniteSpace::new(2, NormSpec::Sup).unwrap(),
            &Arc::new(FiniteBanachAlgebra::scalar()),
            3,
            2,
        );
        let b = power_sum(
            &mut stream_rng(5, 1),
            &FiniteSpace::new(2, NormSpec::Sup).unwrap(),
            &Arc::new(FiniteBanachAlgebra::scalar()),
            3,
            2,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn lourenco_instances_are_valid() {
        let mut rng = stream_rng(1, 0);
        for d in 2..=4 {
            let a = lourenco_algebra(&mut rng, d);
            assert!(a.measure_submultiplicativity(200, 3) <= 1.0 + 1e-12);
        }
    }
}
