//! Characters (nonzero multiplicative functionals) of finite algebras.
//!
//! Every character vanishes on the radical, so characters are computed on the
//! semisimple quotient `A / rad A`. The radical is the null space of the trace
//! form `(a, b) ↦ tr(L_{ab})`. On the quotient, multiplication by a generic
//! element has simple eigenvalues, and each eigenvector `v` yields the
//! character `φ(a) = ⟨v, L_a v⟩ / ⟨v, v⟩`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::FiniteBanachAlgebra;
use crate::error::{check_dim, Error, Result};
use crate::search::stream_rng;
use crate::space::pair;
use rand::Rng;

/// Residual tolerance for multiplicativity and unitality.
pub const CHARACTER_TOLERANCE: f64 = 1e-10;

/// A linear functional `φ(a) = Σₖ φ[k] a[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Character {
    pub functional: Vec<C64>,
}

impl Character {
    pub fn new(functional: Vec<C64>) -> Self {
        Self { functional }
    }

    pub fn apply(&self, a: &[C64]) -> C64 {
        pair(&self.functional, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterCheck {
    pub valid: bool,
    pub multiplicative_residual: f64,
    pub unital_residual: f64,
}

/// Checks `φ(eᵢeⱼ) = φ(eᵢ)φ(eⱼ)` on all basis pairs and `φ(𝟏) = 1`.
pub fn validate_character(
    algebra: &FiniteBanachAlgebra,
    phi: &Character,
) -> Result<CharacterCheck> {
    validate_character_with(algebra, phi, CHARACTER_TOLERANCE)
}

pub fn validate_character_with(
    algebra: &FiniteBanachAlgebra,
    phi: &Character,
    tolerance: f64,
) -> Result<CharacterCheck> {
    let d = algebra.dim();
    check_dim(d, phi.functional.len())?;
    let mut mult: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            let prod = algebra.product(&algebra.basis(i), &algebra.basis(j));
            let r = (phi.apply(&prod) - phi.functional[i] * phi.functional[j]).norm();
            mult = mult.max(r);
        }
    }
    let unital = (phi.apply(algebra.identity()) - C64::new(1.0, 0.0)).norm();
    Ok(CharacterCheck {
        valid: mult <= tolerance && unital <= tolerance,
        multiplicative_residual: mult,
        unital_residual: unital,
    })
}

fn to_matrix(rows: &[Vec<C64>]) -> DMatrix<C64> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// All characters of `algebra`, in descending lexicographic order of their
/// coefficient vectors (coordinate projections come out as `e₀, e₁, …`).
///
/// Fails with [`Error::UnsupportedAlgebra`] instead of returning a partial
/// list when the quotient spectrum cannot be separated or a computed
/// functional fails validation.
pub fn enumerate_characters(algebra: &FiniteBanachAlgebra) -> Result<Vec<Character>> {
    let d = algebra.dim();
    if algebra.is_diagonal() {
        return Ok((0..d).map(|i| Character::new(algebra.basis(i))).collect());
    }
    let mults: Vec<DMatrix<C64>> = (0..d)
        .map(|i| to_matrix(&algebra.multiplication_matrix(&algebra.basis(i))))
        .collect();

    // trace form and its null space (the radical)
    let gram = DMatrix::from_fn(d, d, |i, j| (&mults[i] * &mults[j]).trace());
    let svd = gram.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::UnsupportedAlgebra(
            "trace form vanishes identically".into(),
        ));
    }
    // rows of V^H for nonzero singular values span the complement of the radical
    let keep: Vec<usize> = (0..d)
        .filter(|&i| svd.singular_values[i] > 1e-9 * top)
        .collect();
    let r = keep.len();
    let complement = DMatrix::from_fn(d, r, |row, col| v_t[(keep[col], row)].conj());
    let project = |a: &DVector<C64>| -> DVector<C64> { complement.adjoint() * a };

    // quotient multiplication matrices for each basis element of A
    let quotient_mult = |a: &[C64]| -> DMatrix<C64> {
        let mut m = DMatrix::zeros(r, r);
        for l in 0..r {
            let u: Vec<C64> = complement.column(l).iter().cloned().collect();
            let prod = algebra.product(a, &u);
            let q = project(&DVector::from_vec(prod));
            m.set_column(l, &q);
        }
        m
    };
    let basis_quotient: Vec<DMatrix<C64>> =
        (0..d).map(|i| quotient_mult(&algebra.basis(i))).collect();

    for attempt in 0..8u64 {
        let mut rng = stream_rng(0x5EED_C4A2_AC7E_2500, attempt);
        let weights: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut generic = DMatrix::zeros(r, r);
        for (w, m) in weights.iter().zip(&basis_quotient) {
            generic += m * *w;
        }
        let scale = generic.norm().max(1e-300);
        let (_, t) = Schur::new(generic.clone()).unpack();
        let eig: Vec<C64> = (0..r).map(|i| t[(i, i)]).collect();
        let separated =
            (0..r).all(|i| ((i + 1)..r).all(|j| (eig[i] - eig[j]).norm() > 1e-6 * scale));
        if !separated {
            continue;
        }
        let mut chars = Vec::with_capacity(r);
        for lambda in &eig {
            let shifted = &generic - DMatrix::identity(r, r) * *lambda;
            let s = shifted.svd(false, true);
            let vt = s.v_t.expect("requested V");
            let (idx, _) =
                s.singular_values
                    .iter()
                    .enumerate()
                    .fold(
                        (0, f64::INFINITY),
                        |best, (i, v)| if *v < best.1 { (i, *v) } else { best },
                    );
            let v = DVector::from_fn(r, |k, _| vt[(idx, k)].conj());
            let vv = v.dotc(&v);
            let functional: Vec<C64> = basis_quotient
                .iter()
                .map(|m| v.dotc(&(m * &v)) / vv)
                .collect();
            let phi = Character::new(functional);
            let check = validate_character(algebra, &phi)?;
            if !check.valid {
                return Err(Error::UnsupportedAlgebra(format!(
                    "computed functional fails validation (multiplicative {:e}, unital {:e})",
                    check.multiplicative_residual, check.unital_residual
                )));
            }
            chars.push(phi);
        }
        chars.sort_by(|a, b| {
            for (x, y) in a.functional.iter().zip(&b.functional) {
                let o = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        });
        return Ok(chars);
    }
    Err(Error::UnsupportedAlgebra(
        "could not separate the spectrum of the semisimple quotient".into(),
    ))
}
