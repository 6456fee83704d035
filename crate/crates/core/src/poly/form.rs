//! Symmetric multilinear maps stored by multiset index.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::algebra::FiniteBanachAlgebra;
use crate::combinat::{counts_of, multinomial, multisets};
use crate::error::{check_dim, Error, Result};
use crate::space::FiniteSpace;

/// Ranks of non-decreasing index tuples `i₁ ≤ … ≤ i_n` in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct MultisetIndex {
    dim: usize,
    degree: usize,
    keys: Vec<Vec<usize>>,
}

impl MultisetIndex {
    pub fn new(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            keys: multisets(dim, degree),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[Vec<usize>] {
        &self.keys
    }

    /// Rank of `indices` after sorting them.
    pub fn rank(&self, indices: &[usize]) -> Option<usize> {
        if indices.len() != self.degree || indices.iter().any(|&i| i >= self.dim) {
            return None;
        }
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.keys.binary_search(&key).ok()
    }
}

/// A symmetric `n`-linear map `Eⁿ → A`, determined by its values
/// `T(e_{i₁}, …, e_{i_n})` on sorted basis tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricForm {
    space: FiniteSpace,
    algebra: Arc<FiniteBanachAlgebra>,
    index: MultisetIndex,
    coeffs: Vec<Vec<C64>>,
}

impl SymmetricForm {
    /// The zero form of the given degree.
    pub fn zero(space: FiniteSpace, algebra: Arc<FiniteBanachAlgebra>, degree: usize) -> Self {
        let index = MultisetIndex::new(space.dim(), degree);
        let coeffs = vec![algebra.zero(); index.len()];
        Self {
            space,
            algebra,
            index,
            coeffs,
        }
    }

    /// Builds a form from coefficients listed in [`MultisetIndex`] order.
    pub fn from_coeffs(
        space: FiniteSpace,
        algebra: Arc<FiniteBanachAlgebra>,
        degree: usize,
        coeffs: Vec<Vec<C64>>,
    ) -> Result<Self> {
        let index = MultisetIndex::new(space.dim(), degree);
        check_dim(index.len(), coeffs.len())?;
        for c in &coeffs {
            algebra.check(c)?;
        }
        Ok(Self {
            space,
            algebra,
            index,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.index.degree
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn algebra(&self) -> &Arc<FiniteBanachAlgebra> {
        &self.algebra
    }

    pub fn index(&self) -> &MultisetIndex {
        &self.index
    }

    pub fn coeffs(&self) -> &[Vec<C64>] {
        &self.coeffs
    }

    /// `T(e_{i₁}, …, e_{i_n})` for any order of indices.
    pub fn coeff(&self, indices: &[usize]) -> Option<&[C64]> {
        self.index.rank(indices).map(|r| self.coeffs[r].as_slice())
    }

    pub(crate) fn set_coeff(&mut self, rank: usize, value: Vec<C64>) {
        self.coeffs[rank] = value;
    }

    /// `T(x, …, x)`, summing each multiset once with its multinomial count.
    pub fn eval_diagonal(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.space.check(x)?;
        let d = self.space.dim();
        let mut acc = self.algebra.zero();
        for (key, c) in self.index.keys.iter().zip(&self.coeffs) {
            let mult = multinomial(&counts_of(key, d)) as f64;
            let mono: C64 = key.iter().map(|&i| x[i]).product::<C64>() * mult;
            for (a, v) in acc.iter_mut().zip(c) {
                *a += mono * v;
            }
        }
        Ok(acc)
    }

    /// `T(x^k, y^{n−k})`: `x` in the first `k` slots, `y` in the rest.
    pub fn eval_mixed(&self, x: &[C64], k: usize, y: &[C64]) -> Result<Vec<C64>> {
        let n = self.degree();
        if k > n {
            return Err(Error::InvalidArgument(format!(
                "k = {k} exceeds degree {n}"
            )));
        }
        let mut args: Vec<&[C64]> = vec![x; k];
        args.extend(std::iter::repeat_n(y, n - k));
        eval_form(self, &args)
    }

    /// The `(n − m)`-linear form `T(·, …, ·, z₁, …, z_m)` obtained by fixing
    /// the last `m` arguments.
    pub fn contract(&self, tail: &[&[C64]]) -> Result<SymmetricForm> {
        let n = self.degree();
        if tail.len() > n {
            return Err(Error::Arity {
                expected: n,
                found: tail.len(),
            });
        }
        for z in tail {
            self.space.check(z)?;
        }
        let rest = n - tail.len();
        let mut out = SymmetricForm::zero(self.space.clone(), self.algebra.clone(), rest);
        let basis: Vec<Vec<C64>> = (0..self.space.dim()).map(|i| self.space.basis(i)).collect();
        for rank in 0..out.index.len() {
            let key = out.index.keys[rank].clone();
            let mut args: Vec<&[C64]> = key.iter().map(|&i| basis[i].as_slice()).collect();
            args.extend(tail.iter().copied());
            out.coeffs[rank] = contract_args(self, &args);
        }
        Ok(out)
    }
}

/// Multilinear evaluation `T(x₁, …, x_n)`.
pub fn eval_form(form: &SymmetricForm, args: &[&[C64]]) -> Result<Vec<C64>> {
    let n = form.degree();
    if args.len() != n {
        return Err(Error::Arity {
            expected: n,
            found: args.len(),
        });
    }
    for x in args {
        form.space.check(x)?;
    }
    Ok(contract_args(form, args))
}

/// Sum over all index tuples `(i₁, …, i_n)` of `Π x_j[i_j] · T(e_{i₁}, …)`,
/// skipping zero coordinates.
fn contract_args(form: &SymmetricForm, args: &[&[C64]]) -> Vec<C64> {
    let d = form.space.dim();
    let mut acc = form.algebra.zero();
    if args.is_empty() {
        if let Some(c) = form.coeffs.first() {
            acc.clone_from(c);
        }
        return acc;
    }
    let supports: Vec<Vec<usize>> = args
        .iter()
        .map(|x| (0..d).filter(|&i| x[i] != C64::new(0.0, 0.0)).collect())
        .collect();
    if supports.iter().any(|s| s.is_empty()) {
        return acc;
    }
    let n = args.len();
    let mut pos = vec![0usize; n];
    let mut idx = vec![0usize; n];
    loop {
        let mut weight = C64::new(1.0, 0.0);
        for j in 0..n {
            idx[j] = supports[j][pos[j]];
            weight *= args[j][idx[j]];
        }
        let rank = form.index.rank(&idx).expect("indices in range");
        for (a, v) in acc.iter_mut().zip(&form.coeffs[rank]) {
            *a += weight * v;
        }
        // odometer increment
        let mut j = n;
        loop {
            if j == 0 {
                return acc;
            }
            j -= 1;
            pos[j] += 1;
            if pos[j] < supports[j].len() {
                break;
            }
            pos[j] = 0;
        }
    }
}
