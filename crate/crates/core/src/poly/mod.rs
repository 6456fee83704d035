//! Algebra-valued polynomials on finite-dimensional spaces.
//!
//! An `n`-homogeneous polynomial is stored as a weighted power sum
//! `P(x) = Σᵢ λᵢ Tᵢ(x)ⁿ` with linear operators `Tᵢ : E → A`; powers are taken
//! in the algebra `A`. Scalar (nuclear) polynomials are the case `A = ℂ`.

mod calculus;
mod form;

pub use calculus::{
    absorb_weights, coalesce_terms, compose_character, leibniz_expand, leibniz_residual,
    multiply_by_constant, polarize, product_power_sums, unity_decomposition,
};
pub use form::{eval_form, MultisetIndex, SymmetricForm};

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::algebra::FiniteBanachAlgebra;
use crate::error::{check_dim, Error, Result};
use crate::space::FiniteSpace;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 {
            return Err(Error::InvalidArgument("matrix must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Rank-one matrix `a ψᵀ`.
    pub fn outer(a: &[C64], psi: &[C64]) -> Self {
        let mut m = Self::zeros(a.len(), psi.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, pj) in psi.iter().enumerate() {
                m.data[i * psi.len() + j] = ai * pj;
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `a·self + b·other` (same shape).
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

/// A linear operator `E → A` together with its domain and codomain.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    pub matrix: CMatrix,
    pub source: FiniteSpace,
    pub target: Arc<FiniteBanachAlgebra>,
}

impl LinearOperator {
    pub fn new(
        matrix: CMatrix,
        source: FiniteSpace,
        target: Arc<FiniteBanachAlgebra>,
    ) -> Result<Self> {
        check_dim(target.dim(), matrix.rows())?;
        check_dim(source.dim(), matrix.cols())?;
        Ok(Self {
            matrix,
            source,
            target,
        })
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.source.check(x)?;
        Ok(self.matrix.apply(x))
    }
}

/// One summand `λ T(x)ⁿ` of a power sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub weight: C64,
    pub matrix: CMatrix,
}

impl Term {
    pub fn new(weight: C64, matrix: CMatrix) -> Self {
        Self { weight, matrix }
    }

    pub fn unweighted(matrix: CMatrix) -> Self {
        Self::new(C64::new(1.0, 0.0), matrix)
    }
}

/// `P(x) = Σ λᵢ Tᵢ(x)ⁿ`, or a constant when `n = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSumRep {
    degree: usize,
    space: FiniteSpace,
    algebra: Arc<FiniteBanachAlgebra>,
    terms: Vec<Term>,
    constant: Option<Vec<C64>>,
}

impl PowerSumRep {
    /// Homogeneous power sum of degree `degree ≥ 1`.
    pub fn new(
        space: FiniteSpace,
        algebra: Arc<FiniteBanachAlgebra>,
        degree: usize,
        terms: Vec<Term>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument(
                "degree-0 polynomials are built with PowerSumRep::constant".into(),
            ));
        }
        for t in &terms {
            check_dim(algebra.dim(), t.matrix.rows())?;
            check_dim(space.dim(), t.matrix.cols())?;
        }
        Ok(Self {
            degree,
            space,
            algebra,
            terms,
            constant: None,
        })
    }

    pub fn constant(
        space: FiniteSpace,
        algebra: Arc<FiniteBanachAlgebra>,
        value: Vec<C64>,
    ) -> Result<Self> {
        algebra.check(&value)?;
        Ok(Self {
            degree: 0,
            space,
            algebra,
            terms: Vec::new(),
            constant: Some(value),
        })
    }

    /// Scalar nuclear polynomial `Σ λᵢ ψᵢ(x)ⁿ` from functionals.
    pub fn nuclear(space: FiniteSpace, degree: usize, terms: Vec<(C64, Vec<C64>)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(w, psi)| Ok(Term::new(w, CMatrix::from_rows(vec![psi])?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            space,
            Arc::new(FiniteBanachAlgebra::scalar()),
            degree,
            terms,
        )
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn algebra(&self) -> &Arc<FiniteBanachAlgebra> {
        &self.algebra
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant_value(&self) -> Option<&[C64]> {
        self.constant.as_deref()
    }

    pub fn is_scalar(&self) -> bool {
        self.algebra.dim() == 1
    }

    /// The `i`-th operator as a [`LinearOperator`].
    pub fn operator(&self, i: usize) -> LinearOperator {
        LinearOperator {
            matrix: self.terms[i].matrix.clone(),
            source: self.space.clone(),
            target: self.algebra.clone(),
        }
    }

    /// `Σ λᵢ (Tᵢx)ⁿ`.
    pub fn eval(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.space.check(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[C64]) -> Vec<C64> {
        if let Some(c) = &self.constant {
            return c.clone();
        }
        let mut acc = self.algebra.zero();
        for t in &self.terms {
            let y = t.matrix.apply(x);
            let p = self.algebra.pow(&y, self.degree);
            for (a, v) in acc.iter_mut().zip(&p) {
                *a += t.weight * v;
            }
        }
        acc
    }

    /// `Σ |λᵢ| (max_r Σ_j |Tᵢ[r,j]| |x_j|)ⁿ · sⁿ⁻¹`, where `s ≥ 1` bounds the
    /// row sums of the structure tensor: the size of the intermediate
    /// quantities in any evaluation of `P(x)`, and hence the scale of its
    /// rounding error. Unlike [`PowerSumRep::magnitude`] it does not shrink
    /// when `Tᵢx` cancels.
    pub fn evaluation_scale(&self, x: &[C64]) -> f64 {
        if let Some(c) = &self.constant {
            return c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        let s = self.algebra.structure_scale();
        let n = self.degree as i32;
        self.terms
            .iter()
            .map(|t| {
                let row_max = (0..t.matrix.rows())
                    .map(|r| {
                        t.matrix
                            .row(r)
                            .iter()
                            .zip(x)
                            .map(|(a, b)| a.norm() * b.norm())
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max);
                t.weight.norm() * row_max.powi(n) * s.powi(n - 1)
            })
            .sum()
    }

    /// `Σ |λᵢ| ‖Tᵢx‖ⁿ`, which bounds `‖P(x)‖` when the algebra norm is
    /// submultiplicative.
    pub fn magnitude(&self, x: &[C64]) -> f64 {
        if let Some(c) = &self.constant {
            return self.algebra.norm(c);
        }
        self.terms
            .iter()
            .map(|t| {
                t.weight.norm()
                    * self
                        .algebra
                        .norm(&t.matrix.apply(x))
                        .powi(self.degree as i32)
            })
            .sum()
    }

    /// `c·P`, scaling the weights (or the constant).
    pub fn scaled(&self, c: C64) -> Self {
        let mut out = self.clone();
        if let Some(v) = &mut out.constant {
            v.iter_mut().for_each(|z| *z *= c);
        }
        out.terms.iter_mut().for_each(|t| t.weight *= c);
        out
    }

    /// Concatenation of two representations of the same degree.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::Incompatible(format!(
                "cannot add degree {} to degree {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        match (&mut out.constant, &other.constant) {
            (Some(a), Some(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            _ => out.terms.extend(other.terms.iter().cloned()),
        }
        Ok(out)
    }

    pub(crate) fn compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::Incompatible(
                "polynomials live on different spaces".into(),
            ));
        }
        if self.algebra != other.algebra {
            return Err(Error::Incompatible(
                "polynomials take values in different algebras".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn with_terms(&self, degree: usize, terms: Vec<Term>) -> Self {
        Self {
            degree,
            space: self.space.clone(),
            algebra: self.algebra.clone(),
            terms,
            constant: None,
        }
    }
}

/// `P = P₀ + P₁ + … + P_n`, at most one part per degree, sorted by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSum {
    space: FiniteSpace,
    algebra: Arc<FiniteBanachAlgebra>,
    parts: Vec<PowerSumRep>,
}

impl PolynomialSum {
    /// Collects parts, merging parts of equal degree by concatenation.
    pub fn new(
        space: FiniteSpace,
        algebra: Arc<FiniteBanachAlgebra>,
        parts: Vec<PowerSumRep>,
    ) -> Result<Self> {
        let mut out = Self {
            space,
            algebra,
            parts: Vec::new(),
        };
        for p in parts {
            out.add_part(p)?;
        }
        Ok(out)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn algebra(&self) -> &Arc<FiniteBanachAlgebra> {
        &self.algebra
    }

    pub fn parts(&self) -> &[PowerSumRep] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.last().map_or(0, |p| p.degree())
    }

    pub fn part(&self, degree: usize) -> Option<&PowerSumRep> {
        self.parts.iter().find(|p| p.degree() == degree)
    }

    pub fn add_part(&mut self, part: PowerSumRep) -> Result<()> {
        if part.space() != &self.space || part.algebra() != &self.algebra {
            return Err(Error::Incompatible(
                "part does not match the polynomial's space and algebra".into(),
            ));
        }
        match self
            .parts
            .binary_search_by_key(&part.degree(), |p| p.degree())
        {
            Ok(i) => self.parts[i] = self.parts[i].sum(&part)?,
            Err(i) => self.parts.insert(i, part),
        }
        Ok(())
    }

    pub fn eval(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.space.check(x)?;
        let mut acc = self.algebra.zero();
        for p in &self.parts {
            for (a, v) in acc.iter_mut().zip(p.eval_unchecked(x)) {
                *a += v;
            }
        }
        Ok(acc)
    }

    pub fn magnitude(&self, x: &[C64]) -> f64 {
        self.parts.iter().map(|p| p.magnitude(x)).sum()
    }

    pub fn evaluation_scale(&self, x: &[C64]) -> f64 {
        self.parts.iter().map(|p| p.evaluation_scale(x)).sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            space: self.space.clone(),
            algebra: self.algebra.clone(),
            parts: self.parts.iter().map(|p| p.scaled(c)).collect(),
        }
    }

    /// Product of two polynomial sums, part by part through
    /// [`product_power_sums`] (which routes constants to
    /// [`multiply_by_constant`]).
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut out = Self {
            space: self.space.clone(),
            algebra: self.algebra.clone(),
            parts: Vec::new(),
        };
        for p in &self.parts {
            for q in &other.parts {
                out.add_part(product_power_sums(p, q)?)?;
            }
        }
        Ok(out)
    }
}

impl From<PowerSumRep> for PolynomialSum {
    fn from(p: PowerSumRep) -> Self {
        Self {
            space: p.space.clone(),
            algebra: p.algebra.clone(),
            parts: vec![p],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormSpec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar_space(dim: usize) -> FiniteSpace {
        FiniteSpace::new(dim, NormSpec::P(2.0)).unwrap()
    }

    #[test]
    fn eval_square_on_c() {
        let p = PowerSumRep::nuclear(scalar_space(1), 2, vec![(c(1.0, 0.0), vec![c(1.0, 0.0)])])
            .unwrap();
        assert_eq!(p.eval(&[c(3.0, 0.0)]).unwrap(), vec![c(9.0, 0.0)]);
    }

    #[test]
    fn eval_sum_of_squares() {
        let p = PowerSumRep::nuclear(
            scalar_space(2),
            2,
            vec![
                (c(1.0, 0.0), vec![c(1.0, 0.0), c(0.0, 0.0)]),
                (c(1.0, 0.0), vec![c(0.0, 0.0), c(1.0, 0.0)]),
            ],
        )
        .unwrap();
        let (a, b) = (c(1.5, -0.5), c(0.25, 2.0));
        let got = p.eval(&[a, b]).unwrap()[0];
        assert!((got - (a * a + b * b)).norm() < 1e-14);
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let p = PowerSumRep::nuclear(
            scalar_space(2),
            1,
            vec![(c(1.0, 0.0), vec![c(1.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        assert!(matches!(
            p.eval(&[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constant_and_sum_parts() {
        let space = scalar_space(1);
        let alg = Arc::new(FiniteBanachAlgebra::scalar());
        let k = PowerSumRep::constant(space.clone(), alg.clone(), vec![c(2.0, 0.0)]).unwrap();
        let lin =
            PowerSumRep::nuclear(space.clone(), 1, vec![(c(1.0, 0.0), vec![c(1.0, 0.0)])]).unwrap();
        let sum = PolynomialSum::new(space, alg, vec![lin.clone(), k.clone(), lin]).unwrap();
        assert_eq!(sum.parts().len(), 2);
        assert_eq!(sum.degree(), 1);
        assert_eq!(sum.eval(&[c(3.0, 0.0)]).unwrap(), vec![c(8.0, 0.0)]);
    }
}
