//! Rewriting algebra-valued polynomials as finite sums `Σ fᵢ ⊗ aᵢ` with
//! scalar nuclear polynomials `fᵢ` and algebra elements `aᵢ`.
//!
//! Given an approximation of the identity on `K`, `F(x) = Σ fᵢ(x) aᵢ` with
//! `sup_K ‖x − F(x)‖ ≤ ε`, the Leibniz formula for the symmetric form `T` of
//! an `n`-homogeneous part gives
//!
//! `T(xⁿ) + Σ_{k<n} g_k(x) = T((x − F(x))ⁿ)`, `g_k(x) = C(n,k) T(x^k, (−F(x))^{n−k})`,
//!
//! so `P ≈ −Σ_{k<n} g_k` up to `‖T‖εⁿ`. Each `g_k` is a sum of products of
//! `fᵢ`'s with the `k`-homogeneous polynomials `x ↦ T(x^k, a^β)`, which are
//! tensorized recursively.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteBanachAlgebra;
use crate::combinat::{binomial, counts_of, multinomial, multisets};
use crate::error::{check_dim, Error, Result};
use crate::norms::{sup_norm_unit_ball, uniform_norm_on_k, BallTarget, CompactSet, Evaluable};
use crate::poly::{
    eval_form, polarize, product_power_sums, PolynomialSum, PowerSumRep, SymmetricForm,
};
use crate::search::SearchBudget;
use crate::space::{pair, sub, FiniteSpace};

/// Safety factor applied to estimated form norms in error bounds, since the
/// estimates are lower bounds.
pub const NORM_SAFETY_FACTOR: f64 = 1.05;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `x ≈ Σ fᵢ(x) aᵢ` on `K`, with linear `fᵢ(x) = ⟨ψᵢ, x⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityApproximation {
    space: FiniteSpace,
    functionals: Vec<Vec<C64>>,
    vectors: Vec<Vec<C64>>,
    epsilon: f64,
}

impl IdentityApproximation {
    /// Builds an approximation and computes `ε = max_K ‖x − Σ fᵢ(x) aᵢ‖`.
    pub fn new(
        space: FiniteSpace,
        functionals: Vec<Vec<C64>>,
        vectors: Vec<Vec<C64>>,
        k: &CompactSet,
    ) -> Result<Self> {
        check_dim(functionals.len(), vectors.len())?;
        for (f, a) in functionals.iter().zip(&vectors) {
            space.check(f)?;
            space.check(a)?;
        }
        check_dim(space.dim(), k.space().dim())?;
        let mut out = Self {
            space,
            functionals,
            vectors,
            epsilon: 0.0,
        };
        out.epsilon = k
            .points()
            .iter()
            .map(|x| out.space.norm(&sub(x, &out.project(x))))
            .fold(0.0, f64::max);
        Ok(out)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn rank(&self) -> usize {
        self.functionals.len()
    }

    pub fn functionals(&self) -> &[Vec<C64>] {
        &self.functionals
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `fᵢ(x)`.
    pub fn coefficient(&self, i: usize, x: &[C64]) -> C64 {
        pair(&self.functionals[i], x)
    }

    /// `F(x) = Σ fᵢ(x) aᵢ`.
    pub fn project(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.space.dim()];
        for (f, a) in self.functionals.iter().zip(&self.vectors) {
            let c = pair(f, x);
            for (o, ak) in out.iter_mut().zip(a) {
                *o += c * ak;
            }
        }
        out
    }

    /// `fᵢ` as a scalar nuclear polynomial of degree 1.
    pub fn function(&self, i: usize) -> PowerSumRep {
        PowerSumRep::nuclear(
            self.space.clone(),
            1,
            vec![(ONE, self.functionals[i].clone())],
        )
        .expect("functional matches the space")
    }

    /// `f^β = Π_{i∈β} fᵢ` as a scalar nuclear polynomial (`1` for empty `β`).
    pub fn monomial(&self, beta: &[usize]) -> Result<PowerSumRep> {
        let mut acc = PowerSumRep::constant(
            self.space.clone(),
            Arc::new(FiniteBanachAlgebra::scalar()),
            vec![ONE],
        )?;
        for &i in beta {
            acc = if acc.degree() == 0 {
                self.function(i)
            } else {
                product_power_sums(&acc, &self.function(i))?
            };
        }
        Ok(acc)
    }

    /// `Π_{i∈β} fᵢ(x)`.
    pub fn monomial_value(&self, beta: &[usize], x: &[C64]) -> C64 {
        beta.iter().map(|&i| self.coefficient(i, x)).product()
    }
}

/// The identity approximation on `K`.
///
/// Without a rank cap (or with a cap ≥ dim) this is the coordinate
/// decomposition `fᵢ = eᵢ*`, `aᵢ = eᵢ`, with `ε = 0`. With a cap `r < dim`
/// it is the orthogonal projection onto the top-`r` eigenvectors of
/// `Σ_{x∈K} x x^H` (the best rank-`r` fit in the Frobenius sense); `ε` is the
/// exact residual on `K` in the norm of `E`.
pub fn finite_rank_identity_approx(
    space: &FiniteSpace,
    k: &CompactSet,
    rank_cap: Option<usize>,
) -> Result<IdentityApproximation> {
    let d = space.dim();
    let r = rank_cap.unwrap_or(d);
    if r == 0 {
        return Err(Error::InvalidArgument("rank cap must be ≥ 1".into()));
    }
    if r >= d {
        let basis: Vec<Vec<C64>> = (0..d).map(|i| space.basis(i)).collect();
        return IdentityApproximation::new(space.clone(), basis.clone(), basis, k);
    }
    let mut gram = DMatrix::<C64>::zeros(d, d);
    for x in k.points() {
        let v = nalgebra::DVector::from_column_slice(x);
        gram += &v * v.adjoint();
    }
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let mut functionals = Vec::with_capacity(r);
    let mut vectors = Vec::with_capacity(r);
    for &j in order.iter().take(r) {
        let u: Vec<C64> = eig.eigenvectors.column(j).iter().cloned().collect();
        functionals.push(u.iter().map(|z| z.conj()).collect());
        vectors.push(u);
    }
    IdentityApproximation::new(space.clone(), functionals, vectors, k)
}

/// A finite sum `Σ fᵢ ⊗ aᵢ`, evaluated as `x ↦ Σ fᵢ(x) aᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement {
    space: FiniteSpace,
    algebra: Arc<FiniteBanachAlgebra>,
    pairs: Vec<(PowerSumRep, Vec<C64>)>,
}

impl TensorElement {
    /// `fᵢ` must be scalar-valued polynomials on `space`; `aᵢ ∈ algebra`.
    pub fn new(
        space: FiniteSpace,
        algebra: Arc<FiniteBanachAlgebra>,
        pairs: Vec<(PowerSumRep, Vec<C64>)>,
    ) -> Result<Self> {
        for (f, a) in &pairs {
            if f.space() != &space {
                return Err(Error::Incompatible(
                    "tensor factor lives on a different space".into(),
                ));
            }
            if !f.is_scalar() {
                return Err(Error::Incompatible(
                    "tensor factors must be scalar-valued".into(),
                ));
            }
            algebra.check(a)?;
        }
        Ok(Self {
            space,
            algebra,
            pairs,
        })
    }

    pub fn zero(space: FiniteSpace, algebra: Arc<FiniteBanachAlgebra>) -> Self {
        Self {
            space,
            algebra,
            pairs: Vec::new(),
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn algebra(&self) -> &Arc<FiniteBanachAlgebra> {
        &self.algebra
    }

    pub fn pairs(&self) -> &[(PowerSumRep, Vec<C64>)] {
        &self.pairs
    }

    pub fn eval(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.space.check(x)?;
        let mut acc = self.algebra.zero();
        for (f, a) in &self.pairs {
            let s = f.eval_unchecked(x)[0];
            for (o, ak) in acc.iter_mut().zip(a) {
                *o += s * ak;
            }
        }
        Ok(acc)
    }
}

impl Evaluable for TensorElement {
    fn target(&self) -> &FiniteBanachAlgebra {
        &self.algebra
    }

    fn source_dim(&self) -> usize {
        self.space.dim()
    }

    fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.eval(x)
    }
}

/// One summand `coef · f^β(x) · Q(x^k)` of a `g_k`, where
/// `Q = T(·^k, a^β)` and `coef = C(n,k) (−1)^{n−k} · #arrangements(β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GPiece {
    pub coef: f64,
    pub beta: Vec<usize>,
    pub form: SymmetricForm,
}

/// `g_k(x) = C(n,k) T(x^k, (−F(x))^{n−k})` expanded into [`GPiece`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct GTerm {
    pub k: usize,
    pub pieces: Vec<GPiece>,
}

impl GTerm {
    pub fn eval(&self, approx: &IdentityApproximation, x: &[C64]) -> Result<Vec<C64>> {
        let mut acc: Option<Vec<C64>> = None;
        for piece in &self.pieces {
            let q = piece.form.eval_diagonal(x)?;
            let s = piece.coef * approx.monomial_value(&piece.beta, x);
            let acc = acc.get_or_insert_with(|| vec![ZERO; q.len()]);
            for (o, v) in acc.iter_mut().zip(q) {
                *o += s * v;
            }
        }
        Ok(acc.unwrap_or_else(|| approx_zero_like(&self.pieces)))
    }
}

fn approx_zero_like(pieces: &[GPiece]) -> Vec<C64> {
    pieces
        .first()
        .map_or_else(Vec::new, |p| p.form.algebra().zero())
}

/// `g₀, …, g_{n−1}` for the form `T` of degree `n ≥ 1`.
pub fn g_terms(form: &SymmetricForm, approx: &IdentityApproximation) -> Result<Vec<GTerm>> {
    let n = form.degree();
    if n == 0 {
        return Err(Error::InvalidArgument("g-terms need degree ≥ 1".into()));
    }
    if form.space() != approx.space() {
        return Err(Error::Incompatible(
            "identity approximation lives on a different space".into(),
        ));
    }
    let r = approx.rank();
    (0..n)
        .map(|k| {
            let m = n - k;
            let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
            let base = binomial(n, k) as f64 * sign;
            let pieces = multisets(r, m)
                .into_iter()
                .map(|beta| {
                    let tail: Vec<&[C64]> =
                        beta.iter().map(|&i| approx.vectors[i].as_slice()).collect();
                    let q = form.contract(&tail)?;
                    let arrangements = multinomial(&counts_of(&beta, r)) as f64;
                    Ok(GPiece {
                        coef: base * arrangements,
                        beta,
                        form: q,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GTerm { k, pieces })
        })
        .collect()
}

/// Direct evaluation of `g_k(x) = C(n,k) T(x^k, (−F(x))^{n−k})`.
pub fn g_direct(
    form: &SymmetricForm,
    approx: &IdentityApproximation,
    k: usize,
    x: &[C64],
) -> Result<Vec<C64>> {
    let n = form.degree();
    let minus_f: Vec<C64> = approx.project(x).into_iter().map(|z| -z).collect();
    let v = form.eval_mixed(x, k, &minus_f)?;
    let c = binomial(n, k) as f64;
    Ok(v.into_iter().map(|z| z * c).collect())
}

/// Output of [`tensorize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Tensorization {
    pub element: TensorElement,
    /// Accumulated bound on `sup_K ‖P − element‖` (see [`tensorize`]).
    pub certified_bound: f64,
    /// `max_K ‖P(x) − element(x)‖`, measured.
    pub measured_error: f64,
    /// Estimated unit-ball norms of every form whose `‖T‖εⁿ` entered the
    /// bound, in recursion order.
    pub form_norms: Vec<f64>,
}

/// Report fields of a [`Tensorization`] suitable for JSON output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorizationSummary {
    pub certified_bound: f64,
    pub measured_error: f64,
    pub pairs: usize,
}

impl Tensorization {
    pub fn summary(&self) -> TensorizationSummary {
        TensorizationSummary {
            certified_bound: self.certified_bound,
            measured_error: self.measured_error,
            pairs: self.element.pairs.len(),
        }
    }
}

/// Coefficients `c_α` of `Σ_α f^α ⊗ c_α`, keyed by the sorted multiset `α`.
type Expansion = BTreeMap<Vec<usize>, Vec<C64>>;

struct Recursion<'a> {
    approx: &'a IdentityApproximation,
    k: &'a CompactSet,
    budget: &'a SearchBudget,
    node: u64,
    form_norms: Vec<f64>,
}

impl Recursion<'_> {
    /// Tensorizes `x ↦ T(xⁿ)`; returns its expansion and error bound.
    fn form(&mut self, form: &SymmetricForm) -> Result<(Expansion, f64)> {
        let n = form.degree();
        let mut out = Expansion::new();
        if n == 0 {
            out.insert(Vec::new(), form.coeffs()[0].clone());
            return Ok((out, 0.0));
        }
        let eps = self.approx.epsilon();
        let mut bound = 0.0;
        if eps > 0.0 {
            let budget = self.budget.child(self.node);
            self.node += 1;
            let t_norm = sup_norm_unit_ball(BallTarget::Form(form), &budget).value;
            self.form_norms.push(t_norm);
            bound += NORM_SAFETY_FACTOR * t_norm * eps.powi(n as i32);
        }
        for g in g_terms(form, self.approx)? {
            for piece in g.pieces {
                let (inner, inner_bound) = self.form(&piece.form)?;
                // P ≈ −Σ g_k
                let coef = -piece.coef;
                if inner_bound > 0.0 {
                    let f_norm = self
                        .k
                        .points()
                        .iter()
                        .map(|x| self.approx.monomial_value(&piece.beta, x).norm())
                        .fold(0.0, f64::max);
                    bound += coef.abs() * f_norm * inner_bound;
                }
                for (gamma, c) in inner {
                    let mut alpha = piece.beta.clone();
                    alpha.extend(gamma);
                    alpha.sort_unstable();
                    let slot = out.entry(alpha).or_insert_with(|| vec![ZERO; c.len()]);
                    for (s, v) in slot.iter_mut().zip(c) {
                        *s += coef * v;
                    }
                }
            }
        }
        Ok((out, bound))
    }
}

/// Rewrites `P` as `Σ_α f^α ⊗ c_α` following the Leibniz recursion.
///
/// Degree-0 parts become `1 ⊗ P₀`. For an `n`-homogeneous part with form `T`,
/// `P_n ≈ −Σ_{k<n} g_k`, and each `g_k` piece `T(·^k, a^β)` is tensorized
/// recursively. Pairs are ordered by degree of `α`, then lexicographically.
///
/// Bound accounting: a node of degree `n` contributes
/// `1.05·‖T‖_est·εⁿ` (omitted when `ε = 0`), plus, for each piece with
/// `k ≥ 1`, `|coef|·max_K |f^β|·bound(T(·^k, a^β))`. This dominates the true
/// error whenever the norm estimates are within the safety factor.
pub fn tensorize(
    p: &PolynomialSum,
    k: &CompactSet,
    approx: &IdentityApproximation,
    budget: &SearchBudget,
) -> Result<Tensorization> {
    if p.space() != approx.space() || p.space() != k.space() {
        return Err(Error::Incompatible(
            "polynomial, compact set and identity approximation must share a space".into(),
        ));
    }
    let mut rec = Recursion {
        approx,
        k,
        budget,
        node: 0,
        form_norms: Vec::new(),
    };
    let mut total = Expansion::new();
    let mut bound = 0.0;
    for part in p.parts() {
        let (expansion, b) = if let Some(c) = part.constant_value() {
            (Expansion::from([(Vec::new(), c.to_vec())]), 0.0)
        } else {
            rec.form(&polarize(part)?)?
        };
        bound += b;
        for (alpha, c) in expansion {
            let slot = total.entry(alpha).or_insert_with(|| vec![ZERO; c.len()]);
            for (s, v) in slot.iter_mut().zip(c) {
                *s += v;
            }
        }
    }
    let mut keys: Vec<Vec<usize>> = total.keys().cloned().collect();
    keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let pairs = keys
        .into_iter()
        .map(|alpha| {
            let c = total.remove(&alpha).expect("key present");
            Ok((approx.monomial(&alpha)?, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let element = TensorElement::new(p.space().clone(), p.algebra().clone(), pairs)?;
    let measured_error = verify_tensorization(p, &element, k)?;
    Ok(Tensorization {
        element,
        certified_bound: bound,
        measured_error,
        form_norms: rec.form_norms,
    })
}

/// `max_K ‖P(x) − t(x)‖`.
pub fn verify_tensorization(p: &PolynomialSum, t: &TensorElement, k: &CompactSet) -> Result<f64> {
    if p.algebra() != t.algebra() {
        return Err(Error::Incompatible(
            "polynomial and tensor take values in different algebras".into(),
        ));
    }
    struct Difference<'a>(&'a PolynomialSum, &'a TensorElement);
    impl Evaluable for Difference<'_> {
        fn target(&self) -> &FiniteBanachAlgebra {
            self.0.algebra()
        }
        fn source_dim(&self) -> usize {
            self.0.space().dim()
        }
        fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
            Ok(sub(&self.0.eval(x)?, &self.1.eval(x)?))
        }
    }
    uniform_norm_on_k(&Difference(p, t), k)
}

/// `T((x − F(x))ⁿ)`, the right-hand side of the g-term identity.
pub fn leibniz_remainder(
    form: &SymmetricForm,
    approx: &IdentityApproximation,
    x: &[C64],
) -> Result<Vec<C64>> {
    let r = sub(x, &approx.project(x));
    let args: Vec<&[C64]> = vec![&r; form.degree()];
    eval_form(form, &args)
}
