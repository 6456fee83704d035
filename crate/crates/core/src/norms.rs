//! Norms of polynomials, forms, operators and tensors.
//!
//! Uniform norms over a [`CompactSet`] are exact maxima over a finite point
//! cloud. Unit-ball norms are certified lower bounds obtained by
//! [`maximize`](crate::search::maximize); each comes with the witness that
//! attains it. Nuclear bounds use certified *upper* bounds for operator norms
//! so that `‖P‖ ≤ Σ|λᵢ|‖Tᵢ‖ⁿ` holds for the value actually reported.

use num_complex::Complex64 as C64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteBanachAlgebra;
use crate::error::{check_dim, Error, Result};
use crate::poly::{eval_form, LinearOperator, PolynomialSum, PowerSumRep, SymmetricForm};
use crate::search::{maximize, Gauge, Landscape, NormEstimate, SearchBudget, SphereChart};
use crate::space::{FiniteSpace, NormSpec};

/// Slack for comparisons between exact quantities in the growth bound.
pub const GROWTH_SLACK: f64 = 1e-9;

/// A finite point cloud `K ⊂ E` with cached radius `M = max ‖x‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactSet {
    space: FiniteSpace,
    points: Vec<Vec<C64>>,
    radius: f64,
}

impl CompactSet {
    pub fn new(space: FiniteSpace, points: Vec<Vec<C64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument(
                "a compact set needs at least one point".into(),
            ));
        }
        for p in &points {
            space.check(p)?;
        }
        let radius = points.iter().map(|p| space.norm(p)).fold(0.0, f64::max);
        Ok(Self {
            space,
            points,
            radius,
        })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn points(&self) -> &[Vec<C64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `{c·x : x ∈ K}`.
    pub fn scaled(&self, c: f64) -> Self {
        let points: Vec<Vec<C64>> = self
            .points
            .iter()
            .map(|p| p.iter().map(|z| z * c).collect())
            .collect();
        Self::new(self.space.clone(), points).expect("scaling preserves shape")
    }
}

/// A map `E → A` that can be evaluated pointwise.
pub trait Evaluable: Sync {
    fn target(&self) -> &FiniteBanachAlgebra;

    fn source_dim(&self) -> usize;

    fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>>;
}

impl Evaluable for PowerSumRep {
    fn target(&self) -> &FiniteBanachAlgebra {
        self.algebra()
    }

    fn source_dim(&self) -> usize {
        self.space().dim()
    }

    fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.eval(x)
    }
}

impl Evaluable for PolynomialSum {
    fn target(&self) -> &FiniteBanachAlgebra {
        self.algebra()
    }

    fn source_dim(&self) -> usize {
        self.space().dim()
    }

    fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.eval(x)
    }
}

/// `‖f‖_K = max_{x∈K} ‖f(x)‖`, exactly, with the index of a maximising point
/// (the lowest one on ties).
pub fn uniform_norm_with_index<F: Evaluable + ?Sized>(
    f: &F,
    k: &CompactSet,
) -> Result<(f64, usize)> {
    check_dim(k.space.dim(), f.source_dim())?;
    let values: Vec<f64> = k
        .points
        .par_iter()
        .map(|x| f.evaluate(x).map(|v| f.target().norm(&v)))
        .collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.0 {
            best = (v, i);
        }
    }
    Ok(best)
}

/// `‖f‖_K = max_{x∈K} ‖f(x)‖`.
pub fn uniform_norm_on_k<F: Evaluable + ?Sized>(f: &F, k: &CompactSet) -> Result<f64> {
    uniform_norm_with_index(f, k).map(|(v, _)| v)
}

/// Objects whose norm over the closed unit ball (or unit balls, for forms)
/// can be estimated.
#[derive(Clone, Copy, Debug)]
pub enum BallTarget<'a> {
    /// `sup{‖P(x)‖ : ‖x‖ ≤ 1}`.
    Polynomial(&'a PowerSumRep),
    /// `sup{‖T(x₁,…,x_n)‖ : ‖x_j‖ ≤ 1}`.
    Form(&'a SymmetricForm),
}

impl BallTarget<'_> {
    fn space(&self) -> &FiniteSpace {
        match self {
            BallTarget::Polynomial(p) => p.space(),
            BallTarget::Form(t) => t.space(),
        }
    }

    fn slots(&self) -> usize {
        match self {
            BallTarget::Polynomial(_) => 1,
            BallTarget::Form(t) => t.degree(),
        }
    }

    fn value(&self, points: &[Vec<C64>]) -> f64 {
        match self {
            BallTarget::Polynomial(p) => p.algebra().norm(&p.eval_unchecked(&points[0])),
            BallTarget::Form(t) => {
                let args: Vec<&[C64]> = points.iter().map(|v| v.as_slice()).collect();
                eval_form(t, &args).map_or(f64::NEG_INFINITY, |v| t.algebra().norm(&v))
            }
        }
    }

    /// Unit vectors likely to be near-optimal: norming points of every row
    /// of every operator (or coefficient), and the basis vectors.
    fn seed_points(&self) -> Vec<Vec<C64>> {
        let space = self.space();
        let mut out: Vec<Vec<C64>> = Vec::new();
        if let BallTarget::Polynomial(p) = self {
            for t in p.terms() {
                for r in 0..t.matrix.rows() {
                    if let Some(x) = space.norm_spec().dual_maximizer(t.matrix.row(r)) {
                        out.push(x);
                    }
                }
            }
        }
        out.extend((0..space.dim()).map(|k| space.basis(k)));
        out.into_iter()
            .filter_map(|x| normalize(space.norm_spec(), &x))
            .collect()
    }
}

fn normalize(norm: &NormSpec, x: &[C64]) -> Option<Vec<C64>> {
    let n = norm.norm(x);
    (n > 0.0 && n.is_finite()).then(|| x.iter().map(|z| z / n).collect())
}

struct Ball<'a> {
    target: BallTarget<'a>,
    chart: SphereChart,
    starts: Vec<Vec<f64>>,
}

impl Landscape for Ball<'_> {
    fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.chart.sample(rng)
    }

    fn value(&self, params: &[f64]) -> f64 {
        match self.chart.points(params) {
            Some(p) => self.target.value(&p),
            None => f64::NEG_INFINITY,
        }
    }

    fn starts(&self) -> Vec<Vec<f64>> {
        self.starts.clone()
    }
}

/// Lower bound for the unit-ball norm with its witness on the unit sphere(s).
pub fn sup_norm_unit_ball(target: BallTarget<'_>, budget: &SearchBudget) -> NormEstimate {
    sup_norm_unit_ball_with_hints(target, budget, &[])
}

/// As [`sup_norm_unit_ball`], also trying the given argument tuples
/// (normalised onto the sphere) as starting points.
pub fn sup_norm_unit_ball_with_hints(
    target: BallTarget<'_>,
    budget: &SearchBudget,
    hints: &[Vec<Vec<C64>>],
) -> NormEstimate {
    let space = target.space().clone();
    let slots = target.slots();
    if slots == 0 || matches!(target, BallTarget::Polynomial(p) if p.degree() == 0) {
        let witness = vec![vec![C64::new(0.0, 0.0); space.dim()]; slots.max(1)];
        let value = match target {
            BallTarget::Polynomial(p) => p.algebra().norm(&p.eval_unchecked(&witness[0])),
            BallTarget::Form(t) => t.algebra().norm(&t.coeffs()[0]),
        };
        return NormEstimate {
            value,
            witness: if slots == 0 { Vec::new() } else { witness },
            budget: *budget,
        };
    }
    let chart = SphereChart::new(vec![
        (space.dim(), Gauge::Norm(space.norm_spec().clone()));
        slots
    ]);
    let mut starts: Vec<Vec<f64>> = target
        .seed_points()
        .into_iter()
        .map(|x| chart.params_of(&vec![x; slots]))
        .collect();
    for h in hints {
        if h.len() == slots {
            if let Some(pts) = h
                .iter()
                .map(|x| normalize(space.norm_spec(), x))
                .collect::<Option<Vec<_>>>()
            {
                starts.push(chart.params_of(&pts));
            }
        }
    }
    let landscape = Ball {
        target,
        chart,
        starts,
    };
    let ascent = maximize(&landscape, budget);
    let witness = landscape
        .chart
        .points(&ascent.params)
        .unwrap_or_else(|| vec![space.basis(0); slots]);
    NormEstimate {
        value: target.value(&witness),
        witness,
        budget: *budget,
    }
}

/// Lower bound for `‖T‖ = sup{‖Tx‖_A : ‖x‖_E ≤ 1}` with a witness.
///
/// Closed-form witnesses are used when the answer is known exactly (scalar
/// targets, ℓ¹ sources, sup-norm targets); otherwise the sphere is searched,
/// starting from the norming points of each row. The reported value is always
/// `‖Tw‖` for the returned unit vector `w`.
pub fn operator_norm(op: &LinearOperator, budget: &SearchBudget) -> NormEstimate {
    let source = op.source.norm_spec();
    let alg = &op.target;
    let m = &op.matrix;
    let attained = |w: Vec<C64>| -> NormEstimate {
        NormEstimate {
            value: alg.norm(&m.apply(&w)),
            witness: vec![w],
            budget: *budget,
        }
    };
    if alg.dim() == 1 {
        if let Some(w) = source.dual_maximizer(m.row(0)) {
            return attained(w);
        }
    }
    if matches!(source, NormSpec::P(p) if *p == 1.0) {
        let (j, _) = (0..m.cols())
            .map(|j| alg.norm(&m.column(j)))
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |b, (j, v)| if v > b.1 { (j, v) } else { b },
            );
        return attained(op.source.basis(j));
    }
    if matches!(alg.norm_spec(), NormSpec::Sup) {
        let (k, _) = (0..m.rows())
            .map(|k| source.dual_norm(m.row(k)))
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |b, (k, v)| if v > b.1 { (k, v) } else { b },
            );
        if let Some(w) = source.dual_maximizer(m.row(k)) {
            return attained(w);
        }
    }
    // generic case: search, seeded with every row's norming point
    let p = PowerSumRep::new(
        op.source.clone(),
        op.target.clone(),
        1,
        vec![crate::poly::Term::unweighted(m.clone())],
    )
    .expect("operator shapes already validated");
    sup_norm_unit_ball(BallTarget::Polynomial(&p), budget)
}

/// Certified upper bound for `‖T‖`.
///
/// Exact for scalar targets, ℓ¹ sources and sup-norm targets. Otherwise uses
/// `|(Tx)_k| ≤ ‖row_k‖_* ‖x‖`: for absolute target norms the bound is the
/// target norm of the vector of row dual norms, and in general
/// `Σ_k ‖row_k‖_* ‖e_k‖_A`.
pub fn operator_norm_upper(op: &LinearOperator) -> f64 {
    let source = op.source.norm_spec();
    let alg = &op.target;
    let m = &op.matrix;
    let row_duals: Vec<f64> = (0..m.rows()).map(|k| source.dual_norm(m.row(k))).collect();
    if alg.dim() == 1 {
        return row_duals[0] * alg.norm(&alg.basis(0));
    }
    if matches!(source, NormSpec::P(p) if *p == 1.0) {
        return (0..m.cols())
            .map(|j| alg.norm(&m.column(j)))
            .fold(0.0, f64::max);
    }
    let spec = alg.norm_spec();
    if spec.is_absolute() {
        let v: Vec<C64> = row_duals.iter().map(|r| C64::new(*r, 0.0)).collect();
        return spec.norm(&v);
    }
    row_duals
        .iter()
        .enumerate()
        .map(|(k, r)| r * alg.norm(&alg.basis(k)))
        .sum()
}

/// `Σ |λᵢ| ‖Tᵢ‖ⁿ` for the given representation (an upper bound for the
/// nuclear-type norm, and hence for the unit-ball norm).
pub fn nuclear_norm_upper(p: &PowerSumRep) -> f64 {
    if let Some(c) = p.constant_value() {
        return p.algebra().norm(c);
    }
    (0..p.terms().len())
        .map(|i| {
            p.terms()[i].weight.norm() * operator_norm_upper(&p.operator(i)).powi(p.degree() as i32)
        })
        .sum()
}

/// Outcome of [`check_growth_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Compares `‖P‖_K` with `Mⁿ Σ|λᵢ|‖Tᵢ‖ⁿ`, where `M` is the radius of `K`.
pub fn check_growth_bound(p: &PowerSumRep, k: &CompactSet) -> Result<GrowthReport> {
    let lhs = uniform_norm_on_k(p, k)?;
    let rhs = k.radius().powi(p.degree() as i32) * nuclear_norm_upper(p);
    Ok(GrowthReport {
        lhs,
        rhs,
        satisfied: lhs <= rhs + GROWTH_SLACK,
    })
}

/// Estimate of `sup_{x∈K} sup_{‖φ‖_* ≤ 1} |Σ fᵢ(x) φ(aᵢ)|`.
///
/// For each point the inner supremum is a dual-ball search (sub-seeded by the
/// point's index); the witness is `[x, φ]`.
pub fn injective_tensor_norm<F: Evaluable + ?Sized>(
    t: &F,
    k: &CompactSet,
    budget: &SearchBudget,
) -> Result<NormEstimate> {
    check_dim(k.space.dim(), t.source_dim())?;
    let alg = t.target();
    let per_point: Vec<NormEstimate> = k
        .points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let v = t.evaluate(x)?;
            alg.dual_norm_sup(&v, &budget.child(i as u64))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, &NormEstimate)> = None;
    for (i, e) in per_point.iter().enumerate() {
        if best.is_none_or(|(_, b)| e.value > b.value) {
            best = Some((i, e));
        }
    }
    let (i, e) = best.expect("compact sets are nonempty");
    Ok(NormEstimate {
        value: e.value,
        witness: vec![k.points[i].clone(), e.witness[0].clone()],
        budget: *budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{CMatrix, Term};
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn uniform_norm_of_square() {
        let space = FiniteSpace::new(1, NormSpec::P(2.0)).unwrap();
        let p =
            PowerSumRep::nuclear(space.clone(), 2, vec![(c(1.0, 0.0), vec![c(1.0, 0.0)])]).unwrap();
        let k = CompactSet::new(
            space,
            vec![vec![c(-1.0, 0.0)], vec![c(0.5, 0.0)], vec![c(1.0, 0.0)]],
        )
        .unwrap();
        assert_eq!(uniform_norm_on_k(&p, &k).unwrap(), 1.0);
        assert_eq!(k.radius(), 1.0);
    }

    #[test]
    fn diagonal_operator_sup_to_sup() {
        let space = FiniteSpace::new(2, NormSpec::Sup).unwrap();
        let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
        let m = CMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let op = LinearOperator::new(m, space, alg).unwrap();
        let est = operator_norm(&op, &SearchBudget::new(16, 10, 0));
        assert!((est.value - 3.0).abs() < 1e-12);
        assert!((operator_norm_upper(&op) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn nuclear_upper_of_cube() {
        let space = FiniteSpace::new(2, NormSpec::Sup).unwrap();
        let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
        let m = CMatrix::identity(2).scaled(c(2.0, 0.0));
        let p = PowerSumRep::new(space, alg, 3, vec![Term::unweighted(m)]).unwrap();
        assert!((nuclear_norm_upper(&p) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn coordinate_square_on_sup_ball() {
        let space = FiniteSpace::new(2, NormSpec::Sup).unwrap();
        let p = PowerSumRep::nuclear(
            space,
            2,
            vec![(c(1.0, 0.0), vec![c(1.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        let est = sup_norm_unit_ball(BallTarget::Polynomial(&p), &SearchBudget::new(64, 50, 1));
        assert!((est.value - 1.0).abs() < 1e-6);
    }
}
