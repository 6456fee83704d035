//! Falsification search for the nuclear polynomially convex hull
//!
//! `K̂_N = {a : |P(a)| ≤ ‖P‖_K for every scalar nuclear polynomial P}`
//!
//! and the evaluation characters attached to hull points.
//!
//! A search that finds no violating polynomial is *not* a membership proof:
//! certificates always carry the caps and budget that scope them.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{validate_character, Character, FiniteBanachAlgebra};
use crate::error::{Error, Result};
use crate::norms::{uniform_norm_on_k, CompactSet};
use crate::poly::{compose_character, CMatrix, PolynomialSum, PowerSumRep, Term};
use crate::search::{maximize, Landscape, SearchBudget};
use crate::space::pair;

/// A violation requires `|P(a)| > (1 + VIOLATION_SLACK) ‖P‖_K`.
pub const VIOLATION_SLACK: f64 = 1e-9;

/// Tolerance for multiplicativity and boundedness checks of characters.
pub const CHARACTER_CHECK_TOLERANCE: f64 = 1e-9;

/// Scope of one hull-membership search.
#[derive(Clone, Debug)]
pub struct HullQuery {
    pub candidate: Vec<C64>,
    pub k: CompactSet,
    pub degree_cap: usize,
    pub terms_cap: usize,
    pub budget: SearchBudget,
}

impl HullQuery {
    pub fn new(
        candidate: Vec<C64>,
        k: CompactSet,
        degree_cap: usize,
        terms_cap: usize,
        budget: SearchBudget,
    ) -> Result<Self> {
        k.space().check(&candidate)?;
        if degree_cap == 0 || terms_cap == 0 {
            return Err(Error::InvalidArgument(
                "degree and terms caps must be ≥ 1".into(),
            ));
        }
        Ok(Self {
            candidate,
            k,
            degree_cap,
            terms_cap,
            budget,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Violated,
    NoViolationFound,
}

/// Outcome of [`hull_membership`].
#[derive(Clone, Debug, PartialEq)]
pub struct HullCertificate {
    pub candidate: Vec<C64>,
    pub verdict: Verdict,
    /// Best polynomial found, scaled so that `‖P‖_K = 1`.
    pub witness: Option<PolynomialSum>,
    /// `|P(a)| / ‖P‖_K` for the witness.
    pub ratio: f64,
    /// `|P(a)| − ‖P‖_K` for the (normalised) witness.
    pub margin: f64,
    /// Degree cap of the stage that produced the witness.
    pub stage: usize,
    pub degree_cap: usize,
    pub terms_cap: usize,
    pub budget: SearchBudget,
}

impl HullCertificate {
    /// Re-evaluates the witness; returns `(|P(a)|, ‖P‖_K)`.
    pub fn reevaluate(&self, k: &CompactSet) -> Result<Option<(f64, f64)>> {
        match &self.witness {
            None => Ok(None),
            Some(p) => Ok(Some((
                p.eval(&self.candidate)?[0].norm(),
                uniform_norm_on_k(p, k)?,
            ))),
        }
    }
}

/// Parameter layout: `[c.re, c.im]`, then for each degree `j = 1..=d` and
/// each of `terms` slots the real and imaginary parts of a functional.
struct HullLandscape<'a> {
    query: &'a HullQuery,
    degree: usize,
}

impl HullLandscape<'_> {
    fn dim(&self) -> usize {
        self.query.k.space().dim()
    }

    fn functional(&self, params: &[f64], j: usize, t: usize) -> Vec<C64> {
        let d = self.dim();
        let offset = 2 + ((j - 1) * self.query.terms_cap + t) * 2 * d;
        (0..d)
            .map(|i| C64::new(params[offset + 2 * i], params[offset + 2 * i + 1]))
            .collect()
    }

    fn eval(&self, params: &[f64], x: &[C64]) -> C64 {
        let mut v = C64::new(params[0], params[1]);
        for j in 1..=self.degree {
            for t in 0..self.query.terms_cap {
                v += pair(&self.functional(params, j, t), x).powu(j as u32);
            }
        }
        v
    }

    fn polynomial(&self, params: &[f64], scale: f64) -> PolynomialSum {
        let space = self.query.k.space().clone();
        let scalar = Arc::new(FiniteBanachAlgebra::scalar());
        let w = C64::new(scale, 0.0);
        let mut parts = vec![PowerSumRep::constant(
            space.clone(),
            scalar.clone(),
            vec![C64::new(params[0], params[1]) * w],
        )
        .expect("scalar constant")];
        for j in 1..=self.degree {
            let terms = (0..self.query.terms_cap)
                .map(|t| {
                    let row = CMatrix::from_rows(vec![self.functional(params, j, t)])
                        .expect("nonempty row");
                    Term::new(w, row)
                })
                .collect();
            parts.push(
                PowerSumRep::new(space.clone(), scalar.clone(), j, terms).expect("shapes match"),
            );
        }
        PolynomialSum::new(space, scalar, parts).expect("parts share space and algebra")
    }
}

impl Landscape for HullLandscape<'_> {
    fn dimension(&self) -> usize {
        2 + self.degree * self.query.terms_cap * 2 * self.dim()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dimension())
            .map(|_| StandardNormal.sample(rng))
            .collect()
    }

    fn value(&self, params: &[f64]) -> f64 {
        let sup = self
            .query
            .k
            .points()
            .iter()
            .map(|x| self.eval(params, x).norm())
            .fold(0.0, f64::max);
        if sup <= 0.0 || sup.is_nan() {
            return f64::NEG_INFINITY;
        }
        self.eval(params, &self.query.candidate).norm() / sup
    }
}

/// Searches scalar nuclear polynomials `c + Σ_{j≤d} Σ_t ψ_{j,t}(x)^j` for one
/// with `|P(a)| > ‖P‖_K`.
///
/// Stages run with degree caps `1, 2, …, degree_cap`, each with its own
/// sub-seed, so a larger cap only adds stages; the first violating stage
/// wins. Within a stage, [`maximize`] optimises `|P(a)| / ‖P‖_K`.
pub fn hull_membership(query: &HullQuery) -> Result<HullCertificate> {
    let mut best: Option<HullCertificate> = None;
    for degree in 1..=query.degree_cap {
        let landscape = HullLandscape { query, degree };
        let ascent = maximize(&landscape, &query.budget.child(degree as u64));
        let sup = query
            .k
            .points()
            .iter()
            .map(|x| landscape.eval(&ascent.params, x).norm())
            .fold(0.0, f64::max);
        if sup <= 0.0 || sup.is_nan() {
            continue;
        }
        let witness = landscape.polynomial(&ascent.params, 1.0 / sup);
        let value = witness.eval(&query.candidate)?[0].norm();
        let norm_k = uniform_norm_on_k(&witness, &query.k)?;
        let ratio = value / norm_k;
        let violated = ratio > 1.0 + VIOLATION_SLACK && value - norm_k > VIOLATION_SLACK;
        let cert = HullCertificate {
            candidate: query.candidate.clone(),
            verdict: if violated {
                Verdict::Violated
            } else {
                Verdict::NoViolationFound
            },
            witness: Some(witness),
            ratio,
            margin: value - norm_k,
            stage: degree,
            degree_cap: query.degree_cap,
            terms_cap: query.terms_cap,
            budget: query.budget,
        };
        if violated {
            return Ok(cert);
        }
        if best.as_ref().is_none_or(|b| cert.ratio > b.ratio) {
            best = Some(cert);
        }
    }
    Ok(best.unwrap_or(HullCertificate {
        candidate: query.candidate.clone(),
        verdict: Verdict::NoViolationFound,
        witness: None,
        ratio: 0.0,
        margin: f64::NEG_INFINITY,
        stage: 0,
        degree_cap: query.degree_cap,
        terms_cap: query.terms_cap,
        budget: query.budget,
    }))
}

/// A point for which the hull search found no violation, with its scope.
#[derive(Clone, Debug)]
pub struct CertifiedPoint {
    point: Vec<C64>,
    k: CompactSet,
    certificate: HullCertificate,
}

impl CertifiedPoint {
    pub fn new(certificate: HullCertificate, k: CompactSet) -> Result<Self> {
        if certificate.verdict == Verdict::Violated {
            return Err(Error::NotCertified(format!(
                "the hull search found a separating polynomial (margin {:e})",
                certificate.margin
            )));
        }
        k.space().check(&certificate.candidate)?;
        Ok(Self {
            point: certificate.candidate.clone(),
            k,
            certificate,
        })
    }

    pub fn point(&self) -> &[C64] {
        &self.point
    }

    pub fn compact(&self) -> &CompactSet {
        &self.k
    }

    pub fn certificate(&self) -> &HullCertificate {
        &self.certificate
    }
}

/// An evaluation functional on a list of generators, with its checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCharacter {
    /// `χ(Pᵢ)` for every generator.
    pub values: Vec<C64>,
    /// `max |χ(PᵢPⱼ) − χ(Pᵢ)χ(Pⱼ)|` over generator pairs `i ≤ j`.
    pub multiplicative_residual: f64,
    /// `max (|χ(P)| − ‖P‖_K)` over generators and pair products.
    pub bound_excess: f64,
    pub pairs_checked: usize,
}

fn check_character<V>(
    generators: &[PolynomialSum],
    value: V,
    bound: impl Fn(&PolynomialSum) -> Result<f64>,
) -> Result<GeneratorCharacter>
where
    V: Fn(&PolynomialSum) -> Result<C64>,
{
    let values: Vec<C64> = generators.iter().map(&value).collect::<Result<_>>()?;
    let mut excess = f64::NEG_INFINITY;
    for (g, v) in generators.iter().zip(&values) {
        excess = excess.max(v.norm() - bound(g)?);
    }
    let mut residual: f64 = 0.0;
    let mut pairs = 0;
    for i in 0..generators.len() {
        for j in i..generators.len() {
            let prod = generators[i].product(&generators[j])?;
            let v = value(&prod)?;
            let scale = (values[i].norm() * values[j].norm()).max(1.0);
            residual = residual.max((v - values[i] * values[j]).norm() / scale);
            excess = excess.max(v.norm() - bound(&prod)?);
            pairs += 1;
        }
    }
    let out = GeneratorCharacter {
        values,
        multiplicative_residual: residual,
        bound_excess: excess,
        pairs_checked: pairs,
    };
    if out.bound_excess > CHARACTER_CHECK_TOLERANCE {
        return Err(Error::NotCertified(format!(
            "|χ(P)| exceeds ‖P‖_K by {:e}; the point is not in the hull at these caps",
            out.bound_excess
        )));
    }
    Ok(out)
}

/// `φ_a(P) = P(a)` on scalar generators, checked for multiplicativity on all
/// generator pairs (products via [`PolynomialSum::product`]) and for
/// `|φ_a(P)| ≤ ‖P‖_K`.
pub fn character_from_point(
    point: &CertifiedPoint,
    generators: &[PolynomialSum],
) -> Result<GeneratorCharacter> {
    for g in generators {
        if g.algebra().dim() != 1 {
            return Err(Error::Incompatible(
                "point characters act on scalar polynomials".into(),
            ));
        }
    }
    let k = point.compact();
    check_character(
        generators,
        |p| Ok(p.eval(point.point())?[0]),
        |p| uniform_norm_on_k(p, k),
    )
}

/// `χ_{a,φ}(P) = φ(P(a))` on algebra-valued generators, computed through
/// `φ∘P` ([`compose_character`]). Checks multiplicativity on generator
/// pairs and `|χ(P)| ≤ ‖P‖_K`.
pub fn product_character(
    point: &CertifiedPoint,
    phi: &Character,
    generators: &[PolynomialSum],
) -> Result<GeneratorCharacter> {
    let Some(first) = generators.first() else {
        return Ok(GeneratorCharacter {
            values: Vec::new(),
            multiplicative_residual: 0.0,
            bound_excess: f64::NEG_INFINITY,
            pairs_checked: 0,
        });
    };
    let check = validate_character(first.algebra(), phi)?;
    if !check.valid {
        return Err(Error::InvalidCharacter {
            multiplicative: check.multiplicative_residual,
            unital: check.unital_residual,
        });
    }
    let k = point.compact();
    let chi = |p: &PolynomialSum| -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for part in p.parts() {
            acc += compose_character(phi, part)?.eval(point.point())?[0];
        }
        Ok(acc)
    };
    check_character(generators, chi, |p| uniform_norm_on_k(p, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{FiniteSpace, NormSpec};
    use std::f64::consts::PI;

    fn circle(n: usize) -> CompactSet {
        let space = FiniteSpace::new(1, NormSpec::P(2.0)).unwrap();
        let pts = (0..n)
            .map(|j| vec![C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)])
            .collect();
        CompactSet::new(space, pts).unwrap()
    }

    #[test]
    fn point_outside_disc_is_separated() {
        let k = circle(64);
        let q = HullQuery::new(
            vec![C64::new(2.0, 0.0)],
            k.clone(),
            1,
            1,
            SearchBudget::new(64, 100, 3),
        )
        .unwrap();
        let cert = hull_membership(&q).unwrap();
        assert_eq!(cert.verdict, Verdict::Violated);
        assert!(cert.margin > 0.9);
        let (v, n) = cert.reevaluate(&k).unwrap().unwrap();
        assert!((v - n - cert.margin).abs() < 1e-10);
    }

    #[test]
    fn point_of_k_is_never_separated() {
        let k = circle(16);
        let a = k.points()[3].clone();
        let q = HullQuery::new(a, k, 2, 2, SearchBudget::new(64, 20, 9)).unwrap();
        assert_eq!(
            hull_membership(&q).unwrap().verdict,
            Verdict::NoViolationFound
        );
    }
}
