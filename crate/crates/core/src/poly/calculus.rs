//! Exact constructions on power sums: polarization, the Leibniz formula,
//! products, multiplication by algebra constants and composition with
//! characters.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::form::{eval_form, SymmetricForm};
use super::{CMatrix, PowerSumRep, Term};
use crate::algebra::{validate_character, Character, FiniteBanachAlgebra};
use crate::combinat::{binomial, factorial};
use crate::error::{Error, Result};
use crate::space::add;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative tolerance for the roots-of-unity identity `Σ b_kᵐ = b`.
const UNITY_TOLERANCE: f64 = 1e-10;

/// The symmetric `n`-linear form `T` with `T(x, …, x) = P(x)`, from
///
/// `T(x₁,…,x_n) = 1/(2ⁿ n!) Σ_{ε∈{±1}ⁿ} ε₁⋯ε_n P(Σ ε_j x_j)`
///
/// applied to basis vectors. Sign patterns `ε` and `−ε` contribute equally,
/// so only patterns with `ε₁ = +1` are evaluated and the result is doubled.
pub fn polarize(p: &PowerSumRep) -> Result<SymmetricForm> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::NoPolarization);
    }
    let space = p.space().clone();
    let mut form = SymmetricForm::zero(space.clone(), p.algebra().clone(), n);
    let norm = 2.0 / ((1u64 << n) as f64 * factorial(n) as f64);
    let keys = form.index().keys().to_vec();
    for (rank, key) in keys.iter().enumerate() {
        let mut acc = p.algebra().zero();
        for mask in 0..(1usize << (n - 1)) {
            let mut x = vec![C64::new(0.0, 0.0); space.dim()];
            let mut sign = 1.0;
            for (j, &i) in key.iter().enumerate() {
                // slot 0 is always +1
                let neg = j > 0 && (mask >> (j - 1)) & 1 == 1;
                if neg {
                    x[i] -= ONE;
                    sign = -sign;
                } else {
                    x[i] += ONE;
                }
            }
            let v = p.eval_unchecked(&x);
            for (a, b) in acc.iter_mut().zip(v) {
                *a += sign * b;
            }
        }
        form.set_coeff(rank, acc.into_iter().map(|z| z * norm).collect());
    }
    Ok(form)
}

/// `[(C(n,k), T(x^k, y^{n−k})) : k = 0..n]`, whose weighted sum is
/// `T((x+y)ⁿ)`.
pub fn leibniz_expand(form: &SymmetricForm, x: &[C64], y: &[C64]) -> Result<Vec<(u64, Vec<C64>)>> {
    form.space().check(x)?;
    form.space().check(y)?;
    let n = form.degree();
    (0..=n)
        .map(|k| Ok((binomial(n, k), form.eval_mixed(x, k, y)?)))
        .collect()
}

/// Checks `Σ C(n,k) T(x^k, y^{n−k}) = T(x+y, …, x+y)`; returns the residual.
pub fn leibniz_residual(form: &SymmetricForm, x: &[C64], y: &[C64]) -> Result<f64> {
    let parts = leibniz_expand(form, x, y)?;
    let mut lhs = form.algebra().zero();
    for (w, v) in &parts {
        for (a, b) in lhs.iter_mut().zip(v) {
            *a += *w as f64 * b;
        }
    }
    let s = add(x, y);
    let args: Vec<&[C64]> = vec![&s; form.degree()];
    let rhs = eval_form(form, &args)?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// `P·Q` as a power sum of degree `m + n`.
///
/// For each pair of terms `λ S(x)ᵐ`, `μ T(x)ⁿ`, the identity
///
/// `aᵐbⁿ = 1/(2^{m+n}(m+n)!) Σ_ε ε₁⋯ε_{m+n} ((Σ_{ℓ≤m} ε_ℓ) a + (Σ_{ℓ>m} ε_ℓ) b)^{m+n}`
///
/// (valid in any commutative algebra) yields `2^{m+n}` terms, emitted in
/// increasing order of the sign mask (bit `ℓ` set ⇔ `ε_ℓ = −1`). No terms are
/// merged. A degree-0 operand is handled by [`multiply_by_constant`].
pub fn product_power_sums(p: &PowerSumRep, q: &PowerSumRep) -> Result<PowerSumRep> {
    p.compatible(q)?;
    match (p.constant_value(), q.constant_value()) {
        (Some(a), Some(b)) => {
            return PowerSumRep::constant(
                p.space().clone(),
                p.algebra().clone(),
                p.algebra().product(a, b),
            )
        }
        (Some(a), None) => return multiply_by_constant(q, a),
        (None, Some(b)) => return multiply_by_constant(p, b),
        (None, None) => {}
    }
    let (m, n) = (p.degree(), q.degree());
    let total = m + n;
    if total > 20 {
        return Err(Error::InvalidArgument(format!(
            "product degree {total} exceeds 20"
        )));
    }
    let denom = (1u64 << total) as f64 * factorial(total) as f64;
    let mut terms = Vec::with_capacity((p.terms().len() * q.terms().len()) << total);
    for s in p.terms() {
        for t in q.terms() {
            for mask in 0..(1usize << total) {
                let ones = mask.count_ones() as i64;
                let low = (mask & ((1 << m) - 1)).count_ones() as i64;
                let high = ones - low;
                let s1 = (m as i64 - 2 * low) as f64;
                let s2 = (n as i64 - 2 * high) as f64;
                let sign = if ones % 2 == 0 { 1.0 } else { -1.0 };
                let matrix = s
                    .matrix
                    .combine(C64::new(s1, 0.0), &t.matrix, C64::new(s2, 0.0));
                terms.push(Term::new(s.weight * t.weight * (sign / denom), matrix));
            }
        }
    }
    Ok(p.with_terms(total, terms))
}

/// `b₁, …, b_m` with `Σ b_kᵐ = b`, from
/// `b_k = e^{2πik/m²} / m^{2/m} · (b + e^{2πik/m} 𝟏)`. Requires `m ≥ 2`.
pub fn unity_decomposition(
    algebra: &FiniteBanachAlgebra,
    b: &[C64],
    m: usize,
) -> Result<Vec<Vec<C64>>> {
    algebra.check(b)?;
    if m < 2 {
        return Err(Error::InvalidArgument(
            "the roots-of-unity decomposition needs m ≥ 2".into(),
        ));
    }
    let mf = m as f64;
    let scale = mf.powf(-2.0 / mf);
    let parts: Vec<Vec<C64>> = (1..=m)
        .map(|k| {
            let kf = k as f64;
            let outer = C64::from_polar(scale, 2.0 * PI * kf / (mf * mf));
            let zeta = C64::from_polar(1.0, 2.0 * PI * kf / mf);
            b.iter()
                .zip(algebra.identity())
                .map(|(bi, ei)| outer * (bi + zeta * ei))
                .collect()
        })
        .collect();
    let mut sum = algebra.zero();
    let mut magnitude = 0.0;
    for bk in &parts {
        let p = algebra.pow(bk, m);
        magnitude += algebra.norm(bk).powi(m as i32);
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
    }
    let residual = algebra.norm(&crate::space::sub(&sum, b));
    if residual > UNITY_TOLERANCE * magnitude.max(1.0) {
        return Err(Error::InvalidDecomposition(format!(
            "roots-of-unity decomposition residual {residual:e}"
        )));
    }
    Ok(parts)
}

/// `x ↦ P(x)·b` as a power sum of the same degree.
///
/// For `m ≥ 2`, `b = Σ_k b_kᵐ` ([`unity_decomposition`]) gives
/// `λ T(x)ᵐ b = Σ_k λ (b_k T(x))ᵐ`. For `m = 1` each operator is
/// post-multiplied by `b` directly (the decomposition formula would give
/// `b + 𝟏` there).
pub fn multiply_by_constant(p: &PowerSumRep, b: &[C64]) -> Result<PowerSumRep> {
    let alg = p.algebra();
    alg.check(b)?;
    if let Some(c) = p.constant_value() {
        return PowerSumRep::constant(p.space().clone(), alg.clone(), alg.product(c, b));
    }
    let m = p.degree();
    let factors: Vec<Vec<C64>> = if m == 1 {
        vec![b.to_vec()]
    } else {
        unity_decomposition(alg, b, m)?
    };
    let mats: Vec<CMatrix> = factors
        .iter()
        .map(|f| CMatrix::from_rows(alg.multiplication_matrix(f)))
        .collect::<Result<_>>()?;
    let mut terms = Vec::with_capacity(p.terms().len() * mats.len());
    for t in p.terms() {
        for mb in &mats {
            terms.push(Term::new(t.weight, mb.matmul(&t.matrix)));
        }
    }
    Ok(p.with_terms(m, terms))
}

/// `φ∘P` as a scalar power sum: `φ(λ T(x)ⁿ) = λ (φ∘T)(x)ⁿ` because `φ` is
/// multiplicative.
pub fn compose_character(phi: &Character, p: &PowerSumRep) -> Result<PowerSumRep> {
    let check = validate_character(p.algebra(), phi)?;
    if !check.valid {
        return Err(Error::InvalidCharacter {
            multiplicative: check.multiplicative_residual,
            unital: check.unital_residual,
        });
    }
    let scalar = Arc::new(FiniteBanachAlgebra::scalar());
    if let Some(c) = p.constant_value() {
        return PowerSumRep::constant(p.space().clone(), scalar, vec![phi.apply(c)]);
    }
    let phi_row = CMatrix::from_rows(vec![phi.functional.clone()])?;
    let terms = p
        .terms()
        .iter()
        .map(|t| Term::new(t.weight, phi_row.matmul(&t.matrix)))
        .collect();
    PowerSumRep::new(p.space().clone(), scalar, p.degree(), terms)
}

/// Rewrites `λ T(x)ⁿ` as `(λ^{1/n} T)(x)ⁿ` with the principal root, so every
/// weight becomes 1. Terms with `λ = 0` are dropped.
pub fn absorb_weights(p: &PowerSumRep) -> PowerSumRep {
    let n = p.degree();
    if n == 0 {
        return p.clone();
    }
    let terms = p
        .terms()
        .iter()
        .filter(|t| t.weight != C64::new(0.0, 0.0))
        .map(|t| {
            let root = if n == 1 {
                t.weight
            } else {
                t.weight.powf(1.0 / n as f64)
            };
            Term::unweighted(t.matrix.scaled(root))
        })
        .collect();
    p.with_terms(n, terms)
}

/// Merges terms whose operators are proportional (`U' = cU` contributes
/// `λ' cⁿ` to the weight of `U`) and drops zero terms. Evaluation is
/// unchanged up to rounding.
pub fn coalesce_terms(p: &PowerSumRep, tolerance: f64) -> PowerSumRep {
    let n = p.degree();
    if n == 0 {
        return p.clone();
    }
    let mut out: Vec<Term> = Vec::new();
    'next: for t in p.terms() {
        if t.weight == C64::new(0.0, 0.0)
            || t.matrix.to_rows().iter().flatten().all(|z| z.norm() == 0.0)
        {
            continue;
        }
        for kept in out.iter_mut() {
            if let Some(c) = proportion(&t.matrix, &kept.matrix, tolerance) {
                kept.weight += t.weight * c.powu(n as u32);
                continue 'next;
            }
        }
        out.push(t.clone());
    }
    out.retain(|t| t.weight.norm() > 0.0);
    p.with_terms(n, out)
}

/// `c` with `a = c·b`, if it exists to relative tolerance.
fn proportion(a: &CMatrix, b: &CMatrix, tolerance: f64) -> Option<C64> {
    let ra = a.to_rows().concat();
    let rb = b.to_rows().concat();
    let (pivot, bp) = rb
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if bp.norm() == 0.0 {
        return None;
    }
    let c = ra[pivot] / bp;
    let scale = ra.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let ok = ra
        .iter()
        .zip(&rb)
        .all(|(x, y)| (x - c * y).norm() <= tolerance * scale);
    ok.then_some(c)
}
