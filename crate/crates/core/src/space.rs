//! Norms on `ℂⁿ` and the finite-dimensional spaces that carry them.
//!
//! Functionals act bilinearly: `φ(x) = Σ φₖ xₖ` (no conjugation), so the dual of
//! the `p`-norm is the `q`-norm of the coefficient vector with `1/p + 1/q = 1`.

use num_complex::Complex64 as C64;

use crate::error::{check_dim, Error, Result};

/// `Σ φₖ xₖ`.
pub fn pair(phi: &[C64], x: &[C64]) -> C64 {
    phi.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Product of a vector by a scalar.
pub fn scale(v: &[C64], s: C64) -> Vec<C64> {
    v.iter().map(|z| z * s).collect()
}

/// `a - b` coordinatewise.
pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + b` coordinatewise.
pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// A norm on `ℂⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    /// `(Σ|xₖ|ᵖ)^{1/p}` with finite `p ≥ 1`.
    P(f64),
    /// `max |xₖ|`.
    Sup,
    /// `|ψ(a)| + ‖a − ψ(a)e‖_base`.
    Lourenco(LourencoNorm),
}

/// The norm `‖a‖₁ = |ψ(a)| + ‖x‖` on `ker ψ ⊕ ℂe`.
///
/// `psi` is stored rescaled so that `ψ(e) = 1`; the splitting `a = x + ψ(a)e`
/// then has `x ∈ ker ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LourencoNorm {
    psi: Vec<C64>,
    unit: Vec<C64>,
    base: Box<NormSpec>,
}

impl LourencoNorm {
    pub fn new(psi: Vec<C64>, unit: Vec<C64>, base: NormSpec) -> Result<Self> {
        check_dim(psi.len(), unit.len())?;
        if matches!(base, NormSpec::Lourenco(_)) {
            return Err(Error::InvalidNorm(
                "the base of a Lourenço norm must be a p-norm or the sup-norm".into(),
            ));
        }
        base.validate()?;
        let at_unit = pair(&psi, &unit);
        if at_unit.norm() <= 1e-12 {
            return Err(Error::InvalidDecomposition(
                "ψ(e) = 0: e does not complement ker ψ".into(),
            ));
        }
        let unit_norm = base.norm(&unit);
        if (unit_norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidNorm(format!(
                "the unit vector e must have norm 1, found {unit_norm}"
            )));
        }
        let psi = psi.iter().map(|z| z / at_unit).collect();
        Ok(Self {
            psi,
            unit,
            base: Box::new(base),
        })
    }

    pub fn psi(&self) -> &[C64] {
        &self.psi
    }

    pub fn unit(&self) -> &[C64] {
        &self.unit
    }

    pub fn base(&self) -> &NormSpec {
        &self.base
    }

    /// Splits `a` into `(ψ(a), x)` with `x ∈ ker ψ`.
    pub fn split(&self, a: &[C64]) -> (C64, Vec<C64>) {
        let s = pair(&self.psi, a);
        let x = a
            .iter()
            .zip(&self.unit)
            .map(|(ak, ek)| ak - s * ek)
            .collect();
        (s, x)
    }

    /// Upper bound on `sup{|φ(x)| : x ∈ ker ψ, ‖x‖_base ≤ 1}` via
    /// `min_t ‖φ − tψ‖_base*`; every `t` gives a valid bound.
    fn restricted_dual(&self, phi: &[C64]) -> f64 {
        let eval = |t: C64| -> f64 {
            let shifted: Vec<C64> = phi.iter().zip(&self.psi).map(|(p, q)| p - t * q).collect();
            self.base.dual_norm(&shifted)
        };
        let mut t = pair(phi, &self.unit);
        let mut best = eval(t);
        let scale = phi.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut step = 0.5 * scale;
        let dirs = [
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
        ];
        while step > 1e-15 * scale {
            let mut moved = false;
            for d in dirs {
                let cand = t + d * step;
                let v = eval(cand);
                if v < best {
                    best = v;
                    t = cand;
                    moved = true;
                    break;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best
    }
}

impl NormSpec {
    /// `p`-norm; `p = ∞` maps to [`NormSpec::Sup`].
    pub fn p(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(NormSpec::Sup);
        }
        let spec = NormSpec::P(p);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::P(p) if !(p.is_finite() && *p >= 1.0) => {
                Err(Error::InvalidNorm(format!("p must satisfy p ≥ 1, got {p}")))
            }
            NormSpec::Lourenco(l) => l.base.validate(),
            _ => Ok(()),
        }
    }

    /// Vector length required by the norm's data, if any.
    pub fn required_dim(&self) -> Option<usize> {
        match self {
            NormSpec::Lourenco(l) => Some(l.psi.len()),
            _ => None,
        }
    }

    /// True for norms that only depend on `(|x₁|, …, |xₙ|)` monotonically.
    pub fn is_absolute(&self) -> bool {
        matches!(self, NormSpec::P(_) | NormSpec::Sup)
    }

    pub fn norm(&self, x: &[C64]) -> f64 {
        match self {
            NormSpec::Sup => x.iter().map(|z| z.norm()).fold(0.0, f64::max),
            NormSpec::P(p) => p_norm(x, *p),
            NormSpec::Lourenco(l) => {
                let (s, rest) = l.split(x);
                s.norm() + l.base.norm(&rest)
            }
        }
    }

    /// Dual norm `sup{|φ(x)| : ‖x‖ ≤ 1}` of the functional `φ`.
    ///
    /// Exact for `p`-norms and the sup-norm. For the Lourenço norm the value is
    /// a certified upper bound that is tight up to the inner 1-D minimisation.
    pub fn dual_norm(&self, phi: &[C64]) -> f64 {
        match self {
            NormSpec::Sup => phi.iter().map(|z| z.norm()).sum(),
            NormSpec::P(p) => {
                if *p == 1.0 {
                    phi.iter().map(|z| z.norm()).fold(0.0, f64::max)
                } else {
                    p_norm(phi, *p / (*p - 1.0))
                }
            }
            NormSpec::Lourenco(l) => {
                let at_unit = pair(phi, &l.unit).norm();
                at_unit.max(l.restricted_dual(phi))
            }
        }
    }

    /// Unit vector `x` with `φ(x) = ‖φ‖_*` (Hölder equality), when known in
    /// closed form.
    pub fn dual_maximizer(&self, phi: &[C64]) -> Option<Vec<C64>> {
        let n = phi.len();
        if n == 0 {
            return None;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        match self {
            NormSpec::Sup => {
                for (xk, pk) in x.iter_mut().zip(phi) {
                    *xk = phase(*pk).conj();
                }
            }
            NormSpec::P(p) if *p == 1.0 => {
                let (k, pk) = phi.iter().enumerate().fold((0, phi[0]), |best, (i, z)| {
                    if z.norm() > best.1.norm() {
                        (i, *z)
                    } else {
                        best
                    }
                });
                x[k] = phase(pk).conj();
            }
            NormSpec::P(p) => {
                let q = *p / (*p - 1.0);
                let dual = p_norm(phi, q);
                if dual == 0.0 {
                    x[0] = C64::new(1.0, 0.0);
                    return Some(x);
                }
                for (xk, pk) in x.iter_mut().zip(phi) {
                    let r = pk.norm() / dual;
                    *xk = phase(*pk).conj() * r.powf(q - 1.0);
                }
            }
            NormSpec::Lourenco(_) => return None,
        }
        Some(x)
    }
}

fn p_norm(x: &[C64], p: f64) -> f64 {
    let big = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return x.iter().map(|z| z.norm()).sum();
    }
    if p == 2.0 {
        let s: f64 = x.iter().map(|z| (z.norm() / big).powi(2)).sum();
        return big * s.sqrt();
    }
    let s: f64 = x.iter().map(|z| (z.norm() / big).powf(p)).sum();
    big * s.powf(1.0 / p)
}

/// A finite-dimensional complex normed space `(ℂⁿ, ‖·‖)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpace {
    dim: usize,
    norm: NormSpec,
}

impl FiniteSpace {
    pub fn new(dim: usize, norm: NormSpec) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("space dimension must be ≥ 1".into()));
        }
        norm.validate()?;
        if let Some(d) = norm.required_dim() {
            check_dim(dim, d)?;
        }
        Ok(Self { dim, norm })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_spec(&self) -> &NormSpec {
        &self.norm
    }

    pub fn norm(&self, x: &[C64]) -> f64 {
        self.norm.norm(x)
    }

    pub fn dual_norm(&self, phi: &[C64]) -> f64 {
        self.norm.dual_norm(phi)
    }

    /// The `k`-th standard basis vector.
    pub fn basis(&self, k: usize) -> Vec<C64> {
        let mut e = vec![C64::new(0.0, 0.0); self.dim];
        e[k] = C64::new(1.0, 0.0);
        e
    }

    pub fn check(&self, x: &[C64]) -> Result<()> {
        check_dim(self.dim, x.len())
    }
}
