//! Finite-dimensional commutative unital Banach algebras.
//!
//! An algebra is `ℂᵈ` with a structure tensor `c[i][j][k]`
//! (`eᵢ·eⱼ = Σₖ c[i][j][k] eₖ`), an identity vector and a [`NormSpec`].
//! Each algebra declares its submultiplicativity constant `C`
//! (`‖ab‖ ≤ C‖a‖‖b‖`), which is checked statistically rather than assumed.

mod characters;

pub use characters::{enumerate_characters, validate_character, Character, CharacterCheck};

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::search::{
    maximize, stream_rng, Gauge, Landscape, NormEstimate, SearchBudget, SphereChart,
};
use crate::space::{pair, FiniteSpace, LourencoNorm, NormSpec};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Tolerance for the associativity and unit laws checked at construction.
pub const LAW_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteBanachAlgebra {
    dim: usize,
    /// Flattened `c[i][j][k]` at `(i * dim + j) * dim + k`.
    structure: Vec<C64>,
    identity: Vec<C64>,
    norm: NormSpec,
    constant: f64,
    diagonal: bool,
}

impl FiniteBanachAlgebra {
    /// Builds an algebra from an explicit structure tensor, checking
    /// commutativity (exactly), associativity and the unit law.
    pub fn from_structure(
        dim: usize,
        structure: Vec<C64>,
        identity: Vec<C64>,
        norm: NormSpec,
        constant: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "algebra dimension must be ≥ 1".into(),
            ));
        }
        check_dim(dim * dim * dim, structure.len())?;
        check_dim(dim, identity.len())?;
        norm.validate()?;
        if let Some(d) = norm.required_dim() {
            check_dim(dim, d)?;
        }
        if !(constant.is_finite() && constant > 0.0) {
            return Err(Error::InvalidAlgebra(format!(
                "submultiplicativity constant must be positive, got {constant}"
            )));
        }
        let diagonal = (0..dim).all(|i| {
            (0..dim).all(|j| {
                (0..dim).all(|k| {
                    let v = structure[(i * dim + j) * dim + k];
                    if i == j && j == k {
                        v == ONE
                    } else {
                        v == ZERO
                    }
                })
            })
        });
        let algebra = Self {
            dim,
            structure,
            identity,
            norm,
            constant,
            diagonal,
        };
        algebra.check_laws()?;
        Ok(algebra)
    }

    /// `ℂᵈ` with the coordinatewise product; identity is the all-ones vector.
    pub fn pointwise(dim: usize, norm: NormSpec) -> Result<Self> {
        if matches!(norm, NormSpec::Lourenco(_)) {
            return Err(Error::InvalidNorm(
                "pointwise algebras take a p-norm or the sup-norm".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "algebra dimension must be ≥ 1".into(),
            ));
        }
        let mut structure = vec![ZERO; dim * dim * dim];
        for i in 0..dim {
            structure[(i * dim + i) * dim + i] = ONE;
        }
        Self::from_structure(dim, structure, vec![ONE; dim], norm, 1.0)
    }

    /// The scalar field `ℂ`.
    pub fn scalar() -> Self {
        Self::pointwise(1, NormSpec::Sup).expect("ℂ is a valid algebra")
    }

    /// The product `ab = ψ(b)x + ψ(a)y + ψ(a)ψ(b)e` on `ker ψ ⊕ ℂe`, with
    /// identity `e` and norm `|ψ(a)| + ‖x‖` (base norm taken from `space`).
    pub fn lourenco(space: &FiniteSpace, psi: Vec<C64>, unit: Vec<C64>) -> Result<Self> {
        let dim = space.dim();
        check_dim(dim, psi.len())?;
        check_dim(dim, unit.len())?;
        let base = match space.norm_spec() {
            NormSpec::Lourenco(l) => l.base().clone(),
            other => other.clone(),
        };
        let norm = LourencoNorm::new(psi, unit.clone(), base)?;
        let splits: Vec<(C64, Vec<C64>)> = (0..dim).map(|i| norm.split(&space.basis(i))).collect();
        let mut structure = vec![ZERO; dim * dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let (si, xi) = &splits[i];
                let (sj, xj) = &splits[j];
                for k in 0..dim {
                    let v = sj * xi[k] + si * xj[k] + si * sj * unit[k];
                    structure[(i * dim + j) * dim + k] = v;
                    structure[(j * dim + i) * dim + k] = v;
                }
            }
        }
        Self::from_structure(dim, structure, unit, NormSpec::Lourenco(norm), 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> &[C64] {
        &self.identity
    }

    pub fn norm_spec(&self) -> &NormSpec {
        &self.norm
    }

    /// Declared constant `C` in `‖ab‖ ≤ C‖a‖‖b‖`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `max(1, max_{i,j} Σ_k |c[i][j][k]|)`, the coordinatewise growth of one
    /// multiplication.
    pub fn structure_scale(&self) -> f64 {
        let d = self.dim;
        self.structure
            .chunks(d)
            .map(|row| row.iter().map(|c| c.norm()).sum::<f64>())
            .fold(1.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// `c[i][j][k]`.
    /// The flattened structure tensor, `c[i][j][k]` at `(i * dim + j) * dim + k`.
    pub fn structure_tensor(&self) -> &[C64] {
        &self.structure
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> C64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn basis(&self, i: usize) -> Vec<C64> {
        let mut e = vec![ZERO; self.dim];
        e[i] = ONE;
        e
    }

    pub fn zero(&self) -> Vec<C64> {
        vec![ZERO; self.dim]
    }

    pub fn check(&self, a: &[C64]) -> Result<()> {
        check_dim(self.dim, a.len())
    }

    /// `Σ_{i,j} a[i] b[j] c[i][j][k]`.
    pub fn mul(&self, a: &[C64], b: &[C64]) -> Result<Vec<C64>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.product(a, b))
    }

    pub(crate) fn product(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let d = self.dim;
        if self.diagonal {
            return a.iter().zip(b).map(|(x, y)| x * y).collect();
        }
        let mut out = vec![ZERO; d];
        for (i, ai) in a.iter().enumerate() {
            if *ai == ZERO {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let w = ai * bj;
                if w == ZERO {
                    continue;
                }
                let base = (i * d + j) * d;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.structure[base + k];
                }
            }
        }
        out
    }

    /// `aⁿ`, with `a⁰ = 𝟏`.
    pub fn pow(&self, a: &[C64], n: usize) -> Vec<C64> {
        if n == 0 {
            return self.identity.clone();
        }
        let mut acc = a.to_vec();
        for _ in 1..n {
            acc = self.product(&acc, a);
        }
        acc
    }

    /// Matrix of `b ↦ a·b`, row-major `d × d`: entry `(k, j) = Σᵢ aᵢ c[i][j][k]`.
    pub fn multiplication_matrix(&self, a: &[C64]) -> Vec<Vec<C64>> {
        let d = self.dim;
        let mut m = vec![vec![ZERO; d]; d];
        for (i, ai) in a.iter().enumerate() {
            if *ai == ZERO {
                continue;
            }
            for j in 0..d {
                for (k, row) in m.iter_mut().enumerate() {
                    row[j] += ai * self.structure[(i * d + j) * d + k];
                }
            }
        }
        m
    }

    pub fn norm(&self, a: &[C64]) -> f64 {
        self.norm.norm(a)
    }

    /// Largest observed `‖ab‖ / (‖a‖‖b‖)` over `samples` seeded Gaussian pairs.
    pub fn measure_submultiplicativity(&self, samples: usize, seed: u64) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..samples as u64 {
            let mut rng = stream_rng(seed, s);
            let mut draw = || -> Vec<C64> {
                (0..self.dim)
                    .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            };
            let a = draw();
            let b = draw();
            let denom = self.norm(&a) * self.norm(&b);
            if denom > 0.0 {
                worst = worst.max(self.norm(&self.product(&a, &b)) / denom);
            }
        }
        worst
    }

    #[allow(clippy::needless_range_loop)]
    fn check_laws(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if self.structure(i, j, k) != self.structure(j, i, k) {
                        return Err(Error::InvalidAlgebra(format!(
                            "structure tensor is not commutative at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        let scale = self.structure.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let basis: Vec<Vec<C64>> = (0..d).map(|i| self.basis(i)).collect();
        let products: Vec<Vec<Vec<C64>>> = (0..d)
            .map(|i| (0..d).map(|j| self.product(&basis[i], &basis[j])).collect())
            .collect();
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let left = self.product(&products[i][j], &basis[l]);
                    let right = self.product(&basis[i], &products[j][l]);
                    let gap = left
                        .iter()
                        .zip(&right)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    if gap > LAW_TOLERANCE * scale * scale {
                        return Err(Error::InvalidAlgebra(format!(
                            "associativity fails on basis triple ({i}, {j}, {l}) by {gap:e}"
                        )));
                    }
                }
            }
        }
        let id_scale = self.identity.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (i, e) in basis.iter().enumerate() {
            let p = self.product(&self.identity, e);
            let gap = p
                .iter()
                .zip(e)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if gap > LAW_TOLERANCE * scale * id_scale {
                return Err(Error::InvalidAlgebra(format!(
                    "identity law fails on basis element {i} by {gap:e}"
                )));
            }
        }
        Ok(())
    }

    /// Lower bound for `sup{|φ(a)| : ‖φ‖_* ≤ 1}` by seeded search over the dual
    /// unit sphere. Never exceeds `‖a‖ + 1e-9`: candidates are normalised by an
    /// upper bound of their dual norm.
    pub fn dual_norm_sup(&self, a: &[C64], budget: &SearchBudget) -> Result<NormEstimate> {
        self.check(a)?;
        let landscape = DualBall {
            chart: SphereChart::new(vec![(self.dim, Gauge::Dual(self.norm.clone()))]),
            target: a,
            start: norming_functional(&self.norm, a),
        };
        let ascent = maximize(&landscape, budget);
        let witness = landscape
            .chart
            .points(&ascent.params)
            .unwrap_or_else(|| vec![vec![ZERO; self.dim]]);
        let value = pair(&witness[0], a).norm();
        Ok(NormEstimate {
            value,
            witness,
            budget: *budget,
        })
    }
}

/// A functional of dual norm 1 that attains `‖a‖`, when available in closed
/// form.
pub(crate) fn norming_functional(norm: &NormSpec, a: &[C64]) -> Option<Vec<C64>> {
    match norm {
        NormSpec::Sup => NormSpec::P(1.0).dual_maximizer(a),
        NormSpec::P(p) if *p == 1.0 => NormSpec::Sup.dual_maximizer(a),
        NormSpec::P(p) => NormSpec::P(*p / (*p - 1.0)).dual_maximizer(a),
        NormSpec::Lourenco(l) => {
            // u·ψ + χ − χ(e)ψ with χ norming x for the base norm
            let (s, x) = l.split(a);
            let u = if s.norm() > 0.0 {
                (s / s.norm()).conj()
            } else {
                ONE
            };
            let chi = norming_functional(l.base(), &x)?;
            let chi_e = pair(&chi, l.unit());
            Some(
                l.psi()
                    .iter()
                    .zip(&chi)
                    .map(|(p, c)| u * p + c - chi_e * p)
                    .collect(),
            )
        }
    }
}

struct DualBall<'a> {
    chart: SphereChart,
    target: &'a [C64],
    start: Option<Vec<C64>>,
}

impl Landscape for DualBall<'_> {
    fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    fn sample(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
        self.chart.sample(rng)
    }

    fn value(&self, params: &[f64]) -> f64 {
        match self.chart.points(params) {
            Some(p) => pair(&p[0], self.target).norm(),
            None => 0.0,
        }
    }

    fn starts(&self) -> Vec<Vec<f64>> {
        self.start
            .iter()
            .map(|s| self.chart.params_of(std::slice::from_ref(s)))
            .collect()
    }
}
