//! JSON documents for spaces, algebras, polynomials, point sets, tensors and
//! characters.
//!
//! Complex numbers are `[re, im]` pairs. Norms are tagged by `"kind"`:
//! `{"kind": "p", "p": 2.0}`, `{"kind": "sup"}` or
//! `{"kind": "lourenco", "psi": [...], "unit": [...], "base": {...}}`.
//! Objects that refer to a space or algebra accept either an inline
//! document or the name of an object defined elsewhere ([`Ref`]).

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Character, FiniteBanachAlgebra};
use crate::error::{Error, Result};
use crate::norms::CompactSet;
use crate::poly::{CMatrix, PolynomialSum, PowerSumRep, Term};
use crate::space::{FiniteSpace, LourencoNorm, NormSpec};
use crate::tensor::TensorElement;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NormDoc {
    P {
        p: f64,
    },
    Sup,
    Lourenco {
        psi: Vec<C64>,
        unit: Vec<C64>,
        base: Box<NormDoc>,
    },
}

impl NormDoc {
    pub fn to_spec(&self) -> Result<NormSpec> {
        match self {
            NormDoc::P { p } => NormSpec::p(*p),
            NormDoc::Sup => Ok(NormSpec::Sup),
            NormDoc::Lourenco { psi, unit, base } => Ok(NormSpec::Lourenco(LourencoNorm::new(
                psi.clone(),
                unit.clone(),
                base.to_spec()?,
            )?)),
        }
    }

    pub fn from_spec(spec: &NormSpec) -> Self {
        match spec {
            NormSpec::P(p) => NormDoc::P { p: *p },
            NormSpec::Sup => NormDoc::Sup,
            NormSpec::Lourenco(l) => NormDoc::Lourenco {
                psi: l.psi().to_vec(),
                unit: l.unit().to_vec(),
                base: Box::new(NormDoc::from_spec(l.base())),
            },
        }
    }
}

/// Either the name of an object defined elsewhere or an inline document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Name(String),
    Inline(T),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub dim: usize,
    pub norm: NormDoc,
}

impl SpaceDoc {
    pub fn to_space(&self) -> Result<FiniteSpace> {
        FiniteSpace::new(self.dim, self.norm.to_spec()?)
    }

    pub fn from_space(space: &FiniteSpace) -> Self {
        Self {
            dim: space.dim(),
            norm: NormDoc::from_spec(space.norm_spec()),
        }
    }
}

fn default_constant() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlgebraDoc {
    /// The scalar field `ℂ`.
    Scalar,
    /// `ℂᵈ` with the coordinatewise product.
    Pointwise { dim: usize, norm: NormDoc },
    /// The Lourenço product on a space, from `ψ` and a unit vector.
    Lourenco {
        space: SpaceDoc,
        psi: Vec<C64>,
        unit: Vec<C64>,
    },
    /// An explicit structure tensor `structure[i][j][k]`.
    Structure {
        dim: usize,
        structure: Vec<Vec<Vec<C64>>>,
        identity: Vec<C64>,
        norm: NormDoc,
        #[serde(default = "default_constant")]
        constant: f64,
    },
}

impl AlgebraDoc {
    pub fn to_algebra(&self) -> Result<FiniteBanachAlgebra> {
        match self {
            AlgebraDoc::Scalar => Ok(FiniteBanachAlgebra::scalar()),
            AlgebraDoc::Pointwise { dim, norm } => {
                FiniteBanachAlgebra::pointwise(*dim, norm.to_spec()?)
            }
            AlgebraDoc::Lourenco { space, psi, unit } => {
                FiniteBanachAlgebra::lourenco(&space.to_space()?, psi.clone(), unit.clone())
            }
            AlgebraDoc::Structure {
                dim,
                structure,
                identity,
                norm,
                constant,
            } => {
                let d = *dim;
                let shape_ok = structure.len() == d
                    && structure
                        .iter()
                        .all(|m| m.len() == d && m.iter().all(|r| r.len() == d));
                if !shape_ok {
                    return Err(Error::Schema(format!(
                        "structure tensor must be {d}×{d}×{d}"
                    )));
                }
                let flat = structure.iter().flatten().flatten().copied().collect();
                FiniteBanachAlgebra::from_structure(
                    d,
                    flat,
                    identity.clone(),
                    norm.to_spec()?,
                    *constant,
                )
            }
        }
    }

    /// Explicit structure-tensor document for any algebra.
    pub fn from_algebra(algebra: &FiniteBanachAlgebra) -> Self {
        let d = algebra.dim();
        let structure = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| algebra.structure(i, j, k)).collect())
                    .collect()
            })
            .collect();
        AlgebraDoc::Structure {
            dim: d,
            structure,
            identity: algebra.identity().to_vec(),
            norm: NormDoc::from_spec(algebra.norm_spec()),
            constant: algebra.constant(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub weight: C64,
    /// `dim(A) × dim(E)` rows.
    pub matrix: Vec<Vec<C64>>,
}

/// A homogeneous power sum (or a constant when `degree = 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDoc {
    pub degree: usize,
    #[serde(default)]
    pub terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Ref<SpaceDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Ref<AlgebraDoc>>,
}

impl PolynomialDoc {
    /// Builds the power sum on the given (already resolved) space and algebra.
    pub fn to_power_sum(
        &self,
        space: &FiniteSpace,
        algebra: &Arc<FiniteBanachAlgebra>,
    ) -> Result<PowerSumRep> {
        if self.degree == 0 {
            let c = self
                .constant
                .clone()
                .ok_or_else(|| Error::Schema("degree-0 polynomial needs a constant".into()))?;
            if !self.terms.is_empty() {
                return Err(Error::Schema(
                    "degree-0 polynomial cannot have terms".into(),
                ));
            }
            return PowerSumRep::constant(space.clone(), algebra.clone(), c);
        }
        if self.constant.is_some() {
            return Err(Error::Schema(
                "only degree-0 polynomials carry a constant".into(),
            ));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(Term::new(t.weight, CMatrix::from_rows(t.matrix.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        PowerSumRep::new(space.clone(), algebra.clone(), self.degree, terms)
    }

    /// Resolves inline space and algebra documents; named references must be
    /// resolved by the caller.
    pub fn to_power_sum_inline(&self) -> Result<PowerSumRep> {
        let space = match &self.space {
            Some(Ref::Inline(s)) => s.to_space()?,
            _ => return Err(Error::Schema("polynomial needs an inline space".into())),
        };
        let algebra = match &self.algebra {
            Some(Ref::Inline(a)) => a.to_algebra()?,
            None => FiniteBanachAlgebra::scalar(),
            Some(Ref::Name(n)) => {
                return Err(Error::Schema(format!("unresolved algebra reference '{n}'")))
            }
        };
        self.to_power_sum(&space, &Arc::new(algebra))
    }

    /// Document without space and algebra.
    pub fn from_power_sum(p: &PowerSumRep) -> Self {
        Self {
            degree: p.degree(),
            terms: p
                .terms()
                .iter()
                .map(|t| TermDoc {
                    weight: t.weight,
                    matrix: t.matrix.to_rows(),
                })
                .collect(),
            constant: p.constant_value().map(|c| c.to_vec()),
            space: None,
            algebra: None,
        }
    }

    /// Document with inline space and algebra.
    pub fn from_power_sum_inline(p: &PowerSumRep) -> Self {
        Self {
            space: Some(Ref::Inline(SpaceDoc::from_space(p.space()))),
            algebra: Some(Ref::Inline(AlgebraDoc::from_algebra(p.algebra()))),
            ..Self::from_power_sum(p)
        }
    }
}

/// `P₀ + P₁ + … + P_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSumDoc {
    pub parts: Vec<PolynomialDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Ref<SpaceDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Ref<AlgebraDoc>>,
}

impl PolynomialSumDoc {
    pub fn to_sum(
        &self,
        space: &FiniteSpace,
        algebra: &Arc<FiniteBanachAlgebra>,
    ) -> Result<PolynomialSum> {
        let parts = self
            .parts
            .iter()
            .map(|p| p.to_power_sum(space, algebra))
            .collect::<Result<Vec<_>>>()?;
        PolynomialSum::new(space.clone(), algebra.clone(), parts)
    }

    pub fn from_sum(p: &PolynomialSum) -> Self {
        Self {
            parts: p
                .parts()
                .iter()
                .map(PolynomialDoc::from_power_sum)
                .collect(),
            space: None,
            algebra: None,
        }
    }
}

/// A finite point set in a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Ref<SpaceDoc>>,
    pub points: Vec<Vec<C64>>,
}

impl PointsDoc {
    pub fn to_compact(&self, space: &FiniteSpace) -> Result<CompactSet> {
        CompactSet::new(space.clone(), self.points.clone())
    }

    pub fn from_compact(k: &CompactSet) -> Self {
        Self {
            space: None,
            points: k.points().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorPairDoc {
    pub f: PolynomialDoc,
    pub a: Vec<C64>,
}

/// `Σ fᵢ ⊗ aᵢ` with scalar polynomials `fᵢ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDoc {
    pub pairs: Vec<TensorPairDoc>,
}

impl TensorDoc {
    pub fn to_tensor(
        &self,
        space: &FiniteSpace,
        algebra: &Arc<FiniteBanachAlgebra>,
    ) -> Result<TensorElement> {
        let scalar = Arc::new(FiniteBanachAlgebra::scalar());
        let pairs = self
            .pairs
            .iter()
            .map(|p| Ok((p.f.to_power_sum(space, &scalar)?, p.a.clone())))
            .collect::<Result<Vec<_>>>()?;
        TensorElement::new(space.clone(), algebra.clone(), pairs)
    }

    pub fn from_tensor(t: &TensorElement) -> Self {
        Self {
            pairs: t
                .pairs()
                .iter()
                .map(|(f, a)| TensorPairDoc {
                    f: PolynomialDoc::from_power_sum(f),
                    a: a.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterDoc {
    pub functional: Vec<C64>,
}

impl From<&Character> for CharacterDoc {
    fn from(c: &Character) -> Self {
        Self {
            functional: c.functional.clone(),
        }
    }
}

impl From<&CharacterDoc> for Character {
    fn from(d: &CharacterDoc) -> Self {
        Character::new(d.functional.clone())
    }
}

/// Canonical JSON text: sorted keys (serde_json's default map), shortest
/// round-trip float formatting.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    serde_json::to_string_pretty(&v).map_err(|e| Error::Schema(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}
