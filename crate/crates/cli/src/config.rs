//! Run configuration: named objects, the command to run, seed and
//! tolerance overrides.
//!
//! ```json
//! {
//!   "seed": 42,
//!   "objects": {
//!     "E": {"type": "space", "dim": 1, "norm": {"kind": "p", "p": 2.0}},
//!     "P": {"type": "polynomial", "space": "E", "degree": 2,
//!           "terms": [{"weight": [1.0, 0.0], "matrix": [[[1.0, 0.0]]]}]}
//!   },
//!   "command": {"name": "eval", "object": "P", "point": "[[3.0, 0.0]]"}
//! }
//! ```
//!
//! Every object carries a `"type"` tag; the remaining fields are the
//! corresponding document from [`polyalg::schema`]. Spaces and algebras may be
//! referred to by name from other objects.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use clap::{Subcommand, ValueEnum};
use polyalg::algebra::{Character, FiniteBanachAlgebra};
use polyalg::norms::CompactSet;
use polyalg::poly::{PolynomialSum, PowerSumRep};
use polyalg::schema::{
    AlgebraDoc, CharacterDoc, PointsDoc, PolynomialDoc, PolynomialSumDoc, Ref, SpaceDoc, TensorDoc,
};
use polyalg::space::FiniteSpace;
use polyalg::tensor::TensorElement;
use polyalg::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ObjectDoc {
    Space(SpaceDoc),
    Algebra(AlgebraDoc),
    Polynomial(PolynomialDoc),
    PolynomialSum(PolynomialSumDoc),
    Points(PointsDoc),
    Tensor(TensorObjectDoc),
    Character(CharacterDoc),
}

/// A tensor element together with the space and algebra it lives over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorObjectDoc {
    pub space: Ref<SpaceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Ref<AlgebraDoc>>,
    #[serde(flatten)]
    pub tensor: TensorDoc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// Supremum of `‖P(x)‖` over the unit ball.
    UnitBall,
    /// Maximum of `‖P(x)‖` over a point set.
    #[value(name = "uniform-K")]
    #[serde(rename = "uniform-K")]
    UniformK,
    /// `Σ|λᵢ|‖Tᵢ‖ⁿ` for the given representation.
    NuclearUpper,
    /// Norm of one operator `Tᵢ` of the representation.
    Operator,
    /// Injective tensor norm of a tensor element over a point set.
    TensorEps,
}

/// One command with its arguments. Arguments naming objects refer to the
/// config's `objects`; point arguments also accept inline JSON such as
/// `[[3.0, 0.0]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(
    tag = "name",
    rename_all = "kebab-case",
    rename_all_fields = "kebab-case",
    deny_unknown_fields
)]
pub enum Command {
    /// Evaluate a polynomial at a point, or at every point of a point set.
    Eval {
        #[arg(long)]
        object: String,
        /// Inline point (JSON) or a points object (first point).
        #[arg(long, conflicts_with = "points")]
        #[serde(default)]
        point: Option<String>,
        /// Points object; evaluates at every point.
        #[arg(long)]
        #[serde(default)]
        points: Option<String>,
    },
    /// Coefficients of the symmetric form of a homogeneous polynomial.
    Polarize {
        #[arg(long)]
        object: String,
    },
    /// Power-sum representation of the pointwise product of two polynomials.
    Product {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Norm estimates with witnesses.
    Norm {
        #[arg(long)]
        object: String,
        #[arg(long, value_enum)]
        kind: NormKind,
        /// Points object (for `uniform-K` and `tensor-eps`).
        #[arg(long = "K")]
        #[serde(default, rename = "K")]
        k: Option<String>,
        /// Term index (for `operator`).
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        term: usize,
        #[arg(long)]
        #[serde(default)]
        samples: Option<usize>,
        #[arg(long)]
        #[serde(default)]
        refine: Option<usize>,
    },
    /// Falsification search for hull membership.
    Hull {
        /// Inline point (JSON) or a points object (first point).
        #[arg(long)]
        candidate: String,
        #[arg(long = "K")]
        #[serde(rename = "K")]
        k: String,
        #[arg(long, default_value_t = 4)]
        #[serde(default = "default_cap")]
        degree_cap: usize,
        #[arg(long, default_value_t = 4)]
        #[serde(default = "default_cap")]
        terms_cap: usize,
        #[arg(long)]
        #[serde(default)]
        samples: Option<usize>,
        #[arg(long)]
        #[serde(default)]
        refine: Option<usize>,
    },
    /// Rewrite a polynomial as `Σ fᵢ ⊗ aᵢ` on a point set.
    Tensorize {
        #[arg(long)]
        object: String,
        #[arg(long = "K")]
        #[serde(rename = "K")]
        k: String,
        /// Rank of the identity approximation (full rank when omitted).
        #[arg(long)]
        #[serde(default)]
        rank_cap: Option<usize>,
        #[arg(long)]
        #[serde(default)]
        samples: Option<usize>,
        #[arg(long)]
        #[serde(default)]
        refine: Option<usize>,
    },
    /// Enumerate the characters of an algebra, or build and check the
    /// character `P ↦ φ(P(a))` on a list of generators.
    Character {
        /// Algebra object whose characters are enumerated.
        #[arg(long, required_unless_present = "candidate")]
        #[serde(default)]
        algebra: Option<String>,
        /// Inline point (JSON) or a points object (first point).
        #[arg(long, requires_all = ["k", "generators"])]
        #[serde(default)]
        candidate: Option<String>,
        #[arg(long = "K")]
        #[serde(default, rename = "K")]
        k: Option<String>,
        /// Comma-separated polynomial objects.
        #[arg(long, value_delimiter = ',')]
        #[serde(default)]
        generators: Vec<String>,
        /// Character object; defaults to the first enumerated character.
        #[arg(long)]
        #[serde(default)]
        phi: Option<String>,
        #[arg(long, default_value_t = 2)]
        #[serde(default = "default_small_cap")]
        degree_cap: usize,
        #[arg(long, default_value_t = 2)]
        #[serde(default = "default_small_cap")]
        terms_cap: usize,
        #[arg(long)]
        #[serde(default)]
        samples: Option<usize>,
    },
    /// Run one verification suite (or `all`).
    VerifySuite {
        #[arg(long)]
        suite: String,
        /// Override the suite's instance count.
        #[arg(long)]
        #[serde(default)]
        instances: Option<usize>,
    },
    /// Run every verification suite and summarise.
    Report {
        /// Override every suite's instance count.
        #[arg(long)]
        #[serde(default)]
        instances: Option<usize>,
    },
}

fn default_cap() -> usize {
    4
}

fn default_small_cap() -> usize {
    2
}

impl Command {
    /// Commands whose result depends on a random search.
    pub fn is_stochastic(&self) -> bool {
        match self {
            Command::Eval { .. } | Command::Polarize { .. } | Command::Product { .. } => false,
            Command::Norm { kind, .. } => {
                !matches!(kind, NormKind::UniformK | NormKind::NuclearUpper)
            }
            Command::Character { candidate, .. } => candidate.is_some(),
            Command::Hull { .. }
            | Command::Tensorize { .. }
            | Command::VerifySuite { .. }
            | Command::Report { .. } => true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub objects: BTreeMap<String, ObjectDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Per-suite tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Every object resolves (names, dimensions, norms).
    pub fn validate(&self) -> Result<(), CliError> {
        let r = Resolver::new(self);
        for name in self.objects.keys() {
            r.check(name)?;
        }
        for (suite, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(CliError::Config(format!(
                    "tolerance for '{suite}' must be a nonnegative number"
                )));
            }
        }
        Ok(())
    }
}

/// Builds library values from the config's objects.
pub struct Resolver<'a> {
    config: &'a RunConfig,
}

fn config_err(e: polyalg::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl<'a> Resolver<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Self { config }
    }

    fn get(&self, name: &str) -> Result<&'a ObjectDoc, CliError> {
        self.config
            .objects
            .get(name)
            .ok_or_else(|| CliError::Config(format!("unknown object '{name}'")))
    }

    fn check(&self, name: &str) -> Result<(), CliError> {
        match self.get(name)? {
            ObjectDoc::Space(_) => self.space(&Ref::Name(name.into())).map(drop),
            ObjectDoc::Algebra(_) => self.algebra(Some(&Ref::Name(name.into()))).map(drop),
            ObjectDoc::Polynomial(_) | ObjectDoc::PolynomialSum(_) => {
                self.polynomial(name).map(drop)
            }
            ObjectDoc::Points(_) => self.points(name).map(drop),
            ObjectDoc::Tensor(_) => self.tensor(name).map(drop),
            ObjectDoc::Character(_) => self.character(name).map(drop),
        }
    }

    pub fn space(&self, r: &Ref<SpaceDoc>) -> Result<FiniteSpace, CliError> {
        match r {
            Ref::Inline(doc) => doc.to_space().map_err(config_err),
            Ref::Name(n) => match self.get(n)? {
                ObjectDoc::Space(doc) => doc.to_space().map_err(config_err),
                _ => Err(CliError::Config(format!("object '{n}' is not a space"))),
            },
        }
    }

    /// `None` is the scalar field.
    pub fn algebra(
        &self,
        r: Option<&Ref<AlgebraDoc>>,
    ) -> Result<Arc<FiniteBanachAlgebra>, CliError> {
        let alg = match r {
            None => FiniteBanachAlgebra::scalar(),
            Some(Ref::Inline(doc)) => doc.to_algebra().map_err(config_err)?,
            Some(Ref::Name(n)) => match self.get(n)? {
                ObjectDoc::Algebra(doc) => doc.to_algebra().map_err(config_err)?,
                _ => return Err(CliError::Config(format!("object '{n}' is not an algebra"))),
            },
        };
        Ok(Arc::new(alg))
    }

    fn required_space(
        &self,
        name: &str,
        r: Option<&Ref<SpaceDoc>>,
    ) -> Result<FiniteSpace, CliError> {
        r.map_or_else(
            || Err(CliError::Config(format!("object '{name}' needs a space"))),
            |r| self.space(r),
        )
    }

    /// A polynomial or polynomial-sum object.
    pub fn polynomial(&self, name: &str) -> Result<PolynomialSum, CliError> {
        match self.get(name)? {
            ObjectDoc::Polynomial(doc) => Ok(self.power_sum_doc(name, doc)?.into()),
            ObjectDoc::PolynomialSum(doc) => {
                let space = self.required_space(name, doc.space.as_ref())?;
                let alg = self.algebra(doc.algebra.as_ref())?;
                doc.to_sum(&space, &alg).map_err(config_err)
            }
            _ => Err(CliError::Config(format!(
                "object '{name}' is not a polynomial"
            ))),
        }
    }

    /// A single homogeneous polynomial object.
    pub fn power_sum(&self, name: &str) -> Result<PowerSumRep, CliError> {
        match self.get(name)? {
            ObjectDoc::Polynomial(doc) => self.power_sum_doc(name, doc),
            _ => Err(CliError::Config(format!(
                "object '{name}' is not a homogeneous polynomial"
            ))),
        }
    }

    fn power_sum_doc(&self, name: &str, doc: &PolynomialDoc) -> Result<PowerSumRep, CliError> {
        let space = self.required_space(name, doc.space.as_ref())?;
        let alg = self.algebra(doc.algebra.as_ref())?;
        doc.to_power_sum(&space, &alg).map_err(config_err)
    }

    pub fn points(&self, name: &str) -> Result<CompactSet, CliError> {
        match self.get(name)? {
            ObjectDoc::Points(doc) => {
                let space = self.required_space(name, doc.space.as_ref())?;
                doc.to_compact(&space).map_err(config_err)
            }
            _ => Err(CliError::Config(format!(
                "object '{name}' is not a point set"
            ))),
        }
    }

    /// Inline JSON vector, or the first point of a points object.
    pub fn point(&self, spec: &str) -> Result<Vec<C64>, CliError> {
        if spec.trim_start().starts_with('[') {
            return serde_json::from_str(spec)
                .map_err(|e| CliError::Config(format!("invalid point {spec}: {e}")));
        }
        Ok(self.points(spec)?.points()[0].clone())
    }

    pub fn tensor(&self, name: &str) -> Result<TensorElement, CliError> {
        match self.get(name)? {
            ObjectDoc::Tensor(doc) => {
                let space = self.space(&doc.space)?;
                let alg = self.algebra(doc.algebra.as_ref())?;
                doc.tensor.to_tensor(&space, &alg).map_err(config_err)
            }
            _ => Err(CliError::Config(format!("object '{name}' is not a tensor"))),
        }
    }

    pub fn character(&self, name: &str) -> Result<Character, CliError> {
        match self.get(name)? {
            ObjectDoc::Character(doc) => Ok(doc.into()),
            _ => Err(CliError::Config(format!(
                "object '{name}' is not a character"
            ))),
        }
    }

    pub fn is_tensor(&self, name: &str) -> bool {
        matches!(self.config.objects.get(name), Some(ObjectDoc::Tensor(_)))
    }

    pub fn algebra_named(&self, name: &str) -> Result<Arc<FiniteBanachAlgebra>, CliError> {
        self.algebra(Some(&Ref::Name(name.into())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "seed": 42,
        "objects": {
            "E": {"type": "space", "dim": 1, "norm": {"kind": "p", "p": 2.0}},
            "A": {"type": "algebra", "kind": "pointwise", "dim": 2, "norm": {"kind": "sup"}},
            "P": {"type": "polynomial", "space": "E", "degree": 2,
                  "terms": [{"weight": [1.0, 0.0], "matrix": [[[1.0, 0.0]]]}]},
            "K": {"type": "points", "space": "E", "points": [[[1.0, 0.0]], [[0.0, 1.0]]]}
        },
        "command": {"name": "eval", "object": "P", "point": "[[3.0, 0.0]]"}
    }"#;

    #[test]
    fn example_config_resolves() {
        let config = RunConfig::parse(EXAMPLE).unwrap();
        let r = Resolver::new(&config);
        assert_eq!(r.power_sum("P").unwrap().degree(), 2);
        assert_eq!(r.points("K").unwrap().len(), 2);
        assert_eq!(r.algebra_named("A").unwrap().dim(), 2);
        assert_eq!(r.point("K").unwrap(), vec![C64::new(1.0, 0.0)]);
        assert!(matches!(config.command, Some(Command::Eval { .. })));
    }

    #[test]
    fn dangling_names_are_config_errors() {
        let text = r#"{"objects": {"P": {"type": "polynomial", "space": "nope", "degree": 1, "terms": []}}}"#;
        assert!(matches!(RunConfig::parse(text), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::parse(r#"{"objects": {}, "sead": 1}"#).is_err());
        assert!(
            RunConfig::parse(r#"{"command": {"name": "eval", "object": "P", "bogus": 1}}"#)
                .is_err()
        );
    }

    #[test]
    fn norm_command_parses_kebab_case() {
        let text = r#"{"command": {"name": "norm", "object": "P", "kind": "uniform-K", "K": "K"}}"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(
            config.command,
            Some(Command::Norm {
                object: "P".into(),
                kind: NormKind::UniformK,
                k: Some("K".into()),
                term: 0,
                samples: None,
                refine: None
            })
        );
    }
}
