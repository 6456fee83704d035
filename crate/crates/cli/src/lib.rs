//! Command-line driver for `polyalg`: JSON configuration, the commands, and
//! the verification suites.
//!
//! Every command produces one JSON document in canonical form (sorted keys,
//! shortest round-trip floats), so a fixed config and seed give byte-identical
//! output for any thread count.

pub mod config;
pub mod suites;

use std::sync::Arc;

use polyalg::algebra::{enumerate_characters, validate_character, Character};
use polyalg::hull::{
    character_from_point, hull_membership, product_character, CertifiedPoint, HullQuery,
};
use polyalg::norms::{
    injective_tensor_norm, nuclear_norm_upper, operator_norm, sup_norm_unit_ball,
    uniform_norm_with_index, BallTarget,
};
use polyalg::poly::{polarize, PolynomialSum};
use polyalg::schema::{
    to_canonical_json, CharacterDoc, PolynomialDoc, PolynomialSumDoc, TensorDoc,
};
use polyalg::search::SearchBudget;
use polyalg::tensor::{finite_rank_identity_approx, tensorize};
use polyalg::C64;
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{Command, NormKind, Resolver, RunConfig};
pub use suites::{Suite, SuiteReport, SUITES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Computation(#[from] polyalg::Error),
    #[error("verification failed: {0}")]
    SuiteFailure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Computation(_) => 2,
            CliError::SuiteFailure(_) => 3,
        }
    }
}

/// Result of a command: the JSON document, and whether a suite failed (the
/// document is still emitted in that case).
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub output: Value,
    pub suite_failed: bool,
}

impl Outcome {
    fn ok(output: Value) -> Self {
        Self {
            output,
            suite_failed: false,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        to_canonical_json(&self.output).map_err(CliError::Computation)
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

fn budget(samples: Option<usize>, refine: Option<usize>, seed: u64) -> SearchBudget {
    let d = SearchBudget::default();
    SearchBudget::new(
        samples.unwrap_or(d.samples),
        refine.unwrap_or(d.refine_steps),
        seed,
    )
}

/// Runs `command` against `config`'s objects. `seed` overrides the config's
/// seed; stochastic commands require one of the two.
pub fn run(config: &RunConfig, command: &Command, seed: Option<u64>) -> Result<Outcome, CliError> {
    let seed = match seed.or(config.seed) {
        Some(s) => s,
        None if command.is_stochastic() => {
            return Err(CliError::Config(
                "this command needs a seed (--seed or \"seed\" in the config)".into(),
            ))
        }
        None => 0,
    };
    let r = Resolver::new(config);
    match command {
        Command::Eval {
            object,
            point,
            points,
        } => {
            let p = r.polynomial(object)?;
            match (point, points) {
                (Some(spec), None) => Ok(Outcome::ok(
                    json!({ "value": to_value(&p.eval(&r.point(spec)?)?) }),
                )),
                (None, Some(name)) => {
                    let k = r.points(name)?;
                    let values = k
                        .points()
                        .iter()
                        .map(|x| p.eval(x))
                        .collect::<polyalg::Result<Vec<_>>>()?;
                    Ok(Outcome::ok(json!({ "values": to_value(&values) })))
                }
                _ => Err(CliError::Config(
                    "eval needs exactly one of --point and --points".into(),
                )),
            }
        }
        Command::Polarize { object } => {
            let p = r.power_sum(object)?;
            let t = polarize(&p)?;
            let coefficients: Vec<Value> = t
                .index()
                .keys()
                .iter()
                .zip(t.coeffs())
                .map(|(key, c)| json!({ "index": key, "value": to_value(c) }))
                .collect();
            Ok(Outcome::ok(
                json!({ "degree": t.degree(), "coefficients": coefficients }),
            ))
        }
        Command::Product { left, right } => {
            let p = r.polynomial(left)?;
            let q = r.polynomial(right)?;
            Ok(Outcome::ok(polynomial_value(&p.product(&q)?)))
        }
        Command::Norm {
            object,
            kind,
            k,
            term,
            samples,
            refine,
        } => norm(
            &r,
            object,
            *kind,
            k.as_deref(),
            *term,
            budget(*samples, *refine, seed),
        ),
        Command::Hull {
            candidate,
            k,
            degree_cap,
            terms_cap,
            samples,
            refine,
        } => {
            let q = HullQuery::new(
                r.point(candidate)?,
                r.points(k)?,
                *degree_cap,
                *terms_cap,
                budget(*samples, *refine, seed),
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let cert = hull_membership(&q)?;
            Ok(Outcome::ok(json!({
                "candidate": to_value(&cert.candidate),
                "verdict": to_value(&cert.verdict),
                "witness": cert.witness.as_ref().map(polynomial_value),
                "ratio": cert.ratio,
                "margin": cert.margin,
                "stage": cert.stage,
                "degree_cap": cert.degree_cap,
                "terms_cap": cert.terms_cap,
                "budget": to_value(&cert.budget),
            })))
        }
        Command::Tensorize {
            object,
            k,
            rank_cap,
            samples,
            refine,
        } => {
            let p = r.polynomial(object)?;
            let k = r.points(k)?;
            let approx = finite_rank_identity_approx(p.space(), &k, *rank_cap)?;
            let out = tensorize(&p, &k, &approx, &budget(*samples, *refine, seed))?;
            Ok(Outcome::ok(json!({
                "tensor": to_value(&TensorDoc::from_tensor(&out.element)),
                "measured_error": out.measured_error,
                "certified_bound": out.certified_bound,
                "epsilon": approx.epsilon(),
                "rank": approx.rank(),
                "form_norms": out.form_norms,
            })))
        }
        Command::Character {
            algebra,
            candidate,
            k,
            generators,
            phi,
            degree_cap,
            terms_cap,
            samples,
        } => character(
            &r,
            algebra.as_deref(),
            candidate.as_deref(),
            k.as_deref(),
            generators,
            phi.as_deref(),
            (*degree_cap, *terms_cap),
            budget(*samples, None, seed),
        ),
        Command::VerifySuite { suite, instances } => {
            if suite == "all" {
                return report(config, seed, *instances);
            }
            let s = suites::find(suite).ok_or_else(|| {
                let names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
                CliError::Config(format!(
                    "unknown suite '{suite}' (known: {}, all)",
                    names.join(", ")
                ))
            })?;
            let rep = s.run(seed, *instances, config.tolerances.get(s.name).copied());
            Ok(Outcome {
                suite_failed: !rep.pass,
                output: to_value(&rep),
            })
        }
        Command::Report { instances } => report(config, seed, *instances),
    }
}

fn polynomial_value(p: &PolynomialSum) -> Value {
    if let [single] = p.parts() {
        to_value(&PolynomialDoc::from_power_sum(single))
    } else {
        to_value(&PolynomialSumDoc::from_sum(p))
    }
}

fn norm(
    r: &Resolver<'_>,
    object: &str,
    kind: NormKind,
    k: Option<&str>,
    term: usize,
    budget: SearchBudget,
) -> Result<Outcome, CliError> {
    let need_k = || k.ok_or_else(|| CliError::Config("this norm needs --K".into()));
    let estimate = match kind {
        NormKind::UnitBall => to_value(&sup_norm_unit_ball(
            BallTarget::Polynomial(&r.power_sum(object)?),
            &budget,
        )),
        NormKind::UniformK => {
            let k = r.points(need_k()?)?;
            let (value, i) = if r.is_tensor(object) {
                uniform_norm_with_index(&r.tensor(object)?, &k)?
            } else {
                uniform_norm_with_index(&r.polynomial(object)?, &k)?
            };
            json!({ "value": value, "witness": [to_value(&k.points()[i])], "budget": Value::Null })
        }
        NormKind::NuclearUpper => {
            let p = r.power_sum(object)?;
            json!({ "value": nuclear_norm_upper(&p), "witness": [], "budget": Value::Null })
        }
        NormKind::Operator => {
            let p = r.power_sum(object)?;
            if term >= p.terms().len() {
                return Err(CliError::Config(format!(
                    "term {term} out of range ({} terms)",
                    p.terms().len()
                )));
            }
            to_value(&operator_norm(&p.operator(term), &budget))
        }
        NormKind::TensorEps => {
            let k = r.points(need_k()?)?;
            to_value(&injective_tensor_norm(&r.tensor(object)?, &k, &budget)?)
        }
    };
    Ok(Outcome::ok(estimate))
}

#[allow(clippy::too_many_arguments)]
fn character(
    r: &Resolver<'_>,
    algebra: Option<&str>,
    candidate: Option<&str>,
    k: Option<&str>,
    generators: &[String],
    phi: Option<&str>,
    caps: (usize, usize),
    budget: SearchBudget,
) -> Result<Outcome, CliError> {
    let Some(candidate) = candidate else {
        let name = algebra
            .ok_or_else(|| CliError::Config("character needs --algebra or --candidate".into()))?;
        let alg = r.algebra_named(name)?;
        let chars = enumerate_characters(&alg)?;
        let listed = chars
            .iter()
            .map(|c| {
                let check = validate_character(&alg, c)?;
                Ok(json!({ "functional": to_value(&c.functional), "check": to_value(&check) }))
            })
            .collect::<polyalg::Result<Vec<_>>>()?;
        return Ok(Outcome::ok(json!({ "characters": listed })));
    };
    let k = r.points(
        k.ok_or_else(|| CliError::Config("character needs --K with --candidate".into()))?,
    )?;
    let gens = generators
        .iter()
        .map(|g| r.polynomial(g))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(first) = gens.first() else {
        return Err(CliError::Config(
            "character needs at least one generator".into(),
        ));
    };
    let alg = Arc::clone(first.algebra());
    let q = HullQuery::new(r.point(candidate)?, k.clone(), caps.0, caps.1, budget)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let point = CertifiedPoint::new(hull_membership(&q)?, k)?;
    let phi: Character = match phi {
        Some(name) => r.character(name)?,
        None => enumerate_characters(&alg)?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Config("the algebra has no characters".into()))?,
    };
    let result = if alg.dim() == 1 && phi.functional == [C64::new(1.0, 0.0)] {
        character_from_point(&point, &gens)?
    } else {
        product_character(&point, &phi, &gens)?
    };
    Ok(Outcome::ok(json!({
        "candidate": to_value(&point.point()),
        "phi": to_value(&CharacterDoc::from(&phi)),
        "values": to_value(&result.values),
        "multiplicative_residual": result.multiplicative_residual,
        "bound_excess": result.bound_excess,
        "pairs_checked": result.pairs_checked,
    })))
}

fn report(config: &RunConfig, seed: u64, instances: Option<usize>) -> Result<Outcome, CliError> {
    let reports: Vec<SuiteReport> = SUITES
        .iter()
        .map(|s| s.run(seed, instances, config.tolerances.get(s.name).copied()))
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "instances": r.instances,
                "max_residual": r.max_residual,
                "tolerance": r.tolerance,
                "pass": r.pass,
            })
        })
        .collect();
    Ok(Outcome {
        suite_failed: !pass,
        output: json!({
            "seed": seed,
            "pass": pass,
            "summary": summary,
            "suites": to_value(&reports),
            "fingerprint": to_value(&suites::Fingerprint::current()),
        }),
    })
}
