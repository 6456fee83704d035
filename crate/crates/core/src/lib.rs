//! Power-sum polynomials between finite-dimensional complex normed spaces and
//! finite-dimensional commutative unital Banach algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`] – norms on `ℂⁿ` and their duals.
//! * [`search`] – seeded, thread-count independent maximisation used by every
//!   optimisation-based norm estimate.
//! * [`algebra`] – algebras given by structure tensors, their norms and characters.
//! * [`poly`] – power sums `Σ λᵢ Tᵢ(x)ⁿ`, symmetric forms, polarization and the
//!   product constructions.
//! * [`norms`] – uniform norms on point clouds, unit-ball norms, operator norms,
//!   nuclear upper bounds and injective tensor norms.
//! * [`tensor`] – rewriting a polynomial as a finite sum `Σ fᵢ ⊗ aᵢ` with scalar
//!   nuclear `fᵢ`.
//! * [`hull`] – falsification search for the nuclear polynomially convex hull and
//!   evaluation characters.
//! * [`schema`] – JSON documents for all of the above.
//! * [`random`] – seeded random instances for property checks.

pub mod algebra;
pub mod combinat;
pub mod error;
pub mod hull;
pub mod norms;
pub mod poly;
pub mod random;
pub mod schema;
pub mod search;
pub mod space;
pub mod tensor;

pub use num_complex::Complex64 as C64;

pub use algebra::{Character, CharacterCheck, FiniteBanachAlgebra};
pub use error::{Error, Result};
pub use hull::{HullCertificate, HullQuery, Verdict};
pub use norms::{BallTarget, CompactSet, Evaluable};
pub use poly::{CMatrix, LinearOperator, PolynomialSum, PowerSumRep, SymmetricForm, Term};
pub use search::{NormEstimate, SearchBudget};
pub use space::{FiniteSpace, NormSpec};
pub use tensor::{IdentityApproximation, TensorElement};
