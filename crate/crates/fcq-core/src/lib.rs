//! Exact-arithmetic kernels for Frobenius-constant quantization.
//!
//! The crate is organized around four groups of constructions, all of them
//! exact (no floating point anywhere):
//!
//! * [`scalar`], [`poly`], [`cyclotomic`] — prime fields and sparse
//!   multivariate (Laurent) polynomials over `Z` and `F_p`, with cyclotomic
//!   quotient rings `Z[q]/Φ_n(q)`.
//! * [`complex`], [`steenrod`], [`resolution`], [`tate`] — finite chain
//!   complexes over `F_p` with an order-`p` cyclic action, the chain-level
//!   `p`-th power construction, the periodic resolution with its `ζ` chain
//!   map, and 2-periodic Tate hypercohomology.
//! * [`superalg`], [`cohomops`] — the Frobenius twist `A ↦ A^(1)` on
//!   finite-dimensional super algebras and Hopf algebras, and the total
//!   power / `ħ`-Artin-Schreier operations on polynomial cohomology rings.
//! * [`weyl`], [`coulomb`], [`qtorus`] — normal-form arithmetic in the Weyl
//!   algebra and the quantum torus, the rank-1 quantum Coulomb branches
//!   `A_ħ(r)` and their `K`-theoretic `q`-analogues, together with the
//!   central (Frobenius-constant / root-of-unity) maps and automated
//!   centrality verification.
//!
//! [`checks`] hosts the named verification suite shared by the CLI, the
//! Python bindings and the acceptance tests; [`expr`] the small expression
//! language used by the `compute` front end.

pub mod checks;
pub mod cohomops;
pub mod complex;
pub mod coulomb;
pub mod cyclotomic;
pub mod expr;
pub mod matrix;
pub mod poly;
pub mod qtorus;
pub mod report;
pub mod resolution;
pub mod scalar;
pub mod steenrod;
pub mod superalg;
pub mod tate;
pub mod weyl;

use thiserror::Error;

/// Errors surfaced by fallible operations. Most algebraic kernels are total
/// on their documented domains; anything user-facing (parsers, JSON codecs,
/// CLI-level preconditions) reports through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("expected a positive integer, got {0}")]
    NotPositive(i64),
    #[error("variable sets differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("coefficient rings differ: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("chain maps are not parallel: {0}")]
    NotParallel(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("complex invariant violated: {0}")]
    BadComplex(String),
    #[error("algebra axiom violated: {0}")]
    BadAlgebra(String),
    #[error("basis re-expression failed at n = {n}: {detail}")]
    BasisDivision { n: i64, detail: String },
    #[error("not in the subalgebra: rejected at n = {0}")]
    NotInSubalgebra(i64),
    #[error("unknown generator symbol `{0}`")]
    UnknownSymbol(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
