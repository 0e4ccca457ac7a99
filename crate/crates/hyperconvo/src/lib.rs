//! Exact-arithmetic deformations of commutative discrete semigroups into
//! semiconvos and hypergroups.
//!
//! The product of a commutative monoid is deformed on the diagonal of its
//! non-identity idempotents: `δ_n * δ_n` becomes a finitely supported
//! probability measure `q_n` instead of the point mass at `n`, while all
//! other convolutions stay `δ_{m·n}`. For linearly ordered "max" semigroups
//! the admissible deformations are parameterized by weight sequences `v`
//! (equivalently increment sequences `u`), and the resulting structures
//! carry explicit Haar measures, character tables and dual hypergroups —
//! the Dunkl–Ramirez family `q_n(0) = aⁿ/(1−a)` being the motivating
//! one-parameter case.
//!
//! Everything is verified, not assumed: axioms (associativity, identity,
//! involution and support conditions) are checked by exhaustive enumeration
//! over finite windows in exact rational arithmetic, and infinite objects
//! are truncated with exact tail accounting rather than tolerances.
//!
//! Modules:
//!
//! * [`rational`], [`measure`] — exact scalars and finite-support measures
//!   with bilinear convolution extension.
//! * [`semigroup`] — Cayley tables, structural classification (idempotents,
//!   units, ideals), reference examples.
//! * [`deformation`] — v/u parameterization, deformation builders
//!   (max-semigroup, Dunkl–Ramirez, general commutative, Chebyshev), and the
//!   necessary-and-sufficient condition checkers.
//! * [`axioms`] — exhaustive semiconvo/hypergroup verification, Haar
//!   measures and their invariance, the five-way equivalence test, and
//!   extraction of the idempotent sub-hypergroup.
//! * [`duality`] — character tables, dual convolutions by closed form and
//!   by triangular solve with exact tail mass, finite duals, double duals.
//! * [`io`] — JSON schemas for tables, deformation specs and reports.

pub mod axioms;
pub mod deformation;
pub mod duality;
pub mod error;
pub mod io;
pub mod measure;
pub mod rational;
pub mod semigroup;

pub use error::{Error, Result};
pub use measure::{bilinear_extend, FiniteMeasure};
pub use rational::Rational;
pub use semigroup::{classify, SemigroupTable};

/// JSON schema tag carried by every machine-readable document this crate
/// emits or accepts.
pub const SCHEMA: &str = "hyperconvo/1";
