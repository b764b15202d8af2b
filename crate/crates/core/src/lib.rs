//! Numerical laboratory for eigenvalue-free thresholds of magnetic
//! Schrödinger operators `(P - A)² + V`.
//!
//! * [`fields`]: magnetic fields, potentials, the Poincaré gauge.
//! * [`asymptotics`]: tail estimators for `β`, `ω₁`, `ω₂`; Kato and
//!   locally uniform `Lᵖ` norms; vanishing diagnostics.
//! * [`threshold`]: the threshold `Λ` and its Pauli, Dirac and
//!   Aharonov–Bohm variants.
//! * [`channels`] and [`eigensolve`]: half-line channel operators and a
//!   Sturm-bisection eigensolver with box-state filtering.
//! * [`virial`]: grid quadratic forms and the virial, Kato, weighted and
//!   IMS identities.

// NaN must fail the guards, and index loops read like the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod channels;
pub mod eigensolve;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod par;
pub mod profiles;
pub mod quadrature;
pub mod threshold;
pub mod virial;

pub use error::{Error, Result};
