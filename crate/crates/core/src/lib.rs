//! Sign-free path-integral Monte Carlo for Hamiltonians of the form
//! H = H₀(σᶻ) − N·f((1/N)Σσᵢˣ), where the fluctuation term may be non-stoquastic.
//!
//! The fluctuation term is decoupled into an effective transverse field
//! m̃ₓ = f′(mₓ). Two ways of closing the loop are provided:
//!
//! * [`adaptive`]: iterate QMC runs, updating the field from the measured mₓ
//!   until self-consistency.
//! * [`crossing`]: sweep an ordinary transverse-field simulation over a grid
//!   of fields and intersect mₓ(Γ̃) with mₓ = f′⁻¹(Γ̃).
//!
//! [`oracle`] holds exact solvers used to validate both.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod cli;
pub mod crossing;
pub mod error;
pub mod model;
pub mod oracle;
pub mod output;
pub mod parallel;
pub mod pimc;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use model::{ClassicalIsing, FluctuationSpec, NonStoqModel};
pub use pimc::{MCParams, ObservableRecord, PathConfiguration};
pub use stats::Estimate;
