//! Variational workbench for harmonic and anharmonic oscillators.
//!
//! Trial-state energy functionals are evaluated in position space and in the
//! Segal–Bargmann (holomorphic) representation, minimized, and checked
//! against two brute-force reference solvers: a Fock-basis Ritz
//! diagonalization ([`ritz`]) and a finite-difference grid ([`fd`]).
//! Printed closed forms live in [`formulas`]; first-principles moments live
//! in [`moments`] and [`quadrature`].

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fd;
pub mod formulas;
pub mod models;
pub mod moments;
pub mod optimize;
pub mod quadrature;
pub mod report;
pub mod ritz;
pub mod trial;
pub mod validation;

pub use error::{Error, Result};
pub use formulas::FormulaId;
pub use models::{make_model, Couplings, Family, ModelSpec};
pub use num_complex::Complex64;
pub use trial::TrialParams;
