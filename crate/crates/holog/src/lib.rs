//! A kernel for first-order homotopical logic.
//!
//! The crate parses multi-sorted first-order signatures, formulas, and proof
//! terms, and evaluates them under three semantics: classical (Tarski) truth,
//! proof-relevant finite-set semantics, and a finite-groupoid semantics in
//! which equality is a path space. A shared model contract lets the same
//! formula interpreter and proof evaluator run against either backend, and an
//! invariance checker verifies that homotopy-equivalent structures interpret
//! every formula equivalently.

pub mod formats;
pub mod gen;
pub mod groupoid;
pub mod invariance;
pub mod model;
pub mod proof;
pub mod set_model;
pub mod syntax;
pub mod term_cat;
