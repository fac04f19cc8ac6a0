//! A small kernel for a dependent type theory with an impredicative
//! universe `Type` below `Type0 : Type1 : Type2`, Pi, Sigma and identity
//! types with J.
//!
//! Pipeline: [`parser`] produces core [`syntax`], [`check`] type checks it
//! using the NbE machine in [`eval`], and [`driver`] runs whole files.

pub mod check;
pub mod diag;
pub mod driver;
pub mod eval;
pub mod parser;
pub mod pretty;
pub mod stdlib;
pub mod syntax;
