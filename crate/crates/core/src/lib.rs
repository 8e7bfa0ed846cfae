//! Finite-field restriction and Kakeya laboratory.
//!
//! Exact Fourier analysis on `F^n` for finite fields of odd characteristic,
//! the surfaces studied in finite-field restriction theory, certified lower and
//! upper bounds for restriction constants `R*(p -> q)` and Kakeya maximal
//! constants `K(p -> q)`, and the explicit combinatorial constructions
//! (Besicovitch sets, the Heisenberg configuration, slope projections).

pub mod decimal;
pub mod error;
pub mod exponent;
pub mod field;
pub mod grid;
pub mod kakeya;
pub mod polynomial;
pub mod restriction;
pub mod varieties;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use field::{CharacterTable, FieldElement, FieldSpec};
pub use grid::{parseval_defect, Grid, Side};
