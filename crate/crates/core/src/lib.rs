//! Supercharacter theories of the Sylow `p`-subgroups of the orthogonal groups `B_n`,
//! `D_n` and the symplectic groups `C_n` over `F_p`, built and checked with exact
//! arithmetic.
//!
//! The crate is organised bottom-up: [`field`] (prime field and cyclotomic integers),
//! [`matrix`], [`roots`] (index order, positive roots, rook placements), [`algebra`]
//! (`𝔲`, `U`, the auxiliary groups and actions), [`orbits`] (canonical forms and
//! invariants) and [`superchar`] (characters and full verification).

pub mod algebra;
pub mod error;
pub mod field;
pub mod matrix;
pub mod orbits;
pub mod par;
pub mod roots;
pub mod superchar;

pub use algebra::{DualElement, GroupElement, LieElement, LinearSubspace, MatrixSubgroup, SpringerMap, Sylow};
pub use error::{Error, Result};
pub use field::{eps, CycValue, FieldScalar, PrimeField};
pub use matrix::{FormTag, FormType, Mat};
pub use roots::{Root, RookPlacement, RootSystem};
