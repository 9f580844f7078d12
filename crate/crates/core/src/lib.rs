//! Finite-level computations for closed subgroups of `GL_r(Z_ℓ)`.
//!
//! Everything lives at a fixed level `N`: matrix groups are enumerated (or,
//! for large groups, stored by their congruence layers), subgroups are index
//! sets, and every count in a report is an exact integer or rational.

pub mod arith;
pub mod cosets;
pub mod covers;
pub mod error;
pub mod group;
pub mod io;
pub mod lattice;
pub mod lie;
pub mod layered;
pub mod matrix;
pub mod modgroup;
pub mod modular_system;
pub mod oracle;
pub mod perm;
pub mod pgl2;
pub mod ramification;
pub mod smith;
pub mod tower;

pub use arith::Rational;
pub use error::{Error, FieldError, Result};
pub use group::{BitSet, FiniteGroup, GroupElement, Subgroup};
pub use layered::LayeredGroup;
pub use matrix::ModMatrix;
pub use modgroup::ModGroup;
pub use perm::Perm;
pub use tower::GroupTower;
