//! Exact arithmetic in towers of algebraic extensions of Q, complex root
//! isolation and certified enclosures.

pub mod interval;
mod isolate;
mod number;
pub mod poly;
mod tower;

pub use isolate::{refinement_cap, set_refinement_cap};
pub use number::{field_op, minimal_polynomial, roots_with_multiplicity, AlgebraicNumber, FieldOp, RootOf};
pub(crate) use number::adjoin_root_near;
pub use tower::{Elem, FieldTower};
