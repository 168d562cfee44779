//! Puiseux expansions and ramification indices of plane curves over Q, and
//! the reparametrization exponent of central paths of semidefinite programs.

pub mod algebraic;
pub mod arith;
pub mod curve;
pub mod error;
pub mod puiseux;
pub mod sdo;

pub use error::{Error, Result};

pub(crate) fn serde_rational<S: serde::Serializer>(r: &arith::Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&arith::fmt_rational(r))
}

pub(crate) fn serde_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}
