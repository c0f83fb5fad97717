//! Computational local number theory for cyclotomic Kummer extensions.
//!
//! The library works in fields `F = E(ζ_{p^n})` with `E/Q_p` unramified,
//! provides the group `F^× / (F^×)^{p^m}` with explicit discrete logarithms,
//! computes conductors of Kummer extensions `F(a^{1/p^m})/F` from the norm
//! groups of local class field theory, and checks closed-form conductor
//! formulas against those first-principles values.

pub mod arith;
pub mod conductor;
pub mod dmod;
pub mod error;
pub mod field;
pub mod formulas;
pub mod kummer;
pub mod report;
pub mod zq;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElement, FieldParams};
