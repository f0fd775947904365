//! Exact constant terms of products of Laurent polynomials, and the pure
//! constant-coefficient recurrences that annihilate them.
//!
//! The pieces, bottom up:
//!
//! * [`laurent`]: sparse Laurent polynomials over the rationals.
//! * [`expr_parse`]: text to [`LaurentPoly`].
//! * [`groebner`]: Buchberger completion and elimination ideals.
//! * [`operator`] and [`annihilator`]: shift operators, recurrence discovery
//!   by eliminating `x` from `A_i - R_i`, and grid verification.
//! * [`dyson`]: the Dyson product, the multinomial closed form and the
//!   recursive evaluation from Good's proof.
//! * [`certificate`]: JSON spec files and certificates.

pub mod annihilator;
pub mod certificate;
pub mod dyson;
pub mod error;
pub mod expr_parse;
pub mod groebner;
pub mod laurent;
pub mod limits;
pub mod operator;

pub use annihilator::{AnnihilatorSpec, RecurrenceCertificate, VerificationReport};
pub use error::{Error, Result};
pub use laurent::{ExponentVector, LaurentPoly, MultiIndex, Rational};
pub use limits::ResourceLimits;
pub use operator::DiffOperator;
