//! Exact counts of isomorphism classes inside isogeny classes of abelian
//! varieties over finite fields.
//!
//! Every count is assembled from class numbers, fundamental units and
//! `ζ_F(-1)` values that are themselves computed from first principles:
//! reduced binary quadratic forms, continued fractions and Siegel's finite
//! representation sum. All arithmetic is exact.
//!
//! ```
//! use abvar_core::census::census_sqrt_q;
//!
//! let r = census_sqrt_q(13, 1).unwrap();
//! assert_eq!(r.count, 5.into());
//! ```

pub mod cache;
pub mod census;
pub mod cli;
pub mod error;
pub mod exact_arith;
pub mod genus;
pub mod quadratic_forms;
pub mod quaternion;
pub mod real_units;
pub mod record;
pub mod zeta;

pub use error::{Error, Result};
pub use exact_arith::{discriminant_of_field, kronecker_symbol, Discriminant, ExactRational};
