//! Formal group ring models of equivariant oriented cohomology of smooth
//! toric varieties.
//!
//! The crate builds presentations of the ring of a smooth fan over a
//! truncated formal group law, glues local rings cone by cone, computes
//! pullback and pushforward along star subdivisions, and compares elements
//! with piecewise polynomial and exponential functions on the fan.

pub mod blowup;
pub mod coeff;
pub mod error;
pub mod fan;
pub mod fgl;
pub mod lattice;
pub mod piecewise;
pub mod sample;
pub mod series;
pub mod sr;

pub use coeff::{CoeffElem, ParamSpec};
pub use error::{Error, Result};
pub use fan::{Cone, Fan, Validation};
pub use fgl::{FglVariant, FormalGroupLaw, DEFAULT_TRUNCATION};
pub use series::{FormalHost, Monomial, Series};
pub use sr::{character_class, glue_tuple, Presentation, SRSeries};
pub use blowup::{make_blowup, BlowupContext};
pub use piecewise::{courant_function, to_piecewise, PiecewiseFunc, PiecewiseMode};
