//! Finite Waldhausen categories as executable objects: colimits, cubes and their
//! southern arrows, multiexact functors, internal hom categories and the
//! S-dot construction.

#![allow(
    clippy::type_complexity,
    clippy::too_many_arguments,
    clippy::needless_range_loop,
    clippy::wrong_self_convention
)]

pub mod category;
pub mod colimit;
pub mod cubes;
pub mod diagcat;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod export;
pub mod finwald;
pub mod homwald;
pub mod index;
pub mod k0;
pub mod limits;
pub mod multiexact;
pub mod pointed;
pub mod sdot;
pub mod suites;
pub mod vect;
pub mod wald;

pub use category::{Category, Cocomplete, Pushout, Waldhausen, ZeroTest};
pub use error::{Error, Result};
pub use limits::Limits;
