//! Affine and strong blocking sets over finite fields, minimal and
//! trifferent codes, and the bounds and constructions that relate them.

pub mod algebra;
pub mod blocking;
pub mod bounds;
pub mod cli;
pub mod codes;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod io;

pub use error::{Error, Result};
