//! Direct-sum codes over splittable walk collections and their weak-regularity decoder.

pub mod config;
pub mod decoder;
pub mod direct_sum;
pub mod error;
pub mod gf2;
pub mod io;
pub mod pipeline;
pub mod regularity;
pub mod spectral;
pub mod walks;

pub use error::{Error, Result};
