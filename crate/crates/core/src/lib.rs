pub mod error;
pub mod exact;
pub mod griffiths;
pub mod model;
pub mod periods;
pub mod selftest;
pub mod series;
pub mod tautsys;
pub mod weyl;

pub use error::{Error, Result};
