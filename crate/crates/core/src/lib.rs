pub mod analysis;
pub mod coins;
pub mod ctwalk;
pub mod error;
pub mod graphs;
pub mod numerics;
pub mod observables;
pub mod walk;

pub use error::{Error, Result};
