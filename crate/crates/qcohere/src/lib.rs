//! Coherence and quantum-correlation quantifiers for small finite-dimensional states.

pub mod channels;
pub mod coherence;
pub mod discord;
pub mod error;
pub mod io;
pub mod measure;
pub mod min_measures;
pub mod optim;
pub mod protocols;
pub mod qcore;
pub mod relativistic;
pub mod rng;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use measure::{MeasureResult, Method, Witness};
