//! Exactly-reproducible event-driven simulation of the contact process on
//! dynamical scale-free inhomogeneous random graphs, paired with a theory
//! engine that evaluates the phase diagram, survival-strategy conditions,
//! integral bounds and the wait-and-see supermartingale.

pub mod error;
pub mod rng;
pub mod sampling;
pub mod kernel;
pub mod params;
pub mod graph;
pub mod ctmc;
pub mod engine;
pub mod dual;
pub mod strategy;
pub mod theory;
pub mod waitsee;
pub mod acceptance;

pub use error::{Error, Result};
pub use kernel::{KernelKind, KernelSpec};
pub use params::{ModelParams, UpdateRule};
pub use rng::RngPolicy;
