//! Simulation and measurement toolkit for spatial preferred attachment
//! (SPA) graphs: generation, random geometric snapshots, percolation
//! crossings, push and push&pull rumour spreading, and structural metrics.

pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod percolation;
pub mod rgg;
pub mod rumour;
pub mod rng;
pub mod spa;

pub use error::{Error, Result};
