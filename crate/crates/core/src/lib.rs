//! Discrete-time quantum walk of a mobile Ising anyon among pinned anyons.

pub mod braid;
pub mod cyclo;
pub mod error;
pub mod fusion;
pub mod linkinv;
pub mod properstats;
pub mod selfcheck;
pub mod walkdist;

pub use error::{Error, Result};
