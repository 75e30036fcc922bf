//! Quasi-static Griffith crack growth in periodic two-phase laminates under
//! anti-plane shear: finite-element energies, energy release rates, crack
//! evolutions, and homogenized limits with effective toughness.

pub mod error;
pub mod evolution;
pub mod homogenization;
pub mod materials;
pub mod mesh;
pub mod output;
pub mod release;
pub mod solver;

pub use error::{Error, Result};
