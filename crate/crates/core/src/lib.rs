//! Numerical laboratory for the Nyman-Beurling-Baez-Duarte distance.

pub mod cli;
pub mod counterfactual;
pub mod criterion;
pub mod error;
pub mod mollifier;
pub mod residues;
pub mod special;
pub mod zeros;

pub use error::{Error, Result};
