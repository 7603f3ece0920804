//! Loss functions, evaluation metrics and a small mixture-of-Gaussians
//! training lab for class-aware GAN variants.

pub mod error;
pub mod lab;
pub mod losses;
pub mod metrics;
pub mod prob;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
