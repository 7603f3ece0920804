//! Desk-scale adversarial training on a labeled 2D Gaussian mixture.

pub mod diagnostics;
pub mod mixture;
pub mod mlp;
pub mod train;

pub use diagnostics::{intra_mode_dispersion, mode_coverage, Coverage};
pub use mixture::{oracle_posterior, sample_mixture, LabeledBatch, MixtureSpec, Point};
pub use mlp::{Cache, Gradients, Mlp};
pub use train::{train, train_with_progress, Snapshot, TrainConfig, TrainOutcome, TrainingTrace};
