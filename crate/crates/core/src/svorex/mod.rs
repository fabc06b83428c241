//! Support vector ordinal regression trained by working-set decomposition,
//! with every projection solved as a nested allocation problem.

mod data;
mod kernel;
mod train;

pub use data::{synthetic, OrdinalDataset};
pub use kernel::{gaussian, KernelMatrix};
pub use train::{
    latent_score, predict, train, train_observed, ProjectionStats, SvorexConfig, SvorexModel, SvorexProblem, TraceEntry, TrainError,
    TrainReport, ViolatingPair, WorkingSet,
};
