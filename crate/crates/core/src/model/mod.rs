//! Problem data, validation and evaluation.

mod instance;
pub mod io;
mod objective;

pub use instance::{
    check_feasibility, derive_penalty_m, validate, Allocation, ContinuousMethod, FeasibilityReport, Mode,
    NestedInstance, SolveStats, SolverConfig, TieBreak,
};
pub(crate) use instance::Neumaier;
pub use objective::{evaluate, CustomObjective, Family, ObjectiveSpec};
