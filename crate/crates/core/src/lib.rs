pub mod bench;
pub mod cli;
pub mod error;
pub mod mda;
pub mod model;
pub mod oracle;
pub mod rap;
pub mod reductions;
pub mod svorex;

pub use error::{Error, Result};
