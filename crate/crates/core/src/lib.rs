pub mod bloch;
pub mod cli;
pub mod error;
pub mod io;
pub mod laser;
pub mod montecarlo;
pub mod numerics;
pub mod oracle;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};
