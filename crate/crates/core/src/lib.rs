//! Pulse-level simulation of Lipkin-Meshkov-Glick physics encoded in the
//! levels of a single transmon qudit.

pub mod error;
pub mod io;
pub mod linalg;
pub mod lmg;
pub mod semiclassics;
pub mod drive;
pub mod evolve;
pub mod plots;
pub mod protocols;
pub mod runner;
pub mod spin;

pub use error::{Error, Result};
