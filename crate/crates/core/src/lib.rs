//! Construction and numerical certification of quasi-minimal surfaces with
//! positive relative nullity in the pseudo-Euclidean space E^4_2 and the
//! pseudo-sphere S^4_2.

pub mod cli;
pub mod config;
pub mod error;
pub mod families;
pub mod immersion;
pub mod linalg;
pub mod numerics;
pub mod space_forms;
pub mod verify;

pub use error::{Condition, Error, Result};
