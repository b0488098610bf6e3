//! Numerical curvature invariants of Riemannian maps and submersions:
//! space-form models, O'Neill tensors, Casorati curvatures and the
//! inequalities relating them.

pub mod casorati;
pub mod catalog;
pub mod curvature;
pub mod diff;
pub mod error;
pub mod extremum;
pub mod framecore;
pub mod models;
pub mod rmaps;
pub mod serde_util;
pub mod spaceforms;
pub mod verify;

pub use error::{Error, Result};
