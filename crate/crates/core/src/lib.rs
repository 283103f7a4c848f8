//! Finite Chu spaces, two-sorted formulas over them, Chu transforms and
//! exhaustive checks of which formulas transforms preserve.

pub mod error;
pub mod formula;
pub mod mask;
pub mod space;

pub use error::{Error, Result};
pub use space::ChuSpace;
pub mod transform;
pub mod preservation;
mod labels;
pub mod topology;
pub mod order;
pub mod graph;
