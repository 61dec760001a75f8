#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod fbm;
pub mod flow;
pub mod fraccalc;
pub mod grid;
pub mod linalg;
pub mod manifold;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use grid::TimeGrid;
