#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod conformal;
pub mod eigen;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod initial_data;
pub mod jet;
pub mod linalg;
pub mod linear;
pub mod scenarios;
pub mod stability;
pub mod submanifold;

pub use error::{GeometryError, Result};
