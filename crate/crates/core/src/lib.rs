#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod linalg;
pub mod majorize;
pub mod numerics;
pub mod sample;
pub mod search;
pub mod theorems;

pub use error::{Error, Result};
