// SPDX-License-Identifier: Apache-2.0

//! Decision procedures and validated numerics for graded base spaces.

pub mod approach;
pub mod cli;
pub mod complete;
pub mod doc;
pub mod error;
pub mod expr;
pub mod funcspace;
pub mod integrate;
pub mod net;
pub mod pointset;
pub mod rational;
pub mod space;
pub mod uspace;

pub use error::{Error, Result};
pub use pointset::PointSet;
