// SPDX-License-Identifier: Apache-2.0

pub mod binform;
pub mod conjscan;
pub mod error;
pub mod exactla;
pub mod fatpoints;
pub mod field;
pub mod lattice;
pub mod param;
pub mod planeform;
pub mod splitting;

pub use error::{Error, Result};
pub use field::{PrimeField, DEFAULT_PRIME};
