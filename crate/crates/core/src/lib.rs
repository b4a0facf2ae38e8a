//! Cotangent sums, Gram-determinant sweeps and quantum modular functions
//! attached to odd real characters `chi_D`.
#![no_std]

extern crate alloc;

pub mod cotsum;
pub mod error;
pub mod gram;
pub mod lfun;
pub mod maass;
pub mod numkernel;
pub mod qmf;
pub mod special;
pub mod stepfn;

pub use error::{Error, Result};
pub use numkernel::{Discriminant, PrecisionContext, ReducedFraction};
pub use stepfn::StepTable;
