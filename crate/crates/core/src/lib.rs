//! Two-mode bosonic states on truncated Fock spaces and the su(2)/su(1,1)
//! separability witnesses obtained from uncertainty relations under partial
//! transposition, plus a simulation of the beamsplitter measurement scheme
//! that estimates every quantity the witnesses need.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod catalog;
pub mod criteria;
pub mod error;
pub mod fock;
pub mod measurement;
pub mod report;
pub mod transforms;

pub use error::{Error, Result};
