#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartan;
pub mod crossratio;
pub mod error;
pub mod flags;
pub mod json;
pub mod matnum;
pub mod moebius;
pub mod products;
pub mod rank1;
pub mod sample;
pub mod spdspace;
pub mod suite;

pub use error::{Error, Result};
