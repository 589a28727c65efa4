//! Shapes of rings of integers of cubic fields via binary cubic forms.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod arith;
pub mod brute;
pub mod embed;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod fields;
pub mod form;
pub mod haar;
pub mod io;
pub mod local;
pub mod roots;
pub mod section;
pub mod shape;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
