//! Exact construction and length measurement of conjugators between
//! unipotent elements of split semisimple Lie groups.

pub mod error;
pub mod harness;
pub mod rational;
pub mod liealg;
pub mod matrix_oracle;
pub mod reduce;
pub mod rootsys;
pub mod unipotent;

pub use error::{Error, Result};
