//! Best-subset linear regression with robustness, group sparsity, pairwise
//! collinearity, statistical significance, and global multicollinearity
//! constraints imposed a priori, solved by exact branch-and-bound.

pub mod cli;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod mc;
pub mod mip;
pub mod significance;

pub use error::{Error, Result};
