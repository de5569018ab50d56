//! The 2-abelian complexity of the Thue-Morse word.
//!
//! Every fast path in this crate has a brute-force counterpart built on
//! explicit factor enumeration, and the test suites compare the two.

pub mod abelian;
pub mod analysis;
pub mod error;
pub mod factors;
pub mod frames;
pub mod nullspace;
pub mod pairs;
pub mod regularity;
pub mod word;

pub use error::{Error, Result};
pub use word::Word;
