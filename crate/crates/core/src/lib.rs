//! Small-cancellation toolkit: pieces and `C'(lambda)` / `C'(1/f)` checks,
//! Dehn's algorithm, Morse-type intersection functions, the IPSC property,
//! the Morse-element construction and discrete hyperbolic geometry.

pub mod base;
pub mod cli;
pub mod construct;
pub mod error;
pub mod funcspec;
pub mod hypgeo;
pub mod ipsc;
pub mod morse;
pub mod pieces;
pub mod rational;
pub mod suffix;
pub mod text;
pub mod words;
pub mod wordproblem;

pub use error::{Error, Result};
pub use funcspec::FunctionSpec;
pub use words::{Alphabet, CyclicWord, Letter, Presentation, Word};
