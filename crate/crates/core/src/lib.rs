pub mod bench;
pub mod compiled;
pub mod equivalence;
pub mod error;
pub mod eval;
pub mod family;
pub mod inconsistency;
pub mod inliner;
pub mod oracle;
pub mod parser;
pub mod program;
pub mod semantics;
pub mod solver;

pub use error::{HexError, Result};
