//! Active learning of symbolic Mealy automata.
//!
//! The learner keeps an observation table over a finite, growing set of
//! essential characters and generalises the resulting concrete machine into
//! guarded transitions with a partitioning function.

pub mod algebra;
pub mod automata;
pub mod bench;
pub mod cli;
pub mod error;
pub mod learner;
pub mod obstable;
pub mod oracle;
pub mod partition;

pub use error::{Error, Result};
