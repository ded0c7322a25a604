//! Strongly synchronizing transducers over a finite alphabet, the monoids
//! they form under composition, and their action on the full shift.

pub mod annotate;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod minimize;
pub mod monoid;
pub mod synchro;
pub mod transducer;
pub mod words;

pub use error::{Error, Result};
