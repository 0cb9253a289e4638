pub mod correlation;
pub mod decode;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod io;
pub mod lexical;
pub mod mbr;
pub mod pipeline;
pub mod registry;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
