//! File formats and the command line front end for `cocyc-core`.

pub mod cli;
pub mod document;
pub mod dump;
pub mod pbm;
pub mod svg;

pub use document::{compute, document, verify, ResultDocument, RunOptions};
