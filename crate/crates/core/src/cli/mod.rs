//! The `loja` command-line front end.

pub mod parse;
pub mod report;
mod run;

pub use run::{run, Args};
