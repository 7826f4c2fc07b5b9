//! File formats and the `eigenframe` command line tool.
//!
//! All JSON written here uses 17 significant digits per number, so every
//! `f64` survives a write/read cycle bit for bit.

pub mod cli;
pub mod format;
