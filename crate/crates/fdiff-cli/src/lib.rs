//! Library surface of the command-line driver, shared with the
//! integration tests.

pub mod commands;
pub mod config;
pub mod output;
pub mod parse;
pub mod species_io;
