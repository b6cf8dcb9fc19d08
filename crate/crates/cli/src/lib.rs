//! Library side of the `colortree` command: configuration parsing, built-in
//! families, output formats and the command implementations.

pub mod cli;
pub mod commands;
pub mod config;
pub mod families;
pub mod output;
