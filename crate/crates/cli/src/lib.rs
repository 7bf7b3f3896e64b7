//! Batch experiments and the HTTP service around the acquisition loop.

pub mod cli;
pub mod commands;
pub mod render;
pub mod service;

pub use cli::{run, Cli, Command};
