//! Command-line runner for the hierarchy simulator: verification, single
//! evolutions, sweeps and figure datasets.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;
