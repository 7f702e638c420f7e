//! Command-line front end: configs, presets, sweeps and verification.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod reference;
pub mod run;
pub mod verify;
