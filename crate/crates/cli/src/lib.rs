//! Command-line surface of `skewk`: argument parsing, configuration, rendering and the desk
//! grid driver.

pub mod commands;
pub mod config;
pub mod grid;
