//! Command-line front end for the sensing engine: INI sweep configs,
//! parallel deterministic grid evaluation, CSV/JSON/SVG output and the
//! figure presets.

#![warn(missing_docs)]

pub mod cli;
pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;
