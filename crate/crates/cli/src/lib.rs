//! Command-line front end: model files, bound reports, sweeps and
//! interaction searches.

pub mod commands;
pub mod report;
pub mod schema;
