//! Command-line front end: input files, reports and the replication suite.

pub mod commands;
pub mod files;
pub mod report;
pub mod suite;
