//! Configuration files, initial data and snapshot persistence.

pub mod config;
pub mod initial;
pub mod snapshot;
