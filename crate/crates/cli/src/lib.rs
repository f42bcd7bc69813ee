//! File formats, the experiment runner, report tables and the command line
//! front end for [`vqebench_core`].

pub mod config;
pub mod formats;
pub mod records;
pub mod report;
pub mod runner;
pub mod spectrum;
