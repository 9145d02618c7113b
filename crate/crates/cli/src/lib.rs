//! Library surface of the `apids` command-line tool, exposed for
//! integration tests.

pub mod commands;
pub mod config;
pub mod output;
