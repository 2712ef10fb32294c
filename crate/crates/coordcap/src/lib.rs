//! Command-line front end for `coordcap-core`: flag and config parsing,
//! JSON pmf/channel files and CSV artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use config::{parse_config, Parsed, Settings, DEFAULT_SEED};
pub use error::{CliError, Result};

/// Parses `argv` and runs the command, writing results to `out`.
pub fn main_with<I, T>(argv: I, out: &mut dyn std::io::Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_config(argv)? {
        Parsed::Display(text) => write!(out, "{text}").map_err(|e| CliError::io("stdout", e)),
        Parsed::Run(s) => commands::run(&s, out),
    }
}
