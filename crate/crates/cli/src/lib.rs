//! Front end for `exemplar`: `run`, `sweep` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 I/O error (including an unreadable config file).

pub mod commands;
pub mod config;
pub mod trace;

use std::ffi::OsString;
use std::io::Write;

use config::{parse_config, Command, ConfigError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Parses `argv` (program name first) and dispatches.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_config(argv) {
        Ok(Ok(c)) => c,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                ConfigError::File { .. } => EXIT_IO,
                _ => EXIT_CONFIG,
            };
        }
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
                return EXIT_OK;
            }
            let _ = write!(err, "{rendered}");
            return EXIT_CONFIG;
        }
    };
    match config.command {
        Command::Run => commands::cmd_run(&config, out, err),
        Command::Sweep => commands::cmd_sweep(&config, out, err),
        Command::Verify => commands::cmd_verify(&config, out, err),
    }
}
