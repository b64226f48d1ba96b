use std::process::ExitCode;

use qneat::cli::{dispatch, parse_config, ParseError};

fn main() -> ExitCode {
    let cfg = match parse_config(std::env::args()) {
        Ok(cfg) => cfg,
        Err(ParseError::Clap(e)) => e.exit(),
        Err(ParseError::Invalid(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let code = dispatch(&cfg, &mut std::io::stdout().lock());
    ExitCode::from(code as u8)
}
