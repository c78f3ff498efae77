//! The `enriq` command line: argument parsing, object loading, reports and
//! the brute-force oracles used to certify the library.

pub mod cli;
pub mod commands;
pub mod input;
pub mod oracle;
pub mod report;
pub mod workspace;

use std::time::Instant;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;
use enriq_core::Error;
use serde_json::Value;

use report::{render, Rendered, EXIT_OK};

/// Runs one invocation. `argv` includes the program name.
pub fn run<I, S>(argv: I) -> Rendered
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    // the thread count never changes a result, so it is left out of the echo
    let echo: Vec<String> = argv.iter().skip(1).filter(|a| *a != "--serial").cloned().collect();
    let start = Instant::now();
    let parsed = match cli::Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) {
                return Rendered {
                    code: EXIT_OK,
                    text: e.to_string().trim_end().to_string(),
                    digest: String::new(),
                };
            }
            let err = Error::Malformed(e.to_string().trim_end().to_string());
            return render(&echo, &Value::Null, Err(err), start.elapsed());
        }
    };
    let env = commands::Env { exec: parsed.exec.clone() };
    let mut inputs = input::Inputs::default();
    let outcome = commands::execute(&parsed.command, &env, &mut inputs);
    render(&echo, &Value::Object(inputs.values), outcome, start.elapsed())
}
