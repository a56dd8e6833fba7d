//! `bjnl`: simulate, fit, evaluate and diagnose joint network models.

mod args;
mod commands;
mod metadata;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure of a subcommand with its exit code.
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl From<bjnl::Error> for Failure {
    fn from(e: bjnl::Error) -> Self {
        Failure {
            code: if e.is_numerical() { 2 } else { 1 },
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind: "usage".into(),
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<(), Failure> {
        if let Some(n) = cli.global.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::usage(e.to_string()))?;
        }
        match &cli.command {
            Command::Simulate(a) => commands::simulate(&cli.global, a),
            Command::Fit(a) => commands::fit(&cli.global, a),
            Command::Eval(a) => commands::eval(&cli.global, a),
            Command::Metrics(a) => commands::metrics(&cli.global, a),
            Command::Diagnose(a) => commands::diagnose(&cli.global, a),
        }
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let record = serde_json::json!({
                "error": f.kind,
                "message": f.message,
                "exit_code": f.code,
            });
            eprintln!("{record}");
            ExitCode::from(f.code)
        }
    }
}
