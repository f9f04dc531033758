use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use qsdistill::cli::{run, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    if let Err(msg) = cfg.validate() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }

    let text = match run(&cfg) {
        Ok(out) => out.render(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };

    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: cannot write output: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
