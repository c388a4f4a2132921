use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use euclidlab_cli::{run_with_threads, Cli, EXIT_OTHER};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();

    let outcome = match run_with_threads(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("euclidlab: {}", f.message);
            return ExitCode::from(f.code as u8);
        }
    };
    let mut text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    text.push('\n');
    let written = if cli.output == "-" {
        std::io::stdout().lock().write_all(text.as_bytes())
    } else {
        std::fs::write(&cli.output, text)
    };
    if let Err(e) = written {
        eprintln!("euclidlab: writing {}: {e}", cli.output);
        return ExitCode::from(EXIT_OTHER as u8);
    }
    log::info!(
        "{} finished in {} ms",
        outcome.report.command,
        outcome.report.timing_ms
    );
    ExitCode::from(outcome.code as u8)
}
