use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use lovx_cli::commands::OutputFormat;
use lovx_cli::error::EXIT_CONFIG;
use lovx_cli::{run, Cli};

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("LOVX_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("LOVX_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    match run(&cli) {
        Ok(out) => {
            let text = match cli.output {
                OutputFormat::Json => out.report.to_json() + "\n",
                OutputFormat::Tsv => out.report.to_tsv(),
            };
            let mut stdout = io::stdout().lock();
            if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            }
            if out.code != 0 {
                eprintln!("exit status {}", out.code);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
