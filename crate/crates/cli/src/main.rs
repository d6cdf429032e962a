use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use grcup_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = BufWriter::new(io::stdout());
    let result = run(&cli, &mut out).and_then(|()| out.flush().map_err(CliError::from));
    // rows written before a failure still reach the terminal
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gr-cup: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
