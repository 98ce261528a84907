// Writes to stdout ignore errors so a closed pipe (`| head`) ends quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

mod args;
mod checks;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

pub enum Failure {
    /// Bad input: exit status 2.
    Usage(String),
    /// A check ran and failed: exit status 1.
    Check(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(a) => commands::count(a),
        Command::Measure(a) => commands::measure(a),
        Command::Entropy(c) => commands::entropy(c),
        Command::Sample(a) => commands::sample(a),
        Command::Holonomy(c) => commands::holonomy(c),
        Command::Verify(a) => commands::verify(a),
        Command::Witness(a) => commands::witness(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
