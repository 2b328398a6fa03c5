use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Runs one JSON job and prints a JSON result.
///
/// The job is read from --job or, without it, from standard input.
/// Exit codes: 0 computed and all checked bounds hold, 1 a check found a
/// violation, 2 invalid input.
#[derive(Parser, Debug)]
#[command(name = "fracdisk", version)]
struct Args {
    /// Job file; standard input when omitted.
    #[arg(long)]
    job: Option<PathBuf>,

    /// CSV destination for `sweep` jobs; the CSV goes to standard output
    /// instead of the JSON summary when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Per-point CSV dump (r, theta, re_functional, abs_w) for `verify` jobs.
    #[arg(long)]
    grid_csv: Option<PathBuf>,

    /// Worker threads for grid evaluation; 0 lets rayon decide.
    #[arg(long, env = "FRACDISK_THREADS", default_value_t = 0)]
    threads: usize,
}

fn input_error(message: String) -> ExitCode {
    let doc = serde_json::json!({"error": {"kind": "io", "message": message}});
    print!("{}", fracdisk::job::render(&doc));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
            return input_error(e.to_string());
        }
    }
    let text = match &args.job {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf).map(|_| buf).map_err(|e| e.to_string())
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };

    let outcome = fracdisk::job::run(&text, args.grid_csv.is_some());
    if let (Some(path), Some(csv)) = (&args.grid_csv, &outcome.grid_csv) {
        if let Err(e) = fs::write(path, csv) {
            return input_error(format!("{}: {e}", path.display()));
        }
    }
    let stdout_text = match (&outcome.sweep_csv, &args.out) {
        (Some(csv), Some(path)) => {
            if let Err(e) = fs::write(path, csv) {
                return input_error(format!("{}: {e}", path.display()));
            }
            &outcome.json
        }
        (Some(csv), None) => csv,
        (None, _) => &outcome.json,
    };
    let mut stdout = io::stdout().lock();
    if stdout.write_all(stdout_text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code as u8)
}
