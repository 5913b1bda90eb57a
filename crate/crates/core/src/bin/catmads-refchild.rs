//! Reference child for the subprocess protocol: evaluates a built-in problem
//! and answers `FAIL` on every k-th request.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use catmads::blackbox::{make_problem, RawOutcome};
use catmads::domain::ProblemFile;
use clap::Parser;

#[derive(Parser)]
#[command(
    name = "catmads-refchild",
    version,
    about = "Reference child process for external blackboxes"
)]
struct Args {
    /// Built-in problem to evaluate.
    #[arg(long)]
    problem: String,

    /// Answer FAIL to requests k, 2k, 3k, ... (0 disables).
    #[arg(long, default_value_t = 0)]
    fail_every: u64,

    /// Append one line per answered request to this file.
    #[arg(long)]
    log: Option<PathBuf>,

    /// Write the problem definition file for the chosen problem and exit.
    #[arg(long)]
    write_spec: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let problem = match make_problem(&args.problem) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("catmads-refchild: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &args.write_spec {
        let file = ProblemFile {
            variables: problem.domain.variables().to_vec(),
            n_constraints: problem.n_constraints(),
            command: None,
        };
        let written = File::create(path)
            .map_err(|e| e.to_string())
            .and_then(|f| serde_json::to_writer_pretty(f, &file).map_err(|e| e.to_string()));
        return match written {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("catmads-refchild: {}: {e}", path.display());
                ExitCode::FAILURE
            }
        };
    }
    let mut log = match &args.log {
        Some(path) => match OpenOptions::new().create(true).append(true).open(path) {
            Ok(f) => Some(f),
            Err(e) => {
                eprintln!("catmads-refchild: {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        },
        None => None,
    };

    let stdin = io::stdin();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut served = 0u64;
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        served += 1;
        let reply = match line.strip_prefix("EVAL ") {
            _ if args.fail_every > 0 && served.is_multiple_of(args.fail_every) => {
                "FAIL".to_string()
            }
            Some(json) => match problem.domain.point_from_json(json.trim()) {
                Ok(point) => match problem.blackbox.evaluate(&problem.domain, &point) {
                    RawOutcome::Ok { f, g } => {
                        let mut s = format!("OK {f}");
                        for v in g {
                            s.push_str(&format!(" {v}"));
                        }
                        s
                    }
                    RawOutcome::Fail => "FAIL".to_string(),
                },
                Err(_) => "FAIL".to_string(),
            },
            None => "FAIL".to_string(),
        };
        if let Some(f) = log.as_mut() {
            let _ = writeln!(f, "{served} {reply}");
        }
        if writeln!(out, "{reply}").and_then(|_| out.flush()).is_err() {
            break;
        }
    }
    ExitCode::SUCCESS
}
