//! Line-oriented subprocess blackbox.
//!
//! Request: `EVAL <point json>\n`. Response: `OK <f> <g_1> ... <g_J>` or
//! `FAIL`. Timeouts, crashes and malformed lines are hidden failures; the
//! child is restarted on the next request.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use crate::domain::{Domain, Point, ProblemFile};
use crate::error::{Error, Result};

use super::history::parse_f64;
use super::{Blackbox, ProblemSpec, RawOutcome};

#[derive(Debug, Clone)]
pub struct ExternalConfig {
    /// Shell command line for the child.
    pub command: String,
    pub n_constraints: usize,
    pub timeout: Duration,
}

impl ExternalConfig {
    pub fn new(command: impl Into<String>, n_constraints: usize) -> Self {
        Self {
            command: command.into(),
            n_constraints,
            timeout: Duration::from_secs(60),
        }
    }
}

struct Session {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Session {
    fn spawn(command: &str) -> Result<Self> {
        let mut child = shell(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::External(format!("cannot start `{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            lines: rx,
        })
    }

    fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn shell(command: &str) -> Command {
    if cfg!(windows) {
        let mut c = Command::new("cmd");
        c.arg("/C").arg(command);
        c
    } else {
        let mut c = Command::new("sh");
        c.arg("-c").arg(command);
        c
    }
}

/// Blackbox backed by a child process speaking the line protocol.
pub struct ExternalBlackbox {
    config: ExternalConfig,
    session: Mutex<Option<Session>>,
}

impl ExternalBlackbox {
    pub fn new(config: ExternalConfig) -> Self {
        Self {
            config,
            session: Mutex::new(None),
        }
    }

    fn request(&self, line: &str) -> Option<String> {
        let mut guard = self.session.lock().unwrap_or_else(|e| e.into_inner());
        if guard.is_none() {
            match Session::spawn(&self.config.command) {
                Ok(s) => *guard = Some(s),
                Err(e) => {
                    log::warn!("{e}");
                    return None;
                }
            }
        }
        let session = guard.as_mut().expect("session present");
        let sent = session
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| session.stdin.flush());
        if sent.is_err() {
            if let Some(s) = guard.take() {
                s.kill();
            }
            return None;
        }
        match session.lines.recv_timeout(self.config.timeout) {
            Ok(resp) => Some(resp),
            Err(RecvTimeoutError::Timeout) => {
                log::warn!("external blackbox timed out; restarting child");
                if let Some(s) = guard.take() {
                    s.kill();
                }
                None
            }
            Err(RecvTimeoutError::Disconnected) => {
                log::warn!("external blackbox exited; restarting child");
                if let Some(s) = guard.take() {
                    s.kill();
                }
                None
            }
        }
    }
}

impl Drop for ExternalBlackbox {
    fn drop(&mut self) {
        if let Some(s) = self
            .session
            .get_mut()
            .unwrap_or_else(|e| e.into_inner())
            .take()
        {
            s.kill();
        }
    }
}

impl Blackbox for ExternalBlackbox {
    fn n_constraints(&self) -> usize {
        self.config.n_constraints
    }

    fn evaluate(&self, domain: &Domain, point: &Point) -> RawOutcome {
        let line = format!("EVAL {}\n", domain.point_to_json(point));
        match self.request(&line) {
            Some(resp) => parse_response(&resp, self.config.n_constraints),
            None => RawOutcome::Fail,
        }
    }
}

/// Builds a subprocess problem from a problem definition file. `command`
/// overrides the file's own `command` entry.
pub fn load_problem_file(
    path: &Path,
    command: Option<&str>,
    timeout: Option<Duration>,
) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let domain = file.domain()?;
    let command = command
        .map(str::to_string)
        .or(file.command)
        .ok_or_else(|| Error::Config(format!("{}: no child command given", path.display())))?;
    let mut config = ExternalConfig::new(command, file.n_constraints);
    if let Some(t) = timeout {
        config.timeout = t;
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "external".to_string());
    Ok(ProblemSpec::new(
        name,
        domain,
        Arc::new(ExternalBlackbox::new(config)),
    ))
}

/// Parses one response line.
pub fn parse_response(line: &str, n_constraints: usize) -> RawOutcome {
    let mut tokens = line.split_whitespace();
    match tokens.next() {
        Some("OK") => {
            let values: Option<Vec<f64>> = tokens.map(parse_f64).collect();
            match values {
                Some(v) if v.len() == n_constraints + 1 => RawOutcome::Ok {
                    f: v[0],
                    g: v[1..].to_vec(),
                },
                _ => RawOutcome::Fail,
            }
        }
        _ => RawOutcome::Fail,
    }
}
