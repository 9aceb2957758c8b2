//! Bridge to an external trainer/evaluator process.
//!
//! Each round spawns `sh -c <command>`, writes one JSON request line on its
//! stdin and reads one JSON response line from its stdout:
//!
//! ```text
//! → {"v":1,"round":0,"selected":["a","b"],"candidates":["c"],"dataset_path":"…","state":…}
//! ← {"v":1,"scores":{"c":0.73},"state":…}
//! ```
//!
//! `state` is optional and opaque; whatever the process returns is sent back
//! on the next round, so trainers can fine-tune instead of starting over.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::EvaluatorError;
use crate::scene::{QualityReport, ViewSet};

use super::Evaluator;

#[derive(Serialize)]
struct Request<'a> {
    v: u64,
    round: usize,
    selected: Vec<&'a str>,
    candidates: Vec<&'a str>,
    dataset_path: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<&'a Value>,
}

#[derive(Deserialize)]
struct Response {
    v: u64,
    scores: std::collections::BTreeMap<String, f64>,
    #[serde(default)]
    state: Option<Value>,
}

#[derive(Debug, Clone)]
pub struct ExternalEvaluator {
    command: String,
    timeout: Duration,
    dataset_path: Option<String>,
    state: Option<Value>,
}

impl ExternalEvaluator {
    pub fn new(command: impl Into<String>, timeout: Duration) -> Self {
        ExternalEvaluator {
            command: command.into(),
            timeout,
            dataset_path: None,
            state: None,
        }
    }

    pub fn with_dataset_path(mut self, path: Option<String>) -> Self {
        self.dataset_path = path;
        self
    }

    /// State token returned by the last response, if any.
    pub fn state(&self) -> Option<&Value> {
        self.state.as_ref()
    }

    fn exchange(&self, request: &str) -> Result<String, EvaluatorError> {
        let spawn_err = |reason: String| EvaluatorError::SpawnFailure {
            command: self.command.clone(),
            reason,
        };
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| spawn_err(e.to_string()))?;

        let mut stdin = child.stdin.take().expect("piped");
        // A process that exits without reading its input is not a protocol error by itself.
        let _ = stdin.write_all(request.as_bytes()).and_then(|_| stdin.write_all(b"\n"));
        drop(stdin);

        let stdout = child.stdout.take().expect("piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut line = String::new();
            let res = BufReader::new(stdout).read_line(&mut line).map(|_| line);
            let _ = tx.send(res);
        });

        let outcome = rx.recv_timeout(self.timeout);
        match outcome {
            Ok(Ok(line)) => {
                if child.try_wait().ok().flatten().is_none() {
                    let _ = child.kill();
                }
                let status = child.wait().map_err(|e| spawn_err(e.to_string()))?;
                if line.trim().is_empty() {
                    // The shell reports "not found" and "not executable" as 127 and 126.
                    if matches!(status.code(), Some(126 | 127)) {
                        return Err(spawn_err(format!("shell could not run the command ({status})")));
                    }
                    return Err(EvaluatorError::MalformedResponse(format!(
                        "empty response (process exited with {status})"
                    )));
                }
                Ok(line)
            }
            Ok(Err(e)) => {
                let _ = child.kill();
                let _ = child.wait();
                Err(EvaluatorError::MalformedResponse(format!(
                    "could not read response: {e}"
                )))
            }
            Err(_) => {
                let _ = child.kill();
                let _ = child.wait();
                Err(EvaluatorError::Timeout {
                    timeout_s: self.timeout.as_secs_f64(),
                })
            }
        }
    }
}

impl Evaluator for ExternalEvaluator {
    fn evaluate(&mut self, round: usize, set: &ViewSet) -> Result<QualityReport, EvaluatorError> {
        let candidates = set.candidate_ids();
        let request = Request {
            v: 1,
            round,
            selected: set.selected_ids(),
            candidates: candidates.clone(),
            dataset_path: self.dataset_path.as_deref(),
            state: self.state.as_ref(),
        };
        let request = serde_json::to_string(&request).map_err(|e| EvaluatorError::Failure(e.to_string()))?;
        let line = self.exchange(&request)?;
        let response: Response =
            serde_json::from_str(line.trim()).map_err(|e| EvaluatorError::MalformedResponse(e.to_string()))?;
        if response.v != 1 {
            return Err(EvaluatorError::MalformedResponse(format!(
                "unsupported response version {}",
                response.v
            )));
        }
        let report = QualityReport::new(response.scores);
        report.validate_for(&candidates)?;
        self.state = response.state;
        Ok(report)
    }
}
