//! External objective: a command run once per point, reading one line of
//! coordinates on standard input and printing one value on standard output.

use std::io::Write;
use std::process::{Command, Stdio};

use srspd_core::adaptive::Objective;
use srspd_core::{Error, Result};

pub struct ExternalEvaluator {
    program: String,
    args: Vec<String>,
    dim: usize,
}

impl ExternalEvaluator {
    /// `command` is split on whitespace into program and arguments.
    pub fn new(command: &str, dim: usize) -> Result<Self> {
        let mut parts = command.split_whitespace().map(String::from);
        let program = parts.next().ok_or_else(|| Error::Domain("empty evaluator command".into()))?;
        Ok(ExternalEvaluator { program, args: parts.collect(), dim })
    }
}

impl Objective for ExternalEvaluator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Evaluator(format!("cannot start '{}': {e}", self.program)))?;
        let line: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            writeln!(stdin, "{}", line.join(" ")).map_err(|e| Error::Evaluator(e.to_string()))?;
        }
        let out = child.wait_with_output().map_err(|e| Error::Evaluator(e.to_string()))?;
        if !out.status.success() {
            return Err(Error::Evaluator(format!("'{}' exited with {}", self.program, out.status)));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        text.split_whitespace()
            .next()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| Error::Evaluator(format!("'{}' printed no number", self.program)))
    }
}
