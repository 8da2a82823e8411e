//! Runs a TPTP-compliant prover as a subprocess.

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("empty external prover command")]
    EmptyCommand,
    #[error("could not run {command}: {source}")]
    Spawn { command: String, source: std::io::Error },
    #[error("external prover timed out after {0:?}")]
    Timeout(Duration),
}

/// `command` is split on whitespace (no shell); `{file}` is replaced by the
/// problem path, which is appended when the placeholder is absent. The
/// problem counts as proved when stdout contains `theorem_marker`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalProver {
    pub command: String,
    pub theorem_marker: String,
    pub timeout: Duration,
}

impl ExternalProver {
    pub const DEFAULT_MARKER: &'static str = "SZS status Theorem";

    pub fn new(command: impl Into<String>) -> Self {
        ExternalProver {
            command: command.into(),
            theorem_marker: Self::DEFAULT_MARKER.to_string(),
            timeout: Duration::from_secs(60),
        }
    }

    fn argv(&self, file: &Path) -> Result<Vec<String>, ExternalError> {
        let file = file.display().to_string();
        let mut argv: Vec<String> = self.command.split_whitespace().map(|w| w.replace("{file}", &file)).collect();
        if argv.is_empty() {
            return Err(ExternalError::EmptyCommand);
        }
        if !self.command.contains("{file}") {
            argv.push(file);
        }
        Ok(argv)
    }

    /// Whether the prover reports a theorem for the problem in `file`.
    pub fn proves(&self, file: &Path) -> Result<bool, ExternalError> {
        let argv = self.argv(file)?;
        let spawn_err = |source| ExternalError::Spawn { command: argv.join(" "), source };
        let mut child = Command::new(&argv[0])
            .args(&argv[1..])
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(spawn_err)?;
        // Drain stdout on a thread so a chatty prover cannot block on a full pipe.
        let mut stdout = child.stdout.take().expect("piped");
        let reader = std::thread::spawn(move || {
            let mut out = String::new();
            let _ = std::io::Read::read_to_string(&mut stdout, &mut out);
            out
        });
        let start = Instant::now();
        loop {
            if child.try_wait().map_err(spawn_err)?.is_some() {
                break;
            }
            if start.elapsed() > self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                return Err(ExternalError::Timeout(self.timeout));
            }
            std::thread::sleep(Duration::from_millis(5));
        }
        let out = reader.join().unwrap_or_default();
        Ok(out.contains(&self.theorem_marker))
    }
}
