//! Run configuration, read from `key = value` lines (`#` starts a comment).

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::prover::oracle::{MAX_DEGREES, MAX_ENTITIES};
use crate::prover::Budget;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Where the hypothesis's presupposition goes when deciding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisPresupposition {
    /// Conjoined into both goals: `H ∧ p` and `¬H ∧ p`.
    Goal,
    /// Added to the premises.
    Premise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub budget: Budget,
    /// Problems decided at once.
    pub parallelism: usize,
    /// Run the two proof directions on separate threads.
    pub parallel_directions: bool,
    pub external_command: Option<String>,
    pub external_marker: String,
    pub external_timeout: Duration,
    pub oracle_entities: usize,
    pub oracle_degrees: usize,
    pub output_dir: PathBuf,
    pub hypothesis_presupposition: HypothesisPresupposition,
    /// Further parses to try when the top one fails in a later stage.
    pub next_k_parses: usize,
    /// Wall-clock columns in reports; off in the CI profile so reports are reproducible.
    pub report_timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: Budget::default(),
            parallelism: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            parallel_directions: true,
            external_command: None,
            external_marker: crate::prover::external::ExternalProver::DEFAULT_MARKER.to_string(),
            external_timeout: Duration::from_secs(60),
            oracle_entities: 3,
            oracle_degrees: MAX_DEGREES,
            output_dir: PathBuf::from("out"),
            hypothesis_presupposition: HypothesisPresupposition::Goal,
            next_k_parses: 0,
            report_timings: true,
        }
    }
}

/// Clause cap the CI profile uses instead of wall-clock time.
pub const CI_MAX_CLAUSES: usize = 20_000;

impl Config {
    /// Deterministic budget: a clause cap and an effectively unlimited clock.
    pub fn ci() -> Self {
        Config {
            budget: Budget { time: Duration::from_secs(3600), max_clauses: CI_MAX_CLAUSES },
            parallelism: 1,
            report_timings: false,
            ..Config::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        text.parse()
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        fn num<T: FromStr>(value: &str, line: usize) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::Syntax { line, message: format!("bad number `{value}`") })
        }
        fn flag(value: &str, line: usize) -> Result<bool, ConfigError> {
            match value {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(ConfigError::Syntax { line, message: format!("bad boolean `{value}`") }),
            }
        }
        match key {
            "profile" => match value {
                "ci" => *self = Config { output_dir: self.output_dir.clone(), ..Config::ci() },
                "default" => *self = Config { output_dir: self.output_dir.clone(), ..Config::default() },
                _ => return Err(ConfigError::Syntax { line, message: format!("unknown profile `{value}`") }),
            },
            "budget_seconds" => {
                let secs: f64 = num(value, line)?;
                if !(secs > 0.0 && secs.is_finite()) {
                    return Err(ConfigError::Syntax { line, message: "budget must be positive".into() });
                }
                self.budget.time = Duration::from_secs_f64(secs);
            }
            "budget_clauses" => self.budget.max_clauses = num(value, line)?,
            "parallelism" => self.parallelism = num::<usize>(value, line)?.max(1),
            "parallel_directions" => self.parallel_directions = flag(value, line)?,
            "external_command" => self.external_command = Some(value.to_string()).filter(|v| !v.is_empty()),
            "external_marker" => self.external_marker = value.to_string(),
            "external_timeout_seconds" => self.external_timeout = Duration::from_secs_f64(num(value, line)?),
            "oracle_entities" | "oracle_degrees" => {
                let n: usize = num(value, line)?;
                let (max, slot) = if key == "oracle_entities" {
                    (MAX_ENTITIES, &mut self.oracle_entities)
                } else {
                    (MAX_DEGREES, &mut self.oracle_degrees)
                };
                if n == 0 || n > max {
                    return Err(ConfigError::Syntax { line, message: format!("{key} must be in 1..={max}") });
                }
                *slot = n;
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "hypothesis_presupposition" => {
                self.hypothesis_presupposition = match value {
                    "goal" => HypothesisPresupposition::Goal,
                    "premise" => HypothesisPresupposition::Premise,
                    _ => return Err(ConfigError::Syntax { line, message: format!("expected goal or premise, got `{value}`") }),
                }
            }
            "next_k_parses" => self.next_k_parses = num(value, line)?,
            "report_timings" => self.report_timings = flag(value, line)?,
            _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
        }
        Ok(())
    }
}

impl FromStr for Config {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut config = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, message: "expected key = value".into() })?;
            config.set(key.trim(), value.trim(), i + 1)?;
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c: Config = "# run\nbudget_seconds = 2.5\nbudget_clauses=1000 # cap\nparallelism = 3\n\
                         external_command = prover --casc {file}\nhypothesis_presupposition = premise\n"
            .parse()
            .unwrap();
        assert_eq!(c.budget.time, Duration::from_millis(2500));
        assert_eq!(c.budget.max_clauses, 1000);
        assert_eq!(c.parallelism, 3);
        assert_eq!(c.external_command.as_deref(), Some("prover --casc {file}"));
        assert_eq!(c.hypothesis_presupposition, HypothesisPresupposition::Premise);
    }

    #[test]
    fn profile_resets_then_later_keys_apply() {
        let c: Config = "profile = ci\nbudget_clauses = 5".parse().unwrap();
        assert_eq!(c.budget.max_clauses, 5);
        assert_eq!(c.parallelism, 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!("a = 1".parse::<Config>(), Err(ConfigError::UnknownKey { line: 1, .. })));
        assert!(matches!("\nbudget_seconds = x".parse::<Config>(), Err(ConfigError::Syntax { line: 2, .. })));
        assert!(matches!("oracle_entities = 9".parse::<Config>(), Err(ConfigError::Syntax { .. })));
        assert!(matches!("novalue".parse::<Config>(), Err(ConfigError::Syntax { line: 1, .. })));
    }
}
