//! Versioned JSON campaign report and its human-readable summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "tensorword-report/1";
const MAX_LISTED_FAILURES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Pass,
    Fail,
    /// A trial hit a numerical failure and nothing failed outright.
    Error,
    Skipped,
    /// Experimental cell; reported but not asserted.
    Informational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NumericalFailure,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::NumericalFailure => 3,
        }
    }
}

/// What one trial contributes to its cell.
#[derive(Debug, Clone, Default)]
pub struct TrialOutcome {
    pub passed: bool,
    pub error: Option<String>,
    /// Checked quantity divided by its scale; the pass threshold is `-tol`.
    pub margin: Option<f64>,
    pub lambda_min: Option<f64>,
    pub residual: Option<f64>,
    /// Named failure or skip reasons, tallied per cell.
    pub tags: Vec<&'static str>,
    /// Named quantities whose largest value is kept.
    pub maxima: Vec<(&'static str, f64)>,
}

impl TrialOutcome {
    pub fn failed_with(error: impl ToString) -> Self {
        Self {
            error: Some(error.to_string()),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub label: String,
    pub params: BTreeMap<&'static str, Value>,
    pub status: CellStatus,
    pub asserted: bool,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub errors: u64,
    pub worst_margin: Option<f64>,
    pub worst_lambda_min: Option<f64>,
    pub worst_residual: Option<f64>,
    pub tallies: BTreeMap<&'static str, u64>,
    pub maxima: BTreeMap<&'static str, f64>,
    /// First few failing trial indices.
    pub failing_trials: Vec<u64>,
    pub first_error: Option<String>,
    pub notice: Option<String>,
    pub wall_time_ms: u64,
}

fn keep_min(slot: &mut Option<f64>, v: Option<f64>) {
    if let Some(v) = v {
        *slot = Some(slot.map_or(v, |s| s.min(v)));
    }
}

fn keep_max(slot: &mut Option<f64>, v: Option<f64>) {
    if let Some(v) = v {
        *slot = Some(slot.map_or(v, |s| s.max(v)));
    }
}

impl Cell {
    pub fn new(label: impl Into<String>, params: BTreeMap<&'static str, Value>) -> Self {
        Self {
            label: label.into(),
            params,
            status: CellStatus::Pass,
            asserted: true,
            trials: 0,
            passed: 0,
            failed: 0,
            errors: 0,
            worst_margin: None,
            worst_lambda_min: None,
            worst_residual: None,
            tallies: BTreeMap::new(),
            maxima: BTreeMap::new(),
            failing_trials: Vec::new(),
            first_error: None,
            notice: None,
            wall_time_ms: 0,
        }
    }

    pub fn skipped(label: impl Into<String>, params: BTreeMap<&'static str, Value>, notice: String) -> Self {
        let mut cell = Self::new(label, params);
        cell.status = CellStatus::Skipped;
        cell.notice = Some(notice);
        cell
    }

    pub fn record(&mut self, trial: u64, outcome: TrialOutcome) {
        self.trials += 1;
        if let Some(e) = outcome.error {
            self.errors += 1;
            self.first_error.get_or_insert(e);
            if self.failing_trials.len() < MAX_LISTED_FAILURES {
                self.failing_trials.push(trial);
            }
        } else if outcome.passed {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failing_trials.len() < MAX_LISTED_FAILURES {
                self.failing_trials.push(trial);
            }
        }
        keep_min(&mut self.worst_margin, outcome.margin);
        keep_min(&mut self.worst_lambda_min, outcome.lambda_min);
        keep_max(&mut self.worst_residual, outcome.residual);
        for tag in outcome.tags {
            *self.tallies.entry(tag).or_default() += 1;
        }
        for (name, v) in outcome.maxima {
            let slot = self.maxima.entry(name).or_insert(v);
            *slot = slot.max(v);
        }
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_time_ms = elapsed.as_millis() as u64;
        if self.status == CellStatus::Skipped {
            return;
        }
        self.status = if !self.asserted {
            CellStatus::Informational
        } else if self.failed > 0 {
            CellStatus::Fail
        } else if self.errors > 0 {
            CellStatus::Error
        } else {
            CellStatus::Pass
        };
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub cells: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub skipped: usize,
    pub informational: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: String,
    pub config: Value,
    pub cells: Vec<Cell>,
    pub summary: Summary,
    pub verdict: Verdict,
    pub wall_time_ms: u64,
}

impl Report {
    /// Violations outrank numerical failures: a found counterexample is the
    /// more important signal.
    pub fn new(command: &str, config: Value, cells: Vec<Cell>, elapsed: Duration) -> Self {
        let mut summary = Summary {
            cells: cells.len(),
            ..Summary::default()
        };
        for c in &cells {
            match c.status {
                CellStatus::Pass => summary.passed += 1,
                CellStatus::Fail => summary.failed += 1,
                CellStatus::Error => summary.errors += 1,
                CellStatus::Skipped => summary.skipped += 1,
                CellStatus::Informational => summary.informational += 1,
            }
        }
        let verdict = if summary.failed > 0 {
            Verdict::Fail
        } else if summary.errors > 0 {
            Verdict::NumericalFailure
        } else {
            Verdict::Pass
        };
        Self {
            schema: SCHEMA,
            tool: Tool {
                name: "tensorword",
                version: env!("CARGO_PKG_VERSION"),
            },
            command: command.to_string(),
            config,
            cells,
            summary,
            verdict,
            wall_time_ms: elapsed.as_millis() as u64,
        }
    }

    pub fn human_summary(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            let status = match c.status {
                CellStatus::Pass => "PASS",
                CellStatus::Fail => "FAIL",
                CellStatus::Error => "ERROR",
                CellStatus::Skipped => "SKIP",
                CellStatus::Informational => "INFO",
            };
            let _ = write!(out, "{status:<5} {:<32} {}/{}", c.label, c.passed, c.trials);
            if let Some(v) = c.worst_margin {
                let _ = write!(out, "  worst margin {v:.3e}");
            }
            if let Some(v) = c.worst_residual {
                let _ = write!(out, "  worst residual {v:.3e}");
            }
            if let Some(n) = &c.notice {
                let _ = write!(out, "  ({n})");
            }
            if let Some(e) = &c.first_error {
                let _ = write!(out, "  error: {e}");
            }
            out.push('\n');
        }
        let s = &self.summary;
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NumericalFailure => "numerical failure",
        };
        let _ = writeln!(
            out,
            "verdict: {verdict} ({} cells: {} passed, {} failed, {} errors, {} skipped, {} informational)",
            s.cells, s.passed, s.failed, s.errors, s.skipped, s.informational
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(passed: bool) -> TrialOutcome {
        TrialOutcome {
            passed,
            margin: Some(if passed { 0.5 } else { -1.0 }),
            ..TrialOutcome::default()
        }
    }

    #[test]
    fn cell_aggregation() {
        let mut c = Cell::new("x", BTreeMap::new());
        c.record(0, outcome(true));
        c.record(1, outcome(false));
        c.record(2, TrialOutcome::failed_with("boom"));
        c.finish(Duration::ZERO);
        assert_eq!((c.trials, c.passed, c.failed, c.errors), (3, 1, 1, 1));
        assert_eq!(c.worst_margin, Some(-1.0));
        assert_eq!(c.failing_trials, vec![1, 2]);
        assert_eq!(c.status, CellStatus::Fail);
    }

    #[test]
    fn verdict_ignores_skipped_and_informational() {
        let mut pass = Cell::new("a", BTreeMap::new());
        pass.record(0, outcome(true));
        pass.finish(Duration::ZERO);
        let mut skip = Cell::skipped("b", BTreeMap::new(), "too big".into());
        skip.finish(Duration::ZERO);
        let mut info = Cell::new("c", BTreeMap::new());
        info.asserted = false;
        info.record(0, outcome(false));
        info.finish(Duration::ZERO);
        let r = Report::new("t", Value::Null, vec![pass.clone(), skip, info], Duration::ZERO);
        assert_eq!(r.verdict, Verdict::Pass);

        let mut err = Cell::new("d", BTreeMap::new());
        err.record(0, TrialOutcome::failed_with("nan"));
        err.finish(Duration::ZERO);
        let r = Report::new("t", Value::Null, vec![pass, err], Duration::ZERO);
        assert_eq!(r.verdict, Verdict::NumericalFailure);
        assert_eq!(r.verdict.exit_code(), 3);
    }
}
