use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Duration;

use qrc::bounds::{BoundCheck, Direction};
use qrc::runtime::ResourceLedger;
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub ebits: u64,
    pub cbits_a_to_b: u64,
    pub cbits_b_to_a: u64,
}

impl From<ResourceLedger> for LedgerRecord {
    fn from(l: ResourceLedger) -> Self {
        LedgerRecord {
            ebits: l.ebits(),
            cbits_a_to_b: l.cbits_a_to_b(),
            cbits_b_to_a: l.cbits_b_to_a(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Machine-readable result of one scenario. Field order is part of the
/// output format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub seed: u64,
    pub trials: u64,
    pub ledger: LedgerRecord,
    pub fidelity_min: Option<f64>,
    pub entropies: BTreeMap<String, f64>,
    pub bound_checks: Vec<CheckRecord>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.bound_checks.iter().all(|c| c.passed) && self.fidelity_min.is_none_or(|f| f >= 1.0 - tolerance)
    }
}

/// Results collected over trials; each named check keeps its worst case.
#[derive(Debug, Clone, Default)]
pub struct Aggregate {
    pub ledger: Option<ResourceLedger>,
    pub fidelity_min: Option<f64>,
    pub entropies: BTreeMap<String, f64>,
    checks: Vec<BoundCheck>,
}

/// Distance from failing; negative when failed.
fn slack(c: &BoundCheck) -> f64 {
    let margin = match c.direction {
        Direction::AtLeast => c.measured - (c.bound - c.tolerance),
        Direction::AtMost => (c.bound + c.tolerance) - c.measured,
        Direction::Equal => c.tolerance - (c.measured - c.bound).abs(),
    };
    if margin.is_nan() {
        f64::NEG_INFINITY
    } else {
        margin
    }
}

impl Aggregate {
    pub fn ledger(&mut self, ledger: ResourceLedger) {
        self.ledger.get_or_insert(ledger);
    }

    pub fn fidelity(&mut self, f: f64) {
        self.fidelity_min = Some(self.fidelity_min.map_or(f, |m| m.min(f)));
    }

    /// Keeps the largest value seen for `name`.
    pub fn entropy(&mut self, name: impl Into<String>, value: f64) {
        let slot = self.entropies.entry(name.into()).or_insert(value);
        *slot = slot.max(value);
    }

    pub fn check(&mut self, c: BoundCheck) {
        match self.checks.iter_mut().find(|k| k.name == c.name) {
            Some(k) => {
                if (k.passed && !c.passed) || (k.passed == c.passed && slack(&c) < slack(k)) {
                    *k = c;
                }
            }
            None => self.checks.push(c),
        }
    }

    pub fn checks(&mut self, cs: impl IntoIterator<Item = BoundCheck>) {
        for c in cs {
            self.check(c);
        }
    }

    pub fn into_report(self, cfg: &RunConfig, elapsed: Duration) -> Report {
        Report {
            name: cfg.scenario.name().to_owned(),
            seed: cfg.seed,
            trials: cfg.trials,
            ledger: self.ledger.map(LedgerRecord::from).unwrap_or_default(),
            fidelity_min: self.fidelity_min,
            entropies: self.entropies,
            bound_checks: self
                .checks
                .into_iter()
                .map(|c| CheckRecord {
                    name: c.name,
                    measured: c.measured,
                    bound: c.bound,
                    passed: c.passed,
                })
                .collect(),
            elapsed_ms: elapsed.as_millis() as u64,
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    kind: &'a str,
    name: &'a str,
    measured: Option<f64>,
    bound: Option<f64>,
    passed: bool,
    elapsed_ms: Option<u64>,
}

pub fn render(report: &Report, format: Format, tolerance: f64, out: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            out.write_all(b"\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for c in &report.bound_checks {
                w.serialize(CsvRow {
                    kind: "check",
                    name: &c.name,
                    measured: Some(c.measured),
                    bound: Some(c.bound),
                    passed: c.passed,
                    elapsed_ms: None,
                })?;
            }
            w.serialize(CsvRow {
                kind: "summary",
                name: &report.name,
                measured: report.fidelity_min,
                bound: report.fidelity_min.map(|_| 1.0 - tolerance),
                passed: report.passed(tolerance),
                elapsed_ms: Some(report.elapsed_ms),
            })?;
            w.flush()
        }
    }
}

/// Writes the report to `--output`, or stdout when none is given.
pub fn write_report(report: &Report, cfg: &RunConfig) -> io::Result<()> {
    match &cfg.output {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            render(report, cfg.format, cfg.tolerance, &mut out)?;
            out.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            render(report, cfg.format, cfg.tolerance, &mut out)?;
            out.flush()
        }
    }
}
