//! `verify`: the invariant suite at every configured SNR.

use oibc_core::verify::suite::Comparison;
use oibc_core::verify::{run_suite, SuiteConfig};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::{json, num, Table};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub snr_db: f64,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn failed(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}@{}dB", c.name, num(c.snr_db)))
            .collect()
    }
}

pub fn compute(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    let mut checks = Vec::new();
    for &db in &cfg.snr_db {
        let mut s = SuiteConfig::new(cfg.channel_at(db)?);
        s.n_max = cfg.n_max;
        s.rho_points = cfg.rho_points;
        s.seed = cfg.seed;
        s.opts = cfg.opts();
        for r in run_suite(&s)? {
            checks.push(CheckRow {
                snr_db: db,
                name: r.name,
                passed: r.passed,
                measured: r.measured,
                comparison: r.comparison,
                threshold: r.threshold,
            });
        }
    }
    Ok(VerifyReport {
        config: cfg.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

pub fn render(cfg: &RunConfig, report: &VerifyReport) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => json(report),
        Format::Csv => {
            let mut t = Table::new(["snr_db", "check", "passed", "measured", "comparison", "threshold"]);
            for c in &report.checks {
                t.push(vec![
                    num(c.snr_db),
                    c.name.clone(),
                    c.passed.to_string(),
                    num(c.measured),
                    c.comparison.symbol().to_string(),
                    num(c.threshold),
                ]);
            }
            Ok(t.render())
        }
    }
}
