//! Fans trials out over a rayon pool and merges the records in a fixed order.

use std::fmt::Write as _;

use doiforge::harness::{run_trial, suite_trials, TheoremId};
use doiforge::EstimateReport;
use rayon::prelude::*;

use crate::{create_out, thread_cap, write_file, CliError, RunConfig};

pub const REPORTS_FILE: &str = "reports.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Per-record-kind tally; one suite can emit several kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub theorem_id: String,
    pub records: usize,
    pub passed: usize,
    pub max_ratio: f64,
}

impl SuiteSummary {
    pub fn failed(&self) -> usize {
        self.records - self.passed
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<EstimateReport>,
    pub summary: Vec<SuiteSummary>,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }
}

/// Runs every selected trial and returns records in (suite, trial) order.
pub fn execute(cfg: &RunConfig) -> Result<Vec<EstimateReport>, CliError> {
    let jobs: Vec<(TheoremId, u64)> = cfg
        .theorems
        .iter()
        .flat_map(|&id| (0..suite_trials(id, &cfg.options) as u64).map(move |t| (id, t)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    // Indexed collect keeps job order no matter which worker finishes first.
    let chunks: Vec<Vec<EstimateReport>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(id, t)| run_trial(id, &cfg.options, t))
            .collect()
    });
    Ok(chunks.into_iter().flatten().collect())
}

pub fn summarize(reports: &[EstimateReport]) -> Vec<SuiteSummary> {
    let mut out: Vec<SuiteSummary> = Vec::new();
    for r in reports {
        let idx = match out.iter().position(|s| s.theorem_id == r.theorem_id) {
            Some(i) => i,
            None => {
                out.push(SuiteSummary {
                    theorem_id: r.theorem_id.clone(),
                    records: 0,
                    passed: 0,
                    max_ratio: 0.0,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.records += 1;
        s.passed += r.pass as usize;
        // NaN ratios count as the worst case.
        s.max_ratio = if r.ratio.is_nan() {
            f64::INFINITY
        } else {
            s.max_ratio.max(r.ratio)
        };
    }
    out
}

pub fn jsonl(reports: &[EstimateReport]) -> Result<String, CliError> {
    let mut s = String::new();
    for r in reports {
        s.push_str(&serde_json::to_string(r).map_err(|e| CliError::Io(e.to_string()))?);
        s.push('\n');
    }
    Ok(s)
}

pub fn summary_csv(summary: &[SuiteSummary]) -> String {
    let mut s = String::from("theorem_id,records,passed,failed,max_ratio\n");
    for x in summary {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.9e}",
            x.theorem_id,
            x.records,
            x.passed,
            x.failed(),
            x.max_ratio
        );
    }
    s
}

/// Executes the run and writes `reports.jsonl` and `summary.csv` under `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    create_out(&cfg.out)?;
    let reports = execute(cfg)?;
    let summary = summarize(&reports);
    write_file(&cfg.out.join(REPORTS_FILE), jsonl(&reports)?.as_bytes())?;
    write_file(
        &cfg.out.join(SUMMARY_FILE),
        summary_csv(&summary).as_bytes(),
    )?;
    Ok(RunOutcome { reports, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use doiforge::harness::SuiteOptions;
    use doiforge::ConstantSource;

    #[test]
    fn summary_groups_by_record_kind() {
        let a = EstimateReport::new("x", 1.0, 2.0, 1.0, ConstantSource::Exact);
        let b = EstimateReport::new("x", 3.0, 2.0, 1.0, ConstantSource::Exact);
        let c = EstimateReport::new("y", 0.0, 0.0, 1.0, ConstantSource::Exact);
        let s = summarize(&[a, b, c]);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].records, s[0].passed, s[0].failed()), (2, 1, 1));
        assert_eq!(s[0].max_ratio, 1.5);
        assert!(summary_csv(&s).starts_with("theorem_id,records"));
    }

    #[test]
    fn order_does_not_depend_on_scheduling() {
        let cfg = RunConfig {
            theorems: vec![TheoremId::Thm11, TheoremId::Cor12],
            options: SuiteOptions {
                seed: 5,
                trials: Some(6),
                quick: true,
                ..SuiteOptions::default()
            },
            out: std::path::PathBuf::new(),
        };
        let par = execute(&cfg).unwrap();
        let opts = &cfg.options;
        let seq: Vec<_> = cfg
            .theorems
            .iter()
            .flat_map(|&id| (0..6).flat_map(move |t| run_trial(id, opts, t)))
            .collect();
        assert_eq!(par, seq);
    }
}
