//! Plumbing for the `coxtop` binary: config loading, suite execution with
//! wall-clock budgets, and the JSON report format.
//!
//! The report schema is versioned (`coxtop-report/1`) and contains no
//! timestamps or timings, so two runs with the same configuration and seed
//! produce byte-identical files.  Timing goes to stderr only.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use coxtop_core::coxeter::{CoxeterMatrix, CoxeterSystem};
use coxtop_core::verify::{self, Report, RunConfig, Suite, Verdict};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "coxtop-report/1";

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments: exit code 2.
    Config(String),
    /// The run itself failed to start (e.g. a malformed matrix): exit 2.
    Run(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Run(m) => write!(f, "run error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Read and resolve a config file.  `system` may name a preset or a file in
/// the matrix text format; relative matrix paths are tried as given, then
/// relative to the config file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw = verify::RawConfig::parse(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let system = raw.system.clone().unwrap_or_else(|| "A2".to_string());
    let matrix = match CoxeterMatrix::preset(&system) {
        Some(m) => m,
        None => {
            let direct = Path::new(&system);
            let resolved = if direct.exists() {
                direct.to_path_buf()
            } else {
                path.parent().unwrap_or(Path::new(".")).join(&system)
            };
            let mtext = fs::read_to_string(&resolved).map_err(|e| {
                CliError::Config(format!(
                    "system `{system}` is not a preset and {} is unreadable: {e}",
                    resolved.display()
                ))
            })?;
            CoxeterMatrix::parse(&mtext).map_err(|e| CliError::Config(e.to_string()))?
        }
    };
    raw.resolve(matrix).map_err(|e| CliError::Config(e.to_string()))
}

/// Run all configured suites, enforcing the per-suite time budget and
/// writing per-suite timing to stderr.
pub fn execute(cfg: &RunConfig, quiet: bool) -> Result<Report, CliError> {
    let sys = CoxeterSystem::build(cfg.matrix.clone()).map_err(|e| CliError::Run(e.to_string()))?;
    let limit = Duration::from_secs(cfg.budgets.time_budget_secs);
    let mut suites = Vec::new();
    for &suite in &cfg.suites {
        let start = Instant::now();
        let mut keep = || start.elapsed() < limit;
        let sr = verify::run_suite(&sys, suite, &cfg.budgets, cfg.seed, &mut keep);
        if !quiet {
            let (p, f, u) = sr.counts();
            eprintln!(
                "suite {:<18} {:>4} pass {:>3} fail {:>3} unknown  ({:.1}s)",
                suite.name(),
                p,
                f,
                u,
                start.elapsed().as_secs_f64()
            );
        }
        suites.push(sr);
    }
    Ok(Report {
        system: cfg.system.clone(),
        seed: cfg.seed,
        budgets: cfg.budgets.clone(),
        suites,
    })
}

// --- serialized form -------------------------------------------------------

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ReportDoc {
    pub schema: String,
    pub tool_version: String,
    pub system: String,
    pub seed: u64,
    pub budgets: BudgetsDoc,
    pub summary: CountsDoc,
    pub suites: Vec<SuiteDoc>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct BudgetsDoc {
    pub max_braid_len: usize,
    pub max_letters: usize,
    pub max_objects: usize,
    pub max_morphisms: usize,
    pub time_budget_secs: u64,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CountsDoc {
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SuiteDoc {
    pub suite: String,
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
    pub instances: Vec<InstanceDoc>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct InstanceDoc {
    pub id: String,
    pub verdict: String,
    pub detail: String,
}

pub fn to_doc(report: &Report) -> ReportDoc {
    let (pass, fail, unknown) = report.total_counts();
    ReportDoc {
        schema: SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        system: report.system.clone(),
        seed: report.seed,
        budgets: BudgetsDoc {
            max_braid_len: report.budgets.max_braid_len,
            max_letters: report.budgets.max_letters,
            max_objects: report.budgets.max_objects,
            max_morphisms: report.budgets.max_morphisms,
            time_budget_secs: report.budgets.time_budget_secs,
        },
        summary: CountsDoc { pass, fail, unknown },
        suites: report
            .suites
            .iter()
            .map(|s| {
                let (p, f, u) = s.counts();
                SuiteDoc {
                    suite: s.suite.name().to_string(),
                    pass: p,
                    fail: f,
                    unknown: u,
                    instances: s
                        .instances
                        .iter()
                        .map(|i| InstanceDoc {
                            id: i.id.clone(),
                            verdict: i.verdict.name().to_string(),
                            detail: i.detail.clone(),
                        })
                        .collect(),
                }
            })
            .collect(),
    }
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(report)).expect("report serializes");
    s.push('\n');
    s
}

/// Human summary printed to stderr after a run.  Returns the exit code.
pub fn summarize(report: &Report) -> i32 {
    let (pass, fail, unknown) = report.total_counts();
    eprintln!("total: {pass} pass, {fail} fail, {unknown} unknown");
    let downgraded = report.downgraded_count();
    if downgraded > 0 {
        eprintln!(
            "NOTE: {downgraded} instance(s) were verified at homology level only \
             (z-acyclic); contractibility remains unproven there"
        );
    }
    if fail == 0 {
        0
    } else {
        1
    }
}

pub fn load_report(path: &Path) -> Result<ReportDoc, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let doc: ReportDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: not a report file: {e}", path.display())))?;
    if doc.schema != SCHEMA {
        return Err(CliError::Config(format!(
            "unsupported report schema {} (expected {SCHEMA})",
            doc.schema
        )));
    }
    Ok(doc)
}

/// Look up an instance by id, or by `suite/id` when ids repeat across
/// suites.
pub fn explain(doc: &ReportDoc, id: &str) -> Option<String> {
    let (want_suite, want_id) = match id.split_once('/') {
        Some((s, rest)) if doc.suites.iter().any(|x| x.suite == s) => (Some(s), rest),
        _ => (None, id),
    };
    for suite in &doc.suites {
        if let Some(ws) = want_suite {
            if suite.suite != ws {
                continue;
            }
        }
        for inst in &suite.instances {
            if inst.id == want_id || inst.id == id {
                return Some(format!(
                    "suite:   {}\nid:      {}\nverdict: {}\ndetail:  {}",
                    suite.suite, inst.id, inst.verdict, inst.detail
                ));
            }
        }
    }
    None
}

pub fn presets_text() -> String {
    let mut out = String::new();
    for name in CoxeterMatrix::preset_names() {
        let m = CoxeterMatrix::preset(name).expect("listed preset exists");
        let b = verify::Budgets::defaults_for(name);
        out.push_str(&format!(
            "{name}  (default max-braid-len {})\n{}\n",
            b.max_braid_len,
            m.render()
        ));
    }
    out
}

/// True when every configured suite name is valid; used by tests.
pub fn suite_names() -> Vec<&'static str> {
    verify::ALL_SUITES.iter().map(|s| s.name()).collect()
}

pub fn verdict_name(v: Verdict) -> &'static str {
    v.name()
}

pub fn all_suites() -> [Suite; 11] {
    verify::ALL_SUITES
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().expect("tmp");
        f.write_all(content.as_bytes()).expect("write");
        f
    }

    #[test]
    fn config_with_preset_loads() {
        let f = write_tmp("system A2\nsuites deletion-property\nmax-braid-len 3\n");
        let cfg = load_config(f.path()).unwrap();
        assert_eq!(cfg.system, "A2");
        assert_eq!(cfg.suites, vec![Suite::DeletionProperty]);
        assert_eq!(cfg.budgets.max_braid_len, 3);
    }

    #[test]
    fn config_with_matrix_file_loads() {
        let dir = tempfile::tempdir().expect("dir");
        let mpath = dir.path().join("b3.cox");
        fs::write(&mpath, "coxeter 3\n3 2\n4\n").expect("matrix");
        let cpath = dir.path().join("run.conf");
        fs::write(&cpath, "system b3.cox\nsuites coxeter-axioms\nmax-braid-len 3\n")
            .expect("conf");
        let cfg = load_config(&cpath).unwrap();
        assert_eq!(cfg.matrix.rank(), 3);
        assert_eq!(cfg.matrix.get(1, 2), 4);
        // unknown labels fall back to conservative budgets unless overridden
        assert_eq!(cfg.budgets.max_braid_len, 3);
    }

    #[test]
    fn bad_config_is_reported() {
        let f = write_tmp("nonsense 1\n");
        assert!(matches!(load_config(f.path()), Err(CliError::Config(_))));
        let g = write_tmp("system NotAPresetOrFile\n");
        assert!(matches!(load_config(g.path()), Err(CliError::Config(_))));
    }

    #[test]
    fn run_and_json_round_trip() {
        let f = write_tmp("system A2\nsuites deletion-property\nmax-braid-len 3\nseed 9\n");
        let cfg = load_config(f.path()).unwrap();
        let report = execute(&cfg, true).unwrap();
        let json = report_json(&report);
        let doc: ReportDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(doc.schema, SCHEMA);
        assert_eq!(doc.seed, 9);
        assert_eq!(doc.summary.fail, 0);
        assert!(doc.suites[0].instances.iter().any(|i| i.id == "len2"));
        let msg = explain(&doc, "len2").unwrap();
        assert!(msg.contains("deletion-property"));
        let msg2 = explain(&doc, "deletion-property/len2").unwrap();
        assert!(msg2.contains("verdict: pass"));
        assert!(explain(&doc, "missing-id").is_none());
    }

    #[test]
    fn json_is_deterministic() {
        let f = write_tmp("system A2\nsuites braid-kernel\nmax-braid-len 2\nseed 3\n");
        let cfg = load_config(f.path()).unwrap();
        let a = report_json(&execute(&cfg, true).unwrap());
        let b = report_json(&execute(&cfg, true).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn presets_include_defaults() {
        let text = presets_text();
        for name in CoxeterMatrix::preset_names() {
            assert!(text.contains(name));
        }
        assert!(text.contains("coxeter 2"));
    }
}
