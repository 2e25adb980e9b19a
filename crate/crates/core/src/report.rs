//! Suite selection, the verification report and its renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certifier::{
    verify_biseparability, verify_counts, verify_distillability, verify_ges, verify_orthogonality,
    verify_strong_nonlocality, verify_unextendibility, CertifierConfig, CertifierError, CheckResult, DistillSubspace,
    Status, UnextMode, ANCHOR_BISEPARABILITY, ANCHOR_COUNTS, ANCHOR_DISTILLABILITY, ANCHOR_GES,
    ANCHOR_NONLOCALITY, ANCHOR_ORTHOGONALITY, ANCHOR_UNEXTENDIBILITY,
};
use crate::family::build_ubb;
use crate::family_file::FormatError;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Orthogonality,
    Biseparability,
    Counts,
    Ges,
    Unextendibility,
    Nonlocality,
    Distillability,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Counts,
        Suite::Orthogonality,
        Suite::Biseparability,
        Suite::Ges,
        Suite::Unextendibility,
        Suite::Nonlocality,
        Suite::Distillability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Orthogonality => "orthogonality",
            Suite::Biseparability => "biseparability",
            Suite::Counts => "counts",
            Suite::Ges => "ges",
            Suite::Unextendibility => "unextendibility",
            Suite::Nonlocality => "nonlocality",
            Suite::Distillability => "distillability",
        }
    }

    fn anchor(self) -> &'static str {
        match self {
            Suite::Orthogonality => ANCHOR_ORTHOGONALITY,
            Suite::Biseparability => ANCHOR_BISEPARABILITY,
            Suite::Counts => ANCHOR_COUNTS,
            Suite::Ges => ANCHOR_GES,
            Suite::Unextendibility => ANCHOR_UNEXTENDIBILITY,
            Suite::Nonlocality => ANCHOR_NONLOCALITY,
            Suite::Distillability => ANCHOR_DISTILLABILITY,
        }
    }

    /// Expands `all` and removes duplicates, keeping the canonical order.
    pub fn expand(names: &[String]) -> Result<Vec<Suite>, String> {
        let mut out = Vec::new();
        for n in names {
            if n == "all" {
                out.extend(Suite::ALL);
            } else {
                out.push(n.parse()?);
            }
        }
        out.sort_by_key(|s| Suite::ALL.iter().position(|a| a == s));
        out.dedup();
        Ok(out)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Everything that influenced a run, stored with its results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub certifier: CertifierConfig,
    pub unext_mode: UnextMode,
    pub long_running: bool,
    pub allow_warn: bool,
    pub allow_inconclusive: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            certifier: CertifierConfig::default(),
            unext_mode: UnextMode::Both,
            long_running: false,
            allow_warn: false,
            allow_inconclusive: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub artifact_version: String,
    pub d: usize,
    pub suite: Vec<CheckResult>,
    pub config: RunConfig,
    /// Seconds.
    pub total_elapsed: f64,
}

fn errored(suite: Suite, err: CertifierError) -> CheckResult {
    let mut r = CheckResult::new(suite.name(), suite.anchor());
    match err {
        CertifierError::LongRunningRequired(d) => {
            r.degrade(Status::Inconclusive);
            r.note(format!(
                "not run: the constraint Gram matrix for d = {d} has {} entries; pass --long-running to run it",
                d.pow(12)
            ));
        }
        other => {
            r.degrade(Status::Fail);
            r.note(format!("error: {other}"));
        }
    }
    r
}

fn run_one(d: usize, suite: Suite, config: &RunConfig) -> Vec<CheckResult> {
    let cfg = &config.certifier;
    let res: Result<Vec<CheckResult>, CertifierError> = match suite {
        Suite::Orthogonality => build_ubb::<f64>(d)
            .map_err(CertifierError::from)
            .and_then(|f| verify_orthogonality(&f, cfg.tol_orth))
            .map(|r| vec![r]),
        Suite::Biseparability => build_ubb::<f64>(d)
            .map_err(CertifierError::from)
            .and_then(|f| verify_biseparability(&f, cfg.tol_product))
            .map(|r| vec![r]),
        Suite::Counts => verify_counts(d, cfg).map(|r| vec![r]),
        Suite::Ges => verify_ges(d, cfg).map(|r| vec![r]),
        Suite::Unextendibility => verify_unextendibility(d, config.unext_mode, cfg).map(|r| vec![r]),
        Suite::Nonlocality => verify_strong_nonlocality(d, &[1, 2, 3, 4], config.long_running).map(|r| vec![r]),
        Suite::Distillability => [DistillSubspace::FullComplement, DistillSubspace::PsiPlusSeven]
            .into_iter()
            .map(|s| verify_distillability(d, s, cfg))
            .collect(),
    };
    res.unwrap_or_else(|e| vec![errored(suite, e)])
}

impl VerificationReport {
    /// Runs the configured suites in order.
    pub fn run(d: usize, config: RunConfig) -> Self {
        let start = Instant::now();
        let mut suite = Vec::new();
        for &s in &config.suites {
            suite.extend(run_one(d, s, &config));
        }
        Self {
            artifact_version: ARTIFACT_VERSION.to_string(),
            d,
            suite,
            config,
            total_elapsed: start.elapsed().as_secs_f64(),
        }
    }

    pub fn overall(&self) -> Status {
        Status::worst(self.suite.iter().map(|r| r.status))
    }

    /// Process exit code: 1 on any failure, 4 on an inconclusive check and 5
    /// on a warning unless the corresponding allowance is set, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        let has = |s: Status| self.suite.iter().any(|r| r.status == s);
        if has(Status::Fail) {
            1
        } else if has(Status::Inconclusive) && !self.config.allow_inconclusive {
            4
        } else if has(Status::Warn) && !self.config.allow_warn {
            5
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        fs::write(path, self.to_json()).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        let text =
            fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ubblab {} report, d = {}", self.artifact_version, self.d);
        for r in &self.suite {
            let _ = writeln!(out, "[{}] {}: {} ({:.2} s)", r.status, r.anchor, r.name, r.elapsed);
            for (k, v) in &r.metrics {
                let _ = writeln!(out, "    {k} = {v}");
            }
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "    witness: {}", serde_json::to_string(w).unwrap_or_default());
            }
            for n in &r.notes {
                let _ = writeln!(out, "    note: {n}");
            }
        }
        let _ = writeln!(out, "overall: {} ({:.2} s)", self.overall(), self.total_elapsed);
        out
    }
}
