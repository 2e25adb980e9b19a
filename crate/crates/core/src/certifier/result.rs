use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Verdict of one check. Ordered by severity so that `max` gives the overall status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Warn,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn worst<I: IntoIterator<Item = Status>>(it: I) -> Status {
        it.into_iter().max().unwrap_or(Status::Pass)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        };
        f.write_str(s)
    }
}

/// A numeric or textual measurement attached to a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Metric {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Metric {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Metric::Int(v) => Some(*v as f64),
            Metric::Real(v) => Some(*v),
            Metric::Text(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Metric::Int(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<usize> for Metric {
    fn from(v: usize) -> Self {
        Metric::Int(v as i64)
    }
}

impl From<i64> for Metric {
    fn from(v: i64) -> Self {
        Metric::Int(v)
    }
}

impl From<f64> for Metric {
    /// Non-finite values have no JSON number form and are kept as text.
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Metric::Real(v)
        } else {
            Metric::Text(v.to_string())
        }
    }
}

impl From<&str> for Metric {
    fn from(v: &str) -> Self {
        Metric::Text(v.to_string())
    }
}

impl From<String> for Metric {
    fn from(v: String) -> Self {
        Metric::Text(v)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Int(v) => write!(f, "{v}"),
            Metric::Real(v) => write!(f, "{v:.6e}"),
            Metric::Text(s) => f.write_str(s),
        }
    }
}

/// What a failing (or otherwise notable) check points at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two family members by label.
    Pair { first: String, second: String },
    /// A single member and the cut it was examined under.
    Member { label: String, bipartition: String },
    /// A coefficient vector over labeled basis states, with the cut where
    /// the combination is (nearly) product.
    Coefficients { basis: Vec<String>, re: Vec<f64>, im: Vec<f64>, bipartition: String },
    Bipartition { bipartition: String },
    Labels { labels: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Which claim the check backs, e.g. "Theorem 2 (strong nonlocality)".
    pub anchor: String,
    pub status: Status,
    pub metrics: BTreeMap<String, Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Seconds.
    pub elapsed: f64,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Pass,
            metrics: BTreeMap::new(),
            witness: None,
            notes: Vec::new(),
            elapsed: 0.0,
        }
    }

    pub fn metric(&mut self, key: impl Into<String>, value: impl Into<Metric>) -> &mut Self {
        self.metrics.insert(key.into(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Lowers the status to `status` if that is worse than the current one.
    pub fn degrade(&mut self, status: Status) -> &mut Self {
        self.status = self.status.max(status);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Metric> {
        self.metrics.get(key)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(Metric::as_f64)
    }

    pub fn get_i64(&self, key: &str) -> Option<i64> {
        self.get(key).and_then(Metric::as_i64)
    }

    pub(crate) fn finish(mut self, start: Instant) -> Self {
        self.elapsed = start.elapsed().as_secs_f64();
        self
    }
}
