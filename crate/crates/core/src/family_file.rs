//! JSON state-family file: `{format_version, d, states: [{label, role, layer,
//! subset, terms: [{idx, re, im}]}]}`. Terms are written in lexicographic
//! index order and amplitudes as shortest round-trip decimals, so equal
//! families give byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{FamilyError, Member, Role, StateFamily};
use crate::tensor::{Index4, Ket, TensorError};
use crate::C64;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed family file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("state {label}: index {idx:?} out of range for d = {d}")]
    Index { label: String, idx: Index4, d: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub idx: Index4,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub label: String,
    pub role: Role,
    pub layer: Option<usize>,
    pub subset: Option<String>,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub format_version: u32,
    pub d: usize,
    pub states: Vec<StateRecord>,
}

impl FamilyFile {
    pub fn from_family(family: &StateFamily<f64>) -> Self {
        let states = family
            .members()
            .iter()
            .map(|m| StateRecord {
                label: m.label.clone(),
                role: m.role,
                layer: m.layer,
                subset: m.subset.clone(),
                terms: m.ket.terms().map(|(idx, a)| Term { idx: *idx, re: a.re, im: a.im }).collect(),
            })
            .collect();
        Self { format_version: FORMAT_VERSION, d: family.d(), states }
    }

    pub fn to_family(&self) -> Result<StateFamily<f64>, FormatError> {
        if self.format_version != FORMAT_VERSION {
            return Err(FormatError::Version(self.format_version));
        }
        let mut fam = StateFamily::new(self.d);
        for s in &self.states {
            if let Some(t) = s.terms.iter().find(|t| t.idx.iter().any(|&i| i >= self.d)) {
                return Err(FormatError::Index { label: s.label.clone(), idx: t.idx, d: self.d });
            }
            let ket = Ket::from_terms(self.d, s.terms.iter().map(|t| (t.idx, C64::new(t.re, t.im))))?;
            fam.push(Member { label: s.label.clone(), role: s.role, layer: s.layer, subset: s.subset.clone(), ket })?;
        }
        Ok(fam)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("family file serializes");
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_ges_basis, build_ubb};

    #[test]
    fn round_trip_is_exact() {
        for d in [3, 4] {
            let mut fam = build_ubb::<f64>(d).unwrap();
            fam.extend(build_ges_basis::<f64>(d).unwrap()).unwrap();
            let file = FamilyFile::from_family(&fam);
            let text = file.to_json();
            let back = FamilyFile::from_json(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.to_family().unwrap(), fam);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(FamilyFile::from_json("{"), Err(FormatError::Parse(_))));
        let mut file = FamilyFile::from_family(&build_ubb::<f64>(3).unwrap());
        file.states[0].terms[0].idx = [0, 0, 0, 7];
        assert!(matches!(file.to_family(), Err(FormatError::Index { .. })));
        file.format_version = 99;
        assert!(matches!(file.to_family(), Err(FormatError::Version(99))));
    }
}
