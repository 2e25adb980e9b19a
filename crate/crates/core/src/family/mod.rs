//! Labeled state families: the layered biseparable basis, the ψ₊ states
//! it leaves out, and orthonormal bases of its complement.

mod ges;
mod layer;

pub use ges::{
    build_ges_basis, build_ges_basis_thm1, f_norm_sqr_formula, f_states, fallback_ges_basis, g8_overlaps,
    psi_plus_tilde,
};
pub use layer::{
    build_center, build_psi, build_stopper, build_subset, build_ubb, center_point_state, eta, layer_count,
    psi_plus_family, xi, Factor, Sign, SubsetId, U_PAIRS,
};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::tensor::{Ket, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("layer {l} out of range for d = {d} (valid: 1..={max})")]
    LayerOutOfRange { d: usize, l: usize, max: usize },
    #[error("level k = {k}, phase j = {j} out of range for d = {d}")]
    IndexOutOfRange { d: usize, k: usize, j: usize },
    #[error("ψ index {0} out of range (1..=8)")]
    PsiIndexOutOfRange(usize),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    UbbMember,
    StopperState,
    PsiPlus,
    CenterState,
    GesBasis,
    FState,
}

impl Role {
    /// Roles whose members make up the biseparable basis itself.
    pub fn in_ubb(self) -> bool {
        matches!(self, Role::UbbMember | Role::StopperState | Role::CenterState)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Member<T: Real> {
    pub label: String,
    pub role: Role,
    pub layer: Option<usize>,
    pub subset: Option<String>,
    pub ket: Ket<T>,
}

/// Ordered collection of labeled states sharing one local dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFamily<T: Real> {
    d: usize,
    members: Vec<Member<T>>,
    by_label: HashMap<String, usize>,
}

impl<T: Real> StateFamily<T> {
    pub fn new(d: usize) -> Self {
        Self { d, members: Vec::new(), by_label: HashMap::new() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Member<T>] {
        &self.members
    }

    pub fn push(&mut self, member: Member<T>) -> Result<(), FamilyError> {
        if member.ket.d() != self.d {
            return Err(TensorError::DimensionMismatch { left: self.d, right: member.ket.d() }.into());
        }
        if self.by_label.contains_key(&member.label) {
            return Err(FamilyError::DuplicateLabel(member.label));
        }
        self.by_label.insert(member.label.clone(), self.members.len());
        self.members.push(member);
        Ok(())
    }

    pub(crate) fn add(
        &mut self,
        label: impl Into<String>,
        role: Role,
        layer: Option<usize>,
        subset: Option<&str>,
        ket: Ket<T>,
    ) -> Result<(), FamilyError> {
        self.push(Member { label: label.into(), role, layer, subset: subset.map(str::to_owned), ket })
    }

    pub fn extend(&mut self, other: StateFamily<T>) -> Result<(), FamilyError> {
        for m in other.members {
            self.push(m)?;
        }
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&Member<T>> {
        self.by_label.get(label).map(|&i| &self.members[i])
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &Member<T>> {
        self.members.iter().filter(move |m| m.role == role)
    }

    /// Members of the biseparable basis (regular members, center products, stopper).
    pub fn ubb_members(&self) -> impl Iterator<Item = &Member<T>> {
        self.members.iter().filter(|m| m.role.in_ubb())
    }

    pub fn kets(&self) -> Vec<Ket<T>> {
        self.members.iter().map(|m| m.ket.clone()).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.label.as_str()).collect()
    }

    /// Copy keeping only members for which `keep` holds.
    pub fn filtered(&self, keep: impl Fn(&Member<T>) -> bool) -> Self {
        let mut out = Self::new(self.d);
        for m in self.members.iter().filter(|m| keep(m)) {
            out.push(m.clone()).expect("labels already unique");
        }
        out
    }
}
