use nalgebra::DMatrix;

use super::{Bipartition, Ket, PartySet, TensorError};
use crate::linalg::singular_values;
use crate::scalar::{zero, Real, C};

/// A state is product across a cut iff `σ₂/σ₁` is at most this.
pub const PRODUCT_TOL: f64 = 1e-10;

/// Flat index of the sub-tuple of `idx` on `slots`, first slot most significant.
#[inline]
pub(crate) fn group_index(idx: &[usize; 4], slots: &[usize], d: usize) -> usize {
    slots.iter().fold(0, |acc, &s| acc * d + idx[s])
}

/// Reshape `k` into a `d^|rows| × d^|rest|` matrix. `rows` may be empty or
/// all four parties (giving a row or column vector).
pub fn matricize_parties<T: Real>(k: &Ket<T>, rows: PartySet) -> DMatrix<C<T>> {
    let d = k.d();
    let rs = rows.slots();
    let cs = rows.complement().slots();
    let mut m = DMatrix::from_element(rows.dim(d), rows.complement().dim(d), zero());
    for (idx, amp) in k.terms() {
        m[(group_index(idx, &rs, d), group_index(idx, &cs, d))] = *amp;
    }
    m
}

/// Coefficient matrix X of `k` across `bp`: rows indexed by group A,
/// columns by group B.
pub fn matricize<T: Real>(k: &Ket<T>, bp: Bipartition) -> DMatrix<C<T>> {
    matricize_parties(k, bp.group_a())
}

/// Singular values of the matricization, descending.
pub fn schmidt_values<T: Real>(k: &Ket<T>, bp: Bipartition) -> Result<Vec<T>, TensorError> {
    if k.is_zero() {
        return Err(TensorError::ZeroState);
    }
    Ok(singular_values(&matricize(k, bp))?)
}

/// `σ₂ ≤ tol · σ₁` across `bp`.
pub fn is_product_across<T: Real>(k: &Ket<T>, bp: Bipartition, tol: f64) -> Result<bool, TensorError> {
    let s = schmidt_values(k, bp)?;
    let s2 = s.get(1).copied().unwrap_or_else(T::zero);
    Ok(s2 <= T::lit(tol) * s[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::tensor::tensor4;

    #[test]
    fn basis_state_gives_elementary_matrix() {
        let k = Ket::<f64>::basis(3, [0; 4]).unwrap();
        let m = matricize(&k, "1|234".parse().unwrap());
        assert_eq!(m.shape(), (3, 27));
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
        assert_eq!(m.iter().filter(|z| **z != c(0.0, 0.0)).count(), 1);
    }

    #[test]
    fn column_order_follows_increasing_party_labels() {
        // |0 1 2 0⟩ under 23|41: row (i2,i3) = (1,2) -> 5, column (i1,i4) = (0,0) -> 0
        let k = Ket::<f64>::basis(3, [0, 1, 2, 0]).unwrap();
        let m = matricize(&k, "23|41".parse().unwrap());
        assert_eq!(m[(5, 0)], c(1.0, 0.0));
        let k = Ket::<f64>::basis(3, [2, 0, 0, 1]).unwrap();
        let m = matricize(&k, "23|41".parse().unwrap());
        assert_eq!(m[(0, 7)], c(1.0, 0.0));
    }

    #[test]
    fn basis_state_schmidt_values() {
        let k = Ket::<f64>::basis(3, [1, 2, 0, 1]).unwrap();
        for bp in Bipartition::all() {
            let s = schmidt_values(&k, bp).unwrap();
            assert!((s[0] - 1.0).abs() < 1e-14);
            assert!(s[1..].iter().all(|x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn bell_pair_times_product() {
        // (|00⟩+|11⟩)_12 ⊗ |00⟩_34 across 12|34: one value √2
        let k = Ket::<f64>::from_terms(3, [([0, 0, 0, 0], c(1.0, 0.0)), ([1, 1, 0, 0], c(1.0, 0.0))])
            .unwrap();
        let s = schmidt_values(&k, "12|34".parse().unwrap()).unwrap();
        assert!((s[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(s[1].abs() < 1e-14);
        let s = schmidt_values(&k, "1|234".parse().unwrap()).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_state_rejected() {
        let k = Ket::<f64>::zero(3).unwrap();
        assert_eq!(schmidt_values(&k, Bipartition::all()[0]), Err(TensorError::ZeroState));
    }

    #[test]
    fn product_detection_both_directions() {
        let a: Vec<C<f64>> = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5)];
        let b: Vec<C<f64>> = vec![c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let p = tensor4(&a, &b, &a, &b).unwrap();
        for bp in Bipartition::all() {
            assert!(is_product_across(&p, bp, PRODUCT_TOL).unwrap());
        }
        let ghz = Ket::<f64>::from_terms(3, [([0; 4], c(1.0, 0.0)), ([1; 4], c(1.0, 0.0))]).unwrap();
        for bp in Bipartition::all() {
            assert!(!is_product_across(&ghz, bp, PRODUCT_TOL).unwrap());
        }
    }

    #[test]
    fn empty_and_full_row_groups() {
        let k = Ket::<f64>::basis(3, [2, 2, 2, 2]).unwrap();
        assert_eq!(matricize_parties(&k, PartySet::ALL).shape(), (81, 1));
        assert_eq!(matricize_parties(&k, PartySet::EMPTY).shape(), (1, 81));
    }
}
