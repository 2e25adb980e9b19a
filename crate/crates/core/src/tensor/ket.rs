use std::collections::BTreeMap;

use super::TensorError;
use crate::scalar::{cabs, one, zero, Real, C};

/// Amplitudes with magnitude below this are never stored.
pub const STORAGE_EPS: f64 = 1e-15;

/// Computational basis label `(i1, i2, i3, i4)`, parties 1..4 in order.
pub type Index4 = [usize; 4];

/// Sparse (unnormalized) state vector in (C^d)⊗4.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket<T: Real> {
    d: usize,
    terms: BTreeMap<Index4, C<T>>,
}

impl<T: Real> Ket<T> {
    pub fn zero(d: usize) -> Result<Self, TensorError> {
        if d < 3 {
            return Err(TensorError::InvalidDimension(d));
        }
        Ok(Self { d, terms: BTreeMap::new() })
    }

    /// `|i1 i2 i3 i4⟩`.
    pub fn basis(d: usize, index: Index4) -> Result<Self, TensorError> {
        let mut k = Self::zero(d)?;
        k.add_term(index, one())?;
        Ok(k)
    }

    /// Sums the given terms; repeated indices accumulate.
    pub fn from_terms<I>(d: usize, terms: I) -> Result<Self, TensorError>
    where
        I: IntoIterator<Item = (Index4, C<T>)>,
    {
        let mut k = Self::zero(d)?;
        for (idx, amp) in terms {
            k.add_term(idx, amp)?;
        }
        Ok(k)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic index order.
    pub fn terms(&self) -> impl Iterator<Item = (&Index4, &C<T>)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, index: &Index4) -> C<T> {
        self.terms.get(index).copied().unwrap_or_else(zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Index4> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, index: Index4, amp: C<T>) -> Result<(), TensorError> {
        if index.iter().any(|&i| i >= self.d) {
            return Err(TensorError::IndexOutOfRange { index, d: self.d });
        }
        let eps = T::lit(STORAGE_EPS);
        let entry = self.terms.entry(index).or_insert_with(zero);
        *entry += amp;
        if cabs(*entry) < eps {
            self.terms.remove(&index);
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Largest stored amplitude magnitude.
    pub fn max_abs(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, a| acc.max(cabs(*a)))
    }

    pub fn scaled(&self, factor: C<T>) -> Self {
        let mut out = Self { d: self.d, terms: BTreeMap::new() };
        for (idx, amp) in &self.terms {
            // indices already validated
            let _ = out.add_term(*idx, *amp * factor);
        }
        out
    }

    pub fn normalized(&self) -> Result<Self, TensorError> {
        let n = self.norm();
        if n == T::zero() {
            return Err(TensorError::ZeroState);
        }
        Ok(self.scaled(C::new(T::one() / n, T::zero())))
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: C<T>, other: &Ket<T>) -> Result<(), TensorError> {
        if self.d != other.d {
            return Err(TensorError::DimensionMismatch { left: self.d, right: other.d });
        }
        for (idx, amp) in &other.terms {
            self.add_term(*idx, *amp * factor)?;
        }
        Ok(())
    }

    /// `Σ coeff_i · ket_i`.
    pub fn linear_combination<'a, I>(d: usize, parts: I) -> Result<Self, TensorError>
    where
        I: IntoIterator<Item = (C<T>, &'a Ket<T>)>,
    {
        let mut out = Self::zero(d)?;
        for (coeff, ket) in parts {
            out.add_scaled(coeff, ket)?;
        }
        Ok(out)
    }

    /// Dense vector of length d⁴ in lexicographic index order.
    pub fn to_dense(&self) -> nalgebra::DVector<C<T>> {
        let d = self.d;
        let mut v = nalgebra::DVector::from_element(d.pow(4), zero());
        for (idx, amp) in &self.terms {
            v[((idx[0] * d + idx[1]) * d + idx[2]) * d + idx[3]] = *amp;
        }
        v
    }

    /// Inverse of [`Ket::to_dense`].
    pub fn from_dense(d: usize, v: &nalgebra::DVector<C<T>>) -> Result<Self, TensorError> {
        if v.len() != d.pow(4) {
            return Err(TensorError::DimensionMismatch { left: v.len(), right: d.pow(4) });
        }
        let mut k = Self::zero(d)?;
        for (flat, amp) in v.iter().enumerate() {
            let idx = [flat / (d * d * d), (flat / (d * d)) % d, (flat / d) % d, flat % d];
            k.add_term(idx, *amp)?;
        }
        Ok(k)
    }
}

/// `⟨u|v⟩ = Σ conj(u[i]) v[i]`.
pub fn inner<T: Real>(u: &Ket<T>, v: &Ket<T>) -> Result<C<T>, TensorError> {
    if u.d != v.d {
        return Err(TensorError::DimensionMismatch { left: u.d, right: v.d });
    }
    let (small, large, conj_small) =
        if u.terms.len() <= v.terms.len() { (u, v, true) } else { (v, u, false) };
    let mut acc = zero();
    for (idx, a) in &small.terms {
        if let Some(b) = large.terms.get(idx) {
            acc += if conj_small { a.conj() * b } else { b.conj() * a };
        }
    }
    Ok(acc)
}

/// Product state `f1 ⊗ f2 ⊗ f3 ⊗ f4` from four single-party vectors.
pub fn tensor4<T: Real>(
    f1: &[C<T>],
    f2: &[C<T>],
    f3: &[C<T>],
    f4: &[C<T>],
) -> Result<Ket<T>, TensorError> {
    let d = f1.len();
    for f in [f2, f3, f4] {
        if f.len() != d {
            return Err(TensorError::DimensionMismatch { left: d, right: f.len() });
        }
    }
    let mut k = Ket::zero(d)?;
    let nz = |f: &[C<T>]| -> Vec<(usize, C<T>)> {
        f.iter().copied().enumerate().filter(|(_, a)| *a != zero()).collect()
    };
    let (n1, n2, n3, n4) = (nz(f1), nz(f2), nz(f3), nz(f4));
    for &(i1, a1) in &n1 {
        for &(i2, a2) in &n2 {
            let a12 = a1 * a2;
            for &(i3, a3) in &n3 {
                let a123 = a12 * a3;
                for &(i4, a4) in &n4 {
                    k.add_term([i1, i2, i3, i4], a123 * a4)?;
                }
            }
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn e(d: usize, i: usize) -> Vec<C<f64>> {
        (0..d).map(|j| if j == i { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()
    }

    #[test]
    fn basis_ket_has_unit_norm() {
        let k = Ket::<f64>::basis(3, [0, 0, 0, 0]).unwrap();
        assert_eq!(inner(&k, &k).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn tiny_amplitudes_are_dropped() {
        let mut k = Ket::<f64>::basis(3, [1, 2, 0, 1]).unwrap();
        k.add_term([1, 2, 0, 1], c(-1.0 + 1e-17, 0.0)).unwrap();
        assert!(k.is_zero());
        k.add_term([0, 0, 0, 0], c(1e-16, 0.0)).unwrap();
        assert!(k.is_zero());
    }

    #[test]
    fn out_of_range_index_rejected() {
        let err = Ket::<f64>::basis(3, [0, 3, 0, 0]).unwrap_err();
        assert!(matches!(err, TensorError::IndexOutOfRange { .. }));
        assert!(matches!(Ket::<f64>::zero(2), Err(TensorError::InvalidDimension(2))));
    }

    #[test]
    fn inner_dimension_mismatch() {
        let a = Ket::<f64>::basis(3, [0; 4]).unwrap();
        let b = Ket::<f64>::basis(4, [0; 4]).unwrap();
        assert!(matches!(inner(&a, &b), Err(TensorError::DimensionMismatch { .. })));
    }

    #[test]
    fn inner_is_conjugate_symmetric() {
        let a = Ket::<f64>::from_terms(3, [([0, 1, 2, 0], c(1.0, 2.0)), ([1, 1, 1, 1], c(0.5, -1.0))])
            .unwrap();
        let b = Ket::<f64>::from_terms(3, [([0, 1, 2, 0], c(-0.3, 0.7)), ([1, 1, 1, 1], c(2.0, 0.0))])
            .unwrap();
        assert_eq!(inner(&a, &b).unwrap(), inner(&b, &a).unwrap().conj());
    }

    #[test]
    fn tensor4_of_basis_vectors() {
        let z = e(3, 0);
        let k = tensor4(&z, &z, &z, &z).unwrap();
        assert_eq!(k, Ket::basis(3, [0; 4]).unwrap());
    }

    #[test]
    fn tensor4_eta_minus_first_party() {
        let z = e(3, 0);
        let minus: Vec<C<f64>> = vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)];
        let k = tensor4(&minus, &z, &z, &z).unwrap();
        let expected =
            Ket::from_terms(3, [([0, 0, 0, 0], c(1.0, 0.0)), ([1, 0, 0, 0], c(-1.0, 0.0))]).unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn tensor4_all_ones_expands_to_81_terms() {
        let s: Vec<C<f64>> = vec![c(1.0, 0.0); 3];
        let k = tensor4(&s, &s, &s, &s).unwrap();
        assert_eq!(k.len(), 81);
        assert!(k.terms().all(|(_, a)| *a == c(1.0, 0.0)));
    }

    #[test]
    fn tensor4_rejects_mixed_dimensions() {
        let a = e(3, 0);
        let b = e(4, 0);
        assert!(matches!(tensor4(&a, &a, &b, &a), Err(TensorError::DimensionMismatch { .. })));
    }

    #[test]
    fn dense_round_trip() {
        let k = Ket::<f64>::from_terms(4, [([3, 1, 0, 2], c(0.25, -1.0)), ([0, 0, 3, 3], c(2.0, 0.0))])
            .unwrap();
        assert_eq!(Ket::from_dense(4, &k.to_dense()).unwrap(), k);
    }
}
