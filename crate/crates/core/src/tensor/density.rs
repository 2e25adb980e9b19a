use nalgebra::DMatrix;

use super::{inner, matricize_parties, Ket, PartySet, TensorError};
use crate::linalg::numeric_rank;
use crate::scalar::{cabs, zero, Real, C};

/// Orthonormality tolerance for [`partial_trace`] inputs.
const ORTHONORMAL_TOL: f64 = 1e-10;

/// Reduced operator on the parties in `parties`, lexicographic basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    d: usize,
    parties: PartySet,
    matrix: DMatrix<C<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn parties(&self) -> PartySet {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C<T>> {
        self.matrix
    }

    pub fn trace(&self) -> C<T> {
        self.matrix.trace()
    }

    /// Largest `|ρ - ρ†|` entry relative to the largest entry.
    pub fn hermiticity_defect(&self) -> T {
        let scale = self.matrix.iter().fold(T::zero(), |a, z| a.max(cabs(*z)));
        if scale == T::zero() {
            return T::zero();
        }
        let adj = self.matrix.adjoint();
        let defect = (&self.matrix - adj).iter().fold(T::zero(), |a, z| a.max(cabs(*z)));
        defect / scale
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= T::lit(1e-12)
    }

    pub fn rank(&self, tau_rel: f64) -> Result<usize, TensorError> {
        Ok(numeric_rank(&self.matrix, tau_rel)?)
    }

    /// Reduced operator `Tr_{rest}(|k⟩⟨k|)` of a single (unnormalized) state.
    pub fn from_pure(k: &Ket<T>, keep: PartySet) -> Self {
        let x = matricize_parties(k, keep);
        let matrix = &x * x.adjoint();
        Self { d: k.d(), parties: keep, matrix }
    }
}

/// `Tr_{rest}(Σ_k |k⟩⟨k|)` for an orthonormal list of states, i.e. the
/// reduction of the projector onto their span to the parties in `keep`.
///
/// An empty list reduces to the zero operator.
pub fn partial_trace<T: Real>(kets: &[Ket<T>], keep: PartySet) -> Result<DensityMatrix<T>, TensorError> {
    let Some(first) = kets.first() else {
        return Err(TensorError::NonOrthonormalInput { deviation: f64::NAN });
    };
    let d = first.d();
    let tol = T::lit(ORTHONORMAL_TOL);
    let mut worst = T::zero();
    for (i, u) in kets.iter().enumerate() {
        if u.d() != d {
            return Err(TensorError::DimensionMismatch { left: d, right: u.d() });
        }
        for v in &kets[i..] {
            let g = inner(u, v)?;
            let target = if std::ptr::eq(u, v) { T::one() } else { T::zero() };
            worst = worst.max(cabs(g - C::new(target, T::zero())));
        }
    }
    if worst > tol {
        return Err(TensorError::NonOrthonormalInput { deviation: worst.as_f64() });
    }
    let n = keep.dim(d);
    let mut matrix = DMatrix::from_element(n, n, zero());
    for k in kets {
        let x = matricize_parties(k, keep);
        matrix += &x * x.adjoint();
    }
    Ok(DensityMatrix { d, parties: keep, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn ket(terms: &[[usize; 4]]) -> Ket<f64> {
        Ket::from_terms(3, terms.iter().map(|&i| (i, c(1.0, 0.0)))).unwrap()
    }

    #[test]
    fn basis_projector_reduces_to_basis_projector() {
        let k = ket(&[[0, 0, 0, 0]]);
        let keep = PartySet::from_parties(&[2, 3, 4]).unwrap();
        let rho = partial_trace(&[k], keep).unwrap();
        assert_eq!(rho.dim(), 27);
        assert_eq!(rho.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(rho.trace(), c(1.0, 0.0));
    }

    #[test]
    fn psi_plus_u1_reduction() {
        // |0000⟩+|1000⟩+|2000⟩+|2100⟩, normalized; Tr_1 = (2|000⟩⟨000| + |φ2⟩⟨φ2|)/4
        let k = ket(&[[0, 0, 0, 0], [1, 0, 0, 0], [2, 0, 0, 0], [2, 1, 0, 0]]).normalized().unwrap();
        let keep = PartySet::from_parties(&[2, 3, 4]).unwrap();
        let rho = partial_trace(&[k], keep).unwrap();
        let mut expected = DMatrix::<C<f64>>::zeros(27, 27);
        expected[(0, 0)] += c(2.0, 0.0);
        // φ2 = |000⟩ + |100⟩ -> flat indices 0 and 9
        for &i in &[0usize, 9] {
            for &j in &[0usize, 9] {
                expected[(i, j)] += c(1.0, 0.0);
            }
        }
        expected /= c(4.0, 0.0);
        assert!((rho.matrix() - expected).norm() < 1e-14);
        assert!(rho.is_hermitian());
        assert_eq!(rho.rank(1e-9).unwrap(), 2);
    }

    #[test]
    fn center_state_reduction() {
        let k = ket(&[[1, 1, 1, 1]]);
        let rho = partial_trace(&[k], PartySet::from_parties(&[2, 3, 4]).unwrap()).unwrap();
        assert_eq!(rho.matrix()[(13, 13)], c(1.0, 0.0));
        assert_eq!(rho.rank(1e-9).unwrap(), 1);
    }

    #[test]
    fn non_orthonormal_input_rejected() {
        let a = ket(&[[0, 0, 0, 0]]);
        let b = ket(&[[0, 0, 0, 0], [1, 1, 1, 1]]);
        let keep = PartySet::single(1).unwrap();
        assert!(matches!(partial_trace(&[a.clone(), b], keep), Err(TensorError::NonOrthonormalInput { .. })));
        let unnormalized = ket(&[[0, 0, 0, 0], [1, 1, 1, 1]]);
        assert!(partial_trace(&[unnormalized], keep).is_err());
        assert!(partial_trace::<f64>(&[], keep).is_err());
    }

    #[test]
    fn trace_equals_number_of_states() {
        let states = [ket(&[[0, 1, 2, 0]]), ket(&[[2, 2, 1, 0]]), ket(&[[1, 0, 0, 1], [0, 0, 0, 0]]).normalized().unwrap()];
        for keep in [PartySet::from_parties(&[1]).unwrap(), PartySet::from_parties(&[2, 4]).unwrap()] {
            let rho = partial_trace(&states, keep).unwrap();
            assert!((rho.trace() - c(3.0, 0.0)).norm() < 1e-14);
        }
    }
}
