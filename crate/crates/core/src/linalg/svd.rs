use nalgebra::{DMatrix, SVD};

use super::LinalgError;
use crate::scalar::{zero, Real, C};

/// Default relative rank threshold `σᵢ > τ·σ₁`.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Matrices with `σ₁` at or below this have rank 0.
pub const ABS_RANK_FLOOR: f64 = 1e-12;

fn check_finite<T: Real>(m: &DMatrix<C<T>>) -> Result<(), LinalgError> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values<T: Real>(m: &DMatrix<C<T>>) -> Result<Vec<T>, LinalgError> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new(m.clone(), false, false, T::eps(), 0).ok_or(LinalgError::NoConvergence)?;
    let mut s: Vec<T> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(s)
}

/// Count of descending values above `tau_rel · σ₁`; 0 when `σ₁ ≤ 1e-12`.
pub fn rank_of_values<T: Real>(values: &[T], tau_rel: f64) -> usize {
    let Some(&top) = values.first() else { return 0 };
    if top <= T::lit(ABS_RANK_FLOOR) {
        return 0;
    }
    let cut = T::lit(tau_rel) * top;
    values.iter().filter(|&&s| s > cut).count()
}

pub fn numeric_rank<T: Real>(m: &DMatrix<C<T>>, tau_rel: f64) -> Result<usize, LinalgError> {
    Ok(rank_of_values(&singular_values(m)?, tau_rel))
}

/// Orthonormal basis (as columns) of the right nullspace of `m`, using the
/// same relative threshold as [`numeric_rank`].
pub fn nullspace<T: Real>(m: &DMatrix<C<T>>, tau_rel: f64) -> Result<DMatrix<C<T>>, LinalgError> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(DMatrix::from_element(0, 0, zero()));
    }
    if rows == 0 {
        return Ok(DMatrix::identity(cols, cols));
    }
    // pad to at least square so V is complete
    let padded = if rows < cols {
        let mut p = DMatrix::from_element(cols, cols, zero());
        p.rows_mut(0, rows).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::try_new(padded, false, true, T::eps(), 0).ok_or(LinalgError::NoConvergence)?;
    let v_t = svd.v_t.as_ref().expect("requested V");
    let top = svd.singular_values.iter().fold(T::zero(), |a, &s| a.max(s));
    let cut = if top <= T::lit(ABS_RANK_FLOOR) { top } else { T::lit(tau_rel) * top };
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cut)
        .collect();
    let mut out = DMatrix::from_element(cols, null.len(), zero());
    for (c, &i) in null.iter().enumerate() {
        for j in 0..cols {
            out[(j, c)] = v_t[(i, j)].conj();
        }
    }
    Ok(out)
}

/// Orthonormal basis of the orthogonal complement of the column span.
pub fn complement_basis<T: Real>(columns: &DMatrix<C<T>>, tau_rel: f64) -> Result<DMatrix<C<T>>, LinalgError> {
    nullspace(&columns.adjoint(), tau_rel)
}

/// Modified Gram–Schmidt on the columns, dropping (near-)dependent ones.
pub fn orthonormalize_columns<T: Real>(m: &DMatrix<C<T>>, tol: f64) -> DMatrix<C<T>> {
    let mut kept: Vec<nalgebra::DVector<C<T>>> = Vec::new();
    for col in m.column_iter() {
        let mut v = col.clone_owned();
        let start = v.norm();
        for q in &kept {
            let proj = q.dotc(&v);
            v -= q * proj;
        }
        // second pass for stability
        for q in &kept {
            let proj = q.dotc(&v);
            v -= q * proj;
        }
        let n = v.norm();
        if n > T::lit(tol) * start.max(T::one()) {
            kept.push(v.unscale(n));
        }
    }
    if kept.is_empty() {
        return DMatrix::from_element(m.nrows(), 0, zero());
    }
    DMatrix::from_columns(&kept)
}

/// `‖P₁ − P₂‖₂` for the projectors onto two orthonormal column sets.
/// Subspaces of different dimension are at distance 1.
pub fn projector_distance<T: Real>(q1: &DMatrix<C<T>>, q2: &DMatrix<C<T>>) -> Result<T, LinalgError> {
    if q1.nrows() != q2.nrows() {
        return Err(LinalgError::DimensionMismatch { expected: q1.nrows(), got: q2.nrows() });
    }
    if q1.ncols() != q2.ncols() {
        return Ok(T::one());
    }
    if q1.ncols() == 0 {
        return Ok(T::zero());
    }
    // sine of the largest principal angle, without the cancellation in √(1 − cos²)
    let residual = q1 - q2 * (q2.adjoint() * q1);
    let s = singular_values(&residual)?;
    Ok(s.first().copied().unwrap_or_else(T::zero).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_unitary, seeded};
    use crate::scalar::c;

    #[test]
    fn identity_values() {
        let m = DMatrix::<C<f64>>::identity(3, 3);
        let s = singular_values(&m).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn all_ones_3x27() {
        let m = DMatrix::from_element(3, 27, c::<f64>(1.0, 0.0));
        let s = singular_values(&m).unwrap();
        assert!((s[0] - 9.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12 && s[2].abs() < 1e-12);
        assert_eq!(numeric_rank(&m, DEFAULT_RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn zero_matrix_rank() {
        let m = DMatrix::<C<f64>>::zeros(4, 5);
        assert_eq!(numeric_rank(&m, DEFAULT_RANK_TOL).unwrap(), 0);
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = DMatrix::<C<f64>>::identity(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(singular_values(&m), Err(LinalgError::NonFinite));
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[c::<f64>(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let n = nullspace(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).norm() < 1e-12);
        assert!((n.adjoint() * &n - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn complement_of_span() {
        let cols = DMatrix::from_column_slice(3, 1, &[c::<f64>(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let comp = complement_basis(&cols, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(comp.ncols(), 2);
        assert!((cols.adjoint() * &comp).norm() < 1e-12);
    }

    #[test]
    fn projector_distance_of_rotated_subspace() {
        let mut rng = seeded(3);
        let u = random_unitary::<f64>(&mut rng, 5);
        let q = u.columns(0, 2).clone_owned();
        assert!(projector_distance(&q, &q).unwrap() < 1e-14);
        // same span, different basis
        let rot = random_unitary::<f64>(&mut rng, 2);
        assert!(projector_distance(&q, &(&q * rot)).unwrap() < 1e-14);
        let q2 = u.columns(2, 2).clone_owned();
        assert!((projector_distance(&q, &q2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let m = DMatrix::from_column_slice(
            2,
            3,
            &[c::<f64>(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        );
        let q = orthonormalize_columns(&m, 1e-10);
        assert_eq!(q.ncols(), 2);
    }
}
