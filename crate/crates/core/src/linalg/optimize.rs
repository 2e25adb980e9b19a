use nalgebra::{DMatrix, DVector, SVD};
use rayon::prelude::*;

use super::LinalgError;
use crate::rng::{random_unit_vector, substream};
use crate::scalar::{zero, Real, C};
use crate::tensor::{matricize, Bipartition, Ket};

/// Local descent parameters for [`min_second_singular_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop when the projected gradient norm drops below this.
    pub grad_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { restarts: 200, seed: 0, max_iters: 150, grad_tol: 1e-9 }
    }
}

/// Smallest σ₂ found and the unit coefficient vector (in the given basis)
/// where it was attained. `min_sigma2` is re-evaluated at the returned point.
#[derive(Clone, Debug)]
pub struct MinSigma2<T: Real> {
    pub min_sigma2: T,
    pub coefficients: DVector<C<T>>,
    pub restart: usize,
}

/// Second singular value of the matricization of `k` across `bp` (0 when the
/// matrix has fewer than two singular values).
pub fn second_singular<T: Real>(k: &Ket<T>, bp: Bipartition) -> Result<T, LinalgError> {
    let s = super::singular_values(&matricize(k, bp))?;
    Ok(s.get(1).copied().unwrap_or_else(T::zero))
}

fn combine<T: Real>(mats: &[DMatrix<C<T>>], c: &DVector<C<T>>) -> DMatrix<C<T>> {
    let mut m = DMatrix::from_element(mats[0].nrows(), mats[0].ncols(), zero());
    for (mat, &ci) in mats.iter().zip(c.iter()) {
        m.zip_apply(mat, |acc, x| *acc += x * ci);
    }
    m
}

/// σ₂ with its left/right singular vectors.
fn sigma2_with_vectors<T: Real>(
    m: DMatrix<C<T>>,
) -> Result<(T, Option<(DVector<C<T>>, DVector<C<T>>)>), LinalgError> {
    if m.nrows() < 2 || m.ncols() < 2 {
        return Ok((T::zero(), None));
    }
    let svd = SVD::try_new(m, true, true, T::eps(), 0).ok_or(LinalgError::NoConvergence)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap_or(std::cmp::Ordering::Equal)
    });
    let i = order[1];
    let u = svd.u.as_ref().map(|u| u.column(i).into_owned()).ok_or(LinalgError::NoConvergence)?;
    let v = svd.v_t.as_ref().map(|vt| vt.row(i).adjoint()).ok_or(LinalgError::NoConvergence)?;
    Ok((svd.singular_values[i], Some((u, v))))
}

fn sigma2<T: Real>(mats: &[DMatrix<C<T>>], c: &DVector<C<T>>) -> Result<T, LinalgError> {
    let s = super::singular_values(&combine(mats, c))?;
    Ok(s.get(1).copied().unwrap_or_else(T::zero))
}

fn descend<T: Real>(
    mats: &[DMatrix<C<T>>],
    mut c: DVector<C<T>>,
    settings: &OptimizerSettings,
) -> Result<DVector<C<T>>, LinalgError> {
    let mut step = T::lit(0.5);
    for _ in 0..settings.max_iters {
        let (s2, vecs) = sigma2_with_vectors(combine(mats, &c))?;
        let Some((u, v)) = vecs else { break };
        // dσ₂/dc̄ₛ ∝ conj(u₂ᴴ Mₛ v₂); drop the radial part to stay on the sphere
        let grad = DVector::from_iterator(c.len(), mats.iter().map(|m| (u.adjoint() * m * &v)[(0, 0)].conj()));
        let tangent = &grad - c.scale(s2);
        let gnorm = tangent.norm();
        if gnorm < T::lit(settings.grad_tol) {
            break;
        }
        let mut accepted = false;
        while step > T::lit(1e-12) {
            let trial = &c - tangent.scale(step);
            let trial = trial.unscale(trial.norm());
            if sigma2(mats, &trial)? < s2 {
                c = trial;
                accepted = true;
                step *= T::lit(1.5);
                break;
            }
            step *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    Ok(c)
}

/// Heuristic minimum of σ₂ over unit vectors of `span(subspace)` across `bp`,
/// by projected gradient descent from `restarts` seeded random starts.
///
/// The basis must be orthonormal so that unit coefficient vectors give unit
/// states. A result near zero is a product state in the span and can be
/// re-verified from `coefficients`; a positive result is evidence only.
pub fn min_second_singular<T: Real>(
    subspace: &[Ket<T>],
    bp: Bipartition,
    restarts: usize,
    seed: u64,
) -> Result<MinSigma2<T>, LinalgError> {
    let settings = OptimizerSettings { restarts, seed, ..OptimizerSettings::default() };
    min_second_singular_with(subspace, bp, &settings)
}

pub fn min_second_singular_with<T: Real>(
    subspace: &[Ket<T>],
    bp: Bipartition,
    settings: &OptimizerSettings,
) -> Result<MinSigma2<T>, LinalgError> {
    if subspace.is_empty() {
        return Err(LinalgError::EmptySubspace);
    }
    if settings.restarts == 0 {
        return Err(LinalgError::NoRestarts);
    }
    let mats: Vec<DMatrix<C<T>>> = subspace.iter().map(|k| matricize(k, bp)).collect();
    let n = mats.len();
    let runs: Vec<Result<(T, DVector<C<T>>), LinalgError>> = (0..settings.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(settings.seed, r as u64);
            let start = random_unit_vector::<T>(&mut rng, n);
            let c = descend(&mats, start, settings)?;
            Ok((sigma2(&mats, &c)?, c))
        })
        .collect();
    let mut best: Option<MinSigma2<T>> = None;
    for (r, run) in runs.into_iter().enumerate() {
        let (s2, c) = run?;
        if best.as_ref().is_none_or(|b| s2 < b.min_sigma2) {
            best = Some(MinSigma2 { min_sigma2: s2, coefficients: c, restart: r });
        }
    }
    best.ok_or(LinalgError::EmptySubspace)
}
