use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::LinalgError;
use crate::scalar::{zero, Real, C};
use crate::tensor::{group_index, matricize_parties, Ket, PartySet};

/// Gram eigenvalues at or below `NULL_EIG_REL · λ_max` span the nullspace
/// (the square of the 1e-9 singular threshold). The effective cut is
/// floored at `n·ε` because squaring the constraint matrix loses the
/// digits below that level.
pub const NULL_EIG_REL: f64 = 1e-18;

/// How the normal matrix of the constraint rows is accumulated.
///
/// Both modes add every row into every Gram entry in the same order, so
/// they produce bit-identical results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Accumulation {
    Sequential,
    #[default]
    Parallel,
}

/// Real coordinates of a D×D Hermitian operator: the D diagonal entries,
/// then for every `i < j` (row-major) `√2·Re H_ij` and `√2·Im H_ij`.
///
/// The map is a linear isometry between the Frobenius inner product and the
/// Euclidean dot product. The identity has coordinates `[1; D]` followed by
/// `D² − D` zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianCoordinates<T: Real> {
    dim: usize,
    coords: Vec<T>,
}

#[inline]
fn pair_offset(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    dim + 2 * (i * dim - i * (i + 1) / 2 + (j - i - 1))
}

impl<T: Real> HermitianCoordinates<T> {
    pub fn from_coords(dim: usize, coords: Vec<T>) -> Result<Self, LinalgError> {
        if coords.len() != dim * dim {
            return Err(LinalgError::DimensionMismatch { expected: dim * dim, got: coords.len() });
        }
        Ok(Self { dim, coords })
    }

    /// Reads the diagonal and upper triangle of `h`; the lower triangle is
    /// assumed to be its conjugate.
    pub fn from_matrix(h: &DMatrix<C<T>>) -> Result<Self, LinalgError> {
        let dim = h.nrows();
        if h.ncols() != dim {
            return Err(LinalgError::DimensionMismatch { expected: dim, got: h.ncols() });
        }
        let s2 = T::lit(2.0).sqrt();
        let mut coords = vec![T::zero(); dim * dim];
        for i in 0..dim {
            coords[i] = h[(i, i)].re;
            for j in i + 1..dim {
                let p = pair_offset(dim, i, j);
                coords[p] = h[(i, j)].re * s2;
                coords[p + 1] = h[(i, j)].im * s2;
            }
        }
        Ok(Self { dim, coords })
    }

    pub fn identity(dim: usize) -> Self {
        let mut coords = vec![T::zero(); dim * dim];
        coords[..dim].fill(T::one());
        Self { dim, coords }
    }

    pub fn to_matrix(&self) -> DMatrix<C<T>> {
        let dim = self.dim;
        let s = T::one() / T::lit(2.0).sqrt();
        let mut h = DMatrix::from_element(dim, dim, zero());
        for i in 0..dim {
            h[(i, i)] = C::new(self.coords[i], T::zero());
            for j in i + 1..dim {
                let p = pair_offset(dim, i, j);
                let z = C::new(self.coords[p] * s, self.coords[p + 1] * s);
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dot(&self, other: &Self) -> T {
        self.coords.iter().zip(&other.coords).fold(T::zero(), |a, (x, y)| a + *x * *y)
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }
}

/// Solution space of a Hermitian constraint system.
#[derive(Clone, Debug)]
pub struct HermitianNullspace<T: Real> {
    pub dim: usize,
    /// Frobenius-orthonormal Hermitian operators spanning the solutions.
    pub basis: Vec<DMatrix<C<T>>>,
    /// Real constraint rows accumulated (two per distinct pair, minus empty rows).
    pub constraint_rows: usize,
    pub lambda_max: T,
    /// Effective relative eigenvalue cut used.
    pub threshold_rel: T,
    /// Smallest Gram eigenvalues divided by `λ_max`, ascending.
    pub smallest_eigenvalues_rel: Vec<T>,
}

impl<T: Real> HermitianNullspace<T> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

type SplitKet<T> = BTreeMap<usize, Vec<(usize, C<T>)>>;

/// Terms of `k` grouped by the unmeasured multi-index, each carrying the
/// measured multi-index.
fn split_ket<T: Real>(k: &Ket<T>, measured: PartySet) -> SplitKet<T> {
    let d = k.d();
    let ms = measured.slots();
    let us = measured.complement().slots();
    let mut out: SplitKet<T> = BTreeMap::new();
    for (idx, amp) in k.terms() {
        out.entry(group_index(idx, &us, d)).or_default().push((group_index(idx, &ms, d), *amp));
    }
    out
}

type SparseRow<T> = Vec<(usize, T)>;

/// The real and imaginary rows of `⟨u|(I ⊗ H)|v⟩ = 0` in Hermitian coordinates.
fn pair_rows<T: Real>(u: &SplitKet<T>, v: &SplitKet<T>, dim: usize) -> [SparseRow<T>; 2] {
    let s = T::one() / T::lit(2.0).sqrt();
    let i_unit = C::new(T::zero(), T::one());
    let mut coef: BTreeMap<usize, C<T>> = BTreeMap::new();
    for (r, us) in u {
        let Some(vs) = v.get(r) else { continue };
        for &(k, a) in us {
            for &(l, b) in vs {
                let w = a.conj() * b;
                if k == l {
                    *coef.entry(k).or_insert_with(zero) += w;
                } else {
                    let (lo, hi, sign) = if k < l { (k, l, T::one()) } else { (l, k, -T::one()) };
                    let p = pair_offset(dim, lo, hi);
                    *coef.entry(p).or_insert_with(zero) += w * s;
                    *coef.entry(p + 1).or_insert_with(zero) += w * i_unit * s * sign;
                }
            }
        }
    }
    let scale = coef.values().fold(T::zero(), |a, z| a.max(z.re.abs()).max(z.im.abs()));
    let cut = scale * T::lit(1e-15);
    let re: SparseRow<T> = coef.iter().filter(|(_, z)| z.re.abs() > cut).map(|(&i, z)| (i, z.re)).collect();
    let im: SparseRow<T> = coef.iter().filter(|(_, z)| z.im.abs() > cut).map(|(&i, z)| (i, z.im)).collect();
    [re, im]
}

fn accumulate_columns<T: Real>(rows: &[SparseRow<T>], n: usize, first_col: usize, cols: &mut [T]) {
    let last_col = first_col + cols.len() / n;
    for row in rows {
        let lo = row.partition_point(|&(j, _)| j < first_col);
        let hi = row.partition_point(|&(j, _)| j < last_col);
        for &(j, rj) in &row[lo..hi] {
            let col = &mut cols[(j - first_col) * n..(j - first_col + 1) * n];
            for &(i, ri) in row {
                col[i] += ri * rj;
            }
        }
    }
}

/// Hermitian operators `H` on the `measured` parties with
/// `⟨kets[a]|(I ⊗ H)|kets[b]⟩ = 0` for every listed pair.
///
/// Pairs are unordered: `(a, b)` and `(b, a)` give the same two real
/// equations for Hermitian `H`, so duplicates are merged. An empty pair list
/// leaves the full D²-dimensional space.
pub fn hermitian_constraint_nullspace<T: Real>(
    dim: usize,
    kets: &[Ket<T>],
    pairs: &[(usize, usize)],
    measured: PartySet,
    mode: Accumulation,
) -> Result<HermitianNullspace<T>, LinalgError> {
    let Some(first) = kets.first() else {
        return Err(LinalgError::EmptyConstraintSet);
    };
    let d = first.d();
    if let Some(k) = kets.iter().find(|k| k.d() != d) {
        return Err(LinalgError::DimensionMismatch { expected: d, got: k.d() });
    }
    if measured.dim(d) != dim || measured.is_empty() {
        return Err(LinalgError::DimensionMismatch { expected: measured.dim(d), got: dim });
    }
    let mut unique: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        if a == b || a >= kets.len() || b >= kets.len() {
            return Err(LinalgError::InvalidPair(a, b));
        }
        unique.push((a.min(b), a.max(b)));
    }
    unique.sort_unstable();
    unique.dedup();

    let n = dim * dim;
    let split: Vec<SplitKet<T>> = match mode {
        Accumulation::Sequential => kets.iter().map(|k| split_ket(k, measured)).collect(),
        Accumulation::Parallel => kets.par_iter().map(|k| split_ket(k, measured)).collect(),
    };
    let build = |&(a, b): &(usize, usize)| pair_rows(&split[a], &split[b], dim);
    let row_pairs: Vec<[SparseRow<T>; 2]> = match mode {
        Accumulation::Sequential => unique.iter().map(build).collect(),
        Accumulation::Parallel => unique.par_iter().map(build).collect(),
    };
    let rows: Vec<SparseRow<T>> = row_pairs.into_iter().flatten().filter(|r| !r.is_empty()).collect();

    let mut gram = vec![T::zero(); n * n];
    match mode {
        Accumulation::Sequential => accumulate_columns(&rows, n, 0, &mut gram),
        Accumulation::Parallel => {
            let block = n.div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
            gram.par_chunks_mut(block * n)
                .enumerate()
                .for_each(|(b, cols)| accumulate_columns(&rows, n, b * block, cols));
        }
    }

    let gram = DMatrix::from_vec(n, n, gram);
    let eig = SymmetricEigen::new(gram);
    let lambda_max = eig.eigenvalues.iter().fold(T::zero(), |a, &l| a.max(l));
    let floor = T::lit(n as f64) * T::eps();
    let threshold_rel = T::lit(NULL_EIG_REL).max(floor);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal)
    });
    let smallest_eigenvalues_rel = if lambda_max > T::zero() {
        order.iter().take(16).map(|&i| eig.eigenvalues[i] / lambda_max).collect()
    } else {
        vec![T::zero(); n.min(16)]
    };

    let basis = if lambda_max <= T::zero() {
        (0..n)
            .map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                HermitianCoordinates { dim, coords: e }.to_matrix()
            })
            .collect()
    } else {
        order
            .iter()
            .filter(|&&i| eig.eigenvalues[i] <= threshold_rel * lambda_max)
            .map(|&i| {
                let coords = eig.eigenvectors.column(i).iter().copied().collect();
                HermitianCoordinates { dim, coords }.to_matrix()
            })
            .collect()
    };

    Ok(HermitianNullspace {
        dim,
        basis,
        constraint_rows: rows.len(),
        lambda_max,
        threshold_rel,
        smallest_eigenvalues_rel,
    })
}

/// `|Tr H| / (√D ‖H‖_F)`: overlap of `H` with the normalized identity.
pub fn identity_overlap<T: Real>(h: &DMatrix<C<T>>) -> T {
    let norm = h.norm();
    if norm == T::zero() {
        return T::zero();
    }
    let tr = h.trace();
    tr.norm_sqr().sqrt() / (T::lit(h.nrows() as f64).sqrt() * norm)
}

/// Largest `|⟨u|(I ⊗ H)|v⟩| / (‖u‖‖v‖)` over the pairs, evaluated densely.
/// Independent of the coordinate route used by the nullspace solver.
pub fn constraint_residual<T: Real>(
    kets: &[Ket<T>],
    pairs: &[(usize, usize)],
    measured: PartySet,
    h: &DMatrix<C<T>>,
) -> Result<T, LinalgError> {
    let rest = measured.complement();
    let mats: Vec<DMatrix<C<T>>> = kets.iter().map(|k| matricize_parties(k, rest)).collect();
    let mut worst = T::zero();
    for &(a, b) in pairs {
        if a >= kets.len() || b >= kets.len() {
            return Err(LinalgError::InvalidPair(a, b));
        }
        if mats[a].ncols() != h.nrows() {
            return Err(LinalgError::DimensionMismatch { expected: mats[a].ncols(), got: h.nrows() });
        }
        let val = (mats[a].conjugate() * h * mats[b].transpose()).trace();
        let scale = kets[a].norm() * kets[b].norm();
        if scale > T::zero() {
            worst = worst.max(val.norm_sqr().sqrt() / scale);
        }
    }
    Ok(worst)
}
