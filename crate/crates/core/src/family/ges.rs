use nalgebra::DMatrix;

use super::layer::{build_psi, center_point_state, check_layer_pub, layer_count, Sign};
use super::{FamilyError, Role, StateFamily};
use crate::linalg::orthonormalize_columns;
use crate::scalar::{root_of_unity, Real, C};
use crate::tensor::{inner, Ket};

fn real<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

/// Normalized `ψ₊ᵢ` of layer `l`, for i = 1..8.
pub fn psi_plus_tilde<T: Real>(d: usize, l: usize) -> Result<Vec<Ket<T>>, FamilyError> {
    (1..=8).map(|i| Ok(build_psi::<T>(d, l, i, Sign::Plus)?.normalized()?)).collect()
}

fn block_sums<T: Real>(tilde: &[Ket<T>], d: usize) -> Result<(Ket<T>, Ket<T>), FamilyError> {
    let one = real(T::one());
    let low = Ket::linear_combination(d, tilde[..4].iter().map(|k| (one, k)))?;
    let high = Ket::linear_combination(d, tilde[4..].iter().map(|k| (one, k)))?;
    Ok((low, high))
}

/// `⟨F|F⟩` of layer `t+1` from the closed form `1/(8m(m²+1))`, `m = d−2t−1`;
/// the center layer gives 1 (odd d) or 1/16 (even d).
pub fn f_norm_sqr_formula(d: usize, layer: usize) -> f64 {
    if layer == layer_count(d) + 1 {
        return if d % 2 == 1 { 1.0 } else { 1.0 / 16.0 };
    }
    let m = (d - 2 * layer + 1) as f64;
    1.0 / (8.0 * (m * m + 1.0) * m)
}

/// The F states of every layer `1..=L` followed by the center state at layer
/// `L+1`, each scaled so its overlap with the unnormalized stopper is 1.
pub fn f_states<T: Real>(d: usize) -> Result<Vec<(usize, Ket<T>)>, FamilyError> {
    let big_l = layer_count(d);
    let mut out = Vec::with_capacity(big_l + 1);
    for l in 1..=big_l {
        let m = T::lit((d - 2 * l + 1) as f64);
        let two = T::lit(2.0);
        let denom = T::lit(4.0) * (m * m + T::one());
        let alpha = T::one() / (denom * (two * m).sqrt());
        let beta = m.sqrt() / (denom * two.sqrt());
        let (low, high) = block_sums(&psi_plus_tilde::<T>(d, l)?, d)?;
        let f = Ket::linear_combination(d, [(real(alpha), &low), (real(beta), &high)])?;
        out.push((l, f));
    }
    let center = center_point_state::<T>(d)?;
    let center = if d % 2 == 1 { center } else { center.scaled(real(T::lit(1.0 / 16.0))) };
    out.push((big_l + 1, center));
    Ok(out)
}

fn g8_literal<T: Real>(d: usize, fs: &[(usize, Ket<T>)]) -> Result<Vec<Ket<T>>, FamilyError> {
    let big_l = layer_count(d);
    let total = fs.iter().fold(T::zero(), |a, (_, f)| a + f.norm_sqr());
    let scale = T::one() / total.sqrt();
    (1..=big_l)
        .map(|l| {
            let parts = fs.iter().enumerate().map(|(t, (_, f))| (root_of_unity::<T>(big_l + 1, l * t) * scale, f));
            Ok(Ket::linear_combination(d, parts)?)
        })
        .collect()
}

/// Orthonormal basis of the complement of the biseparable basis as written:
/// per layer `G1..G7` from the normalized ψ₊ states, and `G8` per layer as
/// the discrete Fourier combination of all F states over the layers and the
/// center. The F states themselves are included with role `FState`.
///
/// The `G8` states of different layers are not orthogonal in general for
/// `d ≥ 5`; see [`g8_overlaps`] and [`fallback_ges_basis`].
pub fn build_ges_basis<T: Real>(d: usize) -> Result<StateFamily<T>, FamilyError> {
    check_layer_pub(d, 1)?;
    let big_l = layer_count(d);
    let mut fam = StateFamily::new(d);
    let fs = f_states::<T>(d)?;
    let g8 = g8_literal(d, &fs)?;
    for l in 1..=big_l {
        let m = T::lit((d - 2 * l + 1) as f64);
        for (n, g) in g1_to_g7(d, m, &psi_plus_tilde::<T>(d, l)?)?.into_iter().enumerate() {
            fam.add(format!("G{}_l{l}", n + 1), Role::GesBasis, Some(l), Some("G"), g)?;
        }
        fam.add(format!("G8_l{l}"), Role::GesBasis, Some(l), Some("G8"), g8[l - 1].clone())?;
    }
    for (layer, f) in fs {
        let label = if layer == big_l + 1 { "F_center".to_string() } else { format!("F_l{layer}") };
        fam.add(label, Role::FState, Some(layer), Some("F"), f)?;
    }
    Ok(fam)
}

fn g1_to_g7<T: Real>(d: usize, m: T, p: &[Ket<T>]) -> Result<Vec<Ket<T>>, FamilyError> {
    let r2 = real(T::one() / T::lit(2.0).sqrt());
    let h = real(T::lit(0.5));
    let comb = |parts: &[(C<T>, usize)]| Ket::linear_combination(d, parts.iter().map(|&(c, i)| (c, &p[i])));
    let norm7 = (T::lit(4.0) * m * m + T::lit(4.0)).sqrt();
    let a7 = real(m / norm7);
    let b7 = real(-T::one() / norm7);
    Ok(vec![
        comb(&[(r2, 0), (-r2, 1)])?,
        comb(&[(r2, 2), (-r2, 3)])?,
        comb(&[(h, 0), (h, 1), (-h, 2), (-h, 3)])?,
        comb(&[(r2, 4), (-r2, 5)])?,
        comb(&[(r2, 6), (-r2, 7)])?,
        comb(&[(h, 4), (h, 5), (-h, 6), (-h, 7)])?,
        comb(&[(a7, 0), (a7, 1), (a7, 2), (a7, 3), (b7, 4), (b7, 5), (b7, 6), (b7, 7)])?,
    ])
}

/// The explicit eight-state basis for `d = 3`, with `G8` written in terms of
/// `|1111⟩` rather than through the F states.
pub fn build_ges_basis_thm1<T: Real>() -> Result<StateFamily<T>, FamilyError> {
    let d = 3;
    let p = psi_plus_tilde::<T>(d, 1)?;
    let mut fam = StateFamily::new(d);
    for (n, g) in g1_to_g7(d, T::lit(2.0), &p)?.into_iter().enumerate() {
        fam.add(format!("G{}", n + 1), Role::GesBasis, Some(1), Some("G"), g)?;
    }
    let s5 = T::lit(5.0).sqrt();
    let a = real(T::one() / (T::lit(18.0) * s5));
    let b = real(T::one() / (T::lit(9.0) * s5));
    let c = real(-T::lit(4.0) * s5 / T::lit(9.0));
    let center = Ket::basis(d, [1, 1, 1, 1])?;
    let mut parts: Vec<(C<T>, &Ket<T>)> = p.iter().enumerate().map(|(i, k)| (if i < 4 { a } else { b }, k)).collect();
    parts.push((c, &center));
    fam.add("G8", Role::GesBasis, Some(1), Some("G8"), Ket::linear_combination(d, parts)?)?;
    Ok(fam)
}

/// Gram matrix `⟨G8_l|G8_l'⟩` of the literal `G8` states of a basis built by
/// [`build_ges_basis`], in layer order.
pub fn g8_overlaps<T: Real>(basis: &StateFamily<T>) -> Result<DMatrix<C<T>>, FamilyError> {
    let g8: Vec<&Ket<T>> = basis.members().iter().filter(|m| m.subset.as_deref() == Some("G8")).map(|m| &m.ket).collect();
    let n = g8.len();
    let mut g = DMatrix::from_element(n, n, real(T::zero()));
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = inner(g8[i], g8[j])?;
        }
    }
    Ok(g)
}

/// [`build_ges_basis`] with the `G8` states replaced by their Gram–Schmidt
/// orthonormalization (labels `G8gs_l*`). They span the same space: the
/// stopper-orthogonal part of the span of the F states.
pub fn fallback_ges_basis<T: Real>(d: usize) -> Result<StateFamily<T>, FamilyError> {
    let literal = build_ges_basis::<T>(d)?;
    let g8: Vec<_> = literal.members().iter().filter(|m| m.subset.as_deref() == Some("G8")).collect();
    let cols: Vec<_> = g8.iter().map(|m| m.ket.to_dense()).collect();
    let q = orthonormalize_columns(&DMatrix::from_columns(&cols), 1e-12);
    let mut fam = StateFamily::new(d);
    for m in literal.with_role(Role::GesBasis).filter(|m| m.subset.as_deref() != Some("G8")) {
        fam.push(m.clone())?;
    }
    for (n, m) in g8.iter().enumerate().take(q.ncols()) {
        let ket = Ket::from_dense(d, &q.column(n).into_owned())?;
        fam.add(format!("G8gs_l{}", m.layer.unwrap_or(n + 1)), Role::GesBasis, m.layer, Some("G8gs"), ket)?;
    }
    Ok(fam)
}
