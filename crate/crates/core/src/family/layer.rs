use std::fmt;
use std::str::FromStr;

use super::{FamilyError, Role, StateFamily};
use crate::scalar::{one, root_of_unity, zero, Real, C};
use crate::tensor::{tensor4, Ket};

/// Number of layers `⌊(d−1)/2⌋`.
pub fn layer_count(d: usize) -> usize {
    (d - 1) / 2
}

fn check_dim(d: usize) -> Result<(), FamilyError> {
    if d < 3 {
        return Err(crate::tensor::TensorError::InvalidDimension(d).into());
    }
    Ok(())
}

pub(super) fn check_layer_pub(d: usize, l: usize) -> Result<(), FamilyError> {
    check_layer(d, l)
}

fn check_layer(d: usize, l: usize) -> Result<(), FamilyError> {
    check_dim(d)?;
    let max = layer_count(d);
    if l == 0 || l > max {
        return Err(FamilyError::LayerOutOfRange { d, l, max });
    }
    Ok(())
}

fn fourier<T: Real>(d: usize, k: usize, j: usize, shift: usize) -> Result<Vec<C<T>>, FamilyError> {
    if d < 3 || k + 1 > layer_count(d) || j >= d - 2 * k - 1 {
        return Err(FamilyError::IndexOutOfRange { d, k, j });
    }
    let m = d - 2 * k - 1;
    let mut v = vec![zero(); d];
    for t in k..=d - k - 2 {
        v[t + shift] = root_of_unity(m, j * (t - k));
    }
    Ok(v)
}

/// `Σ_{t=k}^{d−k−2} ω^{j(t−k)}|t⟩` with `ω = e^{2πi/(d−2k−1)}`.
pub fn eta<T: Real>(d: usize, k: usize, j: usize) -> Result<Vec<C<T>>, FamilyError> {
    fourier(d, k, j, 0)
}

/// [`eta`] shifted up one level: `Σ ω^{j(t−k)}|t+1⟩`.
pub fn xi<T: Real>(d: usize, k: usize, j: usize) -> Result<Vec<C<T>>, FamilyError> {
    fourier(d, k, j, 1)
}

fn level<T: Real>(d: usize, t: usize) -> Vec<C<T>> {
    let mut v = vec![zero(); d];
    v[t] = one();
    v
}

/// Single-party factor of a layer state. `Low` is level `k`, `High` is `d−l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Eta,
    Xi,
    Low,
    High,
}

impl Factor {
    fn is_fourier(self) -> bool {
        matches!(self, Factor::Eta | Factor::Xi)
    }

    fn vector<T: Real>(self, d: usize, l: usize, j: usize) -> Result<Vec<C<T>>, FamilyError> {
        let k = l - 1;
        match self {
            Factor::Eta => eta(d, k, j),
            Factor::Xi => xi(d, k, j),
            Factor::Low => Ok(level(d, k)),
            Factor::High => Ok(level(d, d - l)),
        }
    }
}

fn product<T: Real>(d: usize, l: usize, factors: [Factor; 4], phases: [usize; 4]) -> Result<Ket<T>, FamilyError> {
    let v: Vec<Vec<C<T>>> =
        factors.iter().zip(phases).map(|(f, j)| f.vector(d, l, j)).collect::<Result<_, _>>()?;
    Ok(tensor4(&v[0], &v[1], &v[2], &v[3])?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubsetId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D8,
}

impl SubsetId {
    pub const ALL: [SubsetId; 16] = [
        SubsetId::C1,
        SubsetId::C2,
        SubsetId::C3,
        SubsetId::C4,
        SubsetId::C5,
        SubsetId::C6,
        SubsetId::C7,
        SubsetId::C8,
        SubsetId::D1,
        SubsetId::D2,
        SubsetId::D3,
        SubsetId::D4,
        SubsetId::D5,
        SubsetId::D6,
        SubsetId::D7,
        SubsetId::D8,
    ];

    pub fn factors(self) -> [Factor; 4] {
        use Factor::*;
        match self {
            SubsetId::C1 => [Eta, Low, Low, Low],
            SubsetId::C2 => [Low, Xi, High, High],
            SubsetId::C3 => [Low, Low, Xi, High],
            SubsetId::C4 => [Low, Low, Low, Xi],
            SubsetId::C5 => [Eta, Xi, Eta, Low],
            SubsetId::C6 => [Eta, Xi, High, Eta],
            SubsetId::C7 => [Eta, Low, Xi, Eta],
            SubsetId::C8 => [Low, Xi, Eta, Xi],
            SubsetId::D1 => [Xi, High, High, High],
            SubsetId::D2 => [High, Eta, Low, Low],
            SubsetId::D3 => [High, High, Eta, Low],
            SubsetId::D4 => [High, High, High, Eta],
            SubsetId::D5 => [Xi, Eta, Xi, High],
            SubsetId::D6 => [Xi, Eta, Low, Xi],
            SubsetId::D7 => [Xi, High, Eta, Xi],
            SubsetId::D8 => [High, Eta, Xi, Eta],
        }
    }

    /// Number of Fourier-indexed parties (1 or 3).
    pub fn arity(self) -> usize {
        self.factors().iter().filter(|f| f.is_fourier()).count()
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SubsetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubsetId::ALL.into_iter().find(|id| id.to_string() == s).ok_or_else(|| format!("unknown subset {s:?}"))
    }
}

/// The two product subsets merged with `ψ₋ᵢ` into the i-th block (i = 1..8).
pub const U_PAIRS: [(SubsetId, SubsetId); 8] = [
    (SubsetId::C1, SubsetId::D2),
    (SubsetId::C2, SubsetId::D1),
    (SubsetId::C3, SubsetId::C4),
    (SubsetId::D3, SubsetId::D4),
    (SubsetId::C5, SubsetId::C8),
    (SubsetId::C6, SubsetId::C7),
    (SubsetId::D5, SubsetId::D8),
    (SubsetId::D6, SubsetId::D7),
];

/// Members of a product subset of layer `l`, each tagged with its phase tuple
/// (one entry per Fourier-indexed party, in party order). The all-zero tuple
/// is excluded; tuples run lexicographically.
pub fn build_subset<T: Real>(d: usize, l: usize, id: SubsetId) -> Result<Vec<(Vec<usize>, Ket<T>)>, FamilyError> {
    check_layer(d, l)?;
    let m = d - 2 * l + 1;
    let factors = id.factors();
    let slots: Vec<usize> = (0..4).filter(|&p| factors[p].is_fourier()).collect();
    let total = m.pow(slots.len() as u32);
    let mut out = Vec::with_capacity(total - 1);
    for code in 1..total {
        let mut js = vec![0; slots.len()];
        let mut rest = code;
        for j in js.iter_mut().rev() {
            *j = rest % m;
            rest /= m;
        }
        let mut phases = [0; 4];
        for (&p, &j) in slots.iter().zip(&js) {
            phases[p] = j;
        }
        out.push((js, product(d, l, factors, phases)?));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

fn psi_terms(i: usize) -> Option<([Factor; 4], [Factor; 4])> {
    use Factor::*;
    Some(match i {
        1 => ([Eta, Low, Low, Low], [High, Eta, Low, Low]),
        2 => ([Low, Xi, High, High], [Xi, High, High, High]),
        3 => ([Low, Low, Xi, High], [Low, Low, Low, Xi]),
        4 => ([High, High, Eta, Low], [High, High, High, Eta]),
        5 => ([Eta, Xi, Eta, Low], [Low, Xi, Eta, Xi]),
        6 => ([Eta, Xi, High, Eta], [Eta, Low, Xi, Eta]),
        7 => ([Xi, Eta, Xi, High], [High, Eta, Xi, Eta]),
        8 => ([Xi, Eta, Low, Xi], [Xi, High, Eta, Xi]),
        _ => return None,
    })
}

/// `ψ±ᵢ` of layer `l`: the zero-phase members of the two subsets of block
/// `i`, added or subtracted. Unnormalized, all amplitudes ±1.
pub fn build_psi<T: Real>(d: usize, l: usize, i: usize, sign: Sign) -> Result<Ket<T>, FamilyError> {
    check_layer(d, l)?;
    let (first, second) = psi_terms(i).ok_or(FamilyError::PsiIndexOutOfRange(i))?;
    let mut k = product(d, l, first, [0; 4])?;
    let s = match sign {
        Sign::Plus => one(),
        Sign::Minus => -one::<T>(),
    };
    k.add_scaled(s, &product(d, l, second, [0; 4])?)?;
    Ok(k)
}

fn phi<T: Real>(d: usize, j: usize) -> Vec<C<T>> {
    let mut v = vec![zero(); d];
    v[d / 2 - 1] = one();
    v[d / 2] = if j == 0 { one() } else { -one::<T>() };
    v
}

/// Center products `φ_{j1}⊗φ_{j2}⊗φ_{j3}⊗φ_{j4}` over `Z₂⁴∖{0}` with
/// `φ_j = |d/2−1⟩ + (−1)^j|d/2⟩`; empty for odd `d`.
pub fn build_center<T: Real>(d: usize) -> Result<Vec<([usize; 4], Ket<T>)>, FamilyError> {
    check_dim(d)?;
    if d % 2 == 1 {
        return Ok(Vec::new());
    }
    (1..16usize)
        .map(|code| {
            let j = [code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1];
            Ok((j, tensor4(&phi(d, j[0]), &phi(d, j[1]), &phi(d, j[2]), &phi(d, j[3]))?))
        })
        .collect()
}

/// The center state left out of the basis: `|(d−1)/2⟩^⊗4` for odd `d`,
/// `(|d/2−1⟩+|d/2⟩)^⊗4` for even `d` (unnormalized).
pub fn center_point_state<T: Real>(d: usize) -> Result<Ket<T>, FamilyError> {
    check_dim(d)?;
    let f = if d % 2 == 1 { level(d, (d - 1) / 2) } else { phi(d, 0) };
    Ok(tensor4(&f, &f, &f, &f)?)
}

/// All-ones product state over every basis ket.
pub fn build_stopper<T: Real>(d: usize) -> Result<Ket<T>, FamilyError> {
    check_dim(d)?;
    let f = vec![one(); d];
    Ok(tensor4(&f, &f, &f, &f)?)
}

fn phase_label(js: &[usize]) -> String {
    js.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("-")
}

/// The full biseparable basis: per layer the eight blocks (two product
/// subsets plus `ψ₋ᵢ`), then the center products (even `d`), then the stopper.
pub fn build_ubb<T: Real>(d: usize) -> Result<StateFamily<T>, FamilyError> {
    check_dim(d)?;
    let mut fam = StateFamily::new(d);
    for l in 1..=layer_count(d) {
        for (i, (a, b)) in U_PAIRS.iter().enumerate() {
            for id in [*a, *b] {
                let subset = id.to_string();
                for (js, ket) in build_subset(d, l, id)? {
                    let label = format!("psi_{id}_l{l}_j{}", phase_label(&js));
                    fam.add(label, Role::UbbMember, Some(l), Some(&subset), ket)?;
                }
            }
            let ket = build_psi(d, l, i + 1, Sign::Minus)?;
            fam.add(format!("psiMinus_U{}_l{l}", i + 1), Role::UbbMember, Some(l), Some(&format!("U{}", i + 1)), ket)?;
        }
    }
    let center_layer = layer_count(d) + 1;
    for (j, ket) in build_center(d)? {
        let label = format!("center_j{}", phase_label(&j));
        fam.add(label, Role::CenterState, Some(center_layer), Some("center"), ket)?;
    }
    fam.add("stopper", Role::StopperState, None, None, build_stopper(d)?)?;
    Ok(fam)
}

/// `ψ₊ᵢ` for every layer and block (unnormalized).
pub fn psi_plus_family<T: Real>(d: usize) -> Result<StateFamily<T>, FamilyError> {
    check_dim(d)?;
    let mut fam = StateFamily::new(d);
    for l in 1..=layer_count(d) {
        for i in 1..=8 {
            let ket = build_psi(d, l, i, Sign::Plus)?;
            fam.add(format!("psiPlus_U{i}_l{l}"), Role::PsiPlus, Some(l), Some(&format!("U{i}")), ket)?;
        }
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::tensor::inner;

    fn close(a: &[C<f64>], b: &[C<f64>]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn eta_xi_examples() {
        let one = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        assert!(close(&eta::<f64>(3, 0, 0).unwrap(), &[one, one, z]));
        assert!(close(&eta::<f64>(3, 0, 1).unwrap(), &[one, -one, z]));
        assert!(close(&xi::<f64>(3, 0, 1).unwrap(), &[z, one, -one]));
        assert!(close(&eta::<f64>(5, 1, 1).unwrap(), &[z, one, -one, z, z]));
        let w = root_of_unity::<f64>(3, 1);
        let w2 = root_of_unity::<f64>(3, 2);
        assert!(close(&eta::<f64>(6, 1, 1).unwrap(), &[z, one, w, w2, z, z]));
        assert!(close(&xi::<f64>(6, 1, 2).unwrap(), &[z, z, one, w2, w, z]));
        assert!(eta::<f64>(5, 2, 0).is_err());
        assert!(eta::<f64>(5, 1, 2).is_err());
    }

    #[test]
    fn subset_sizes() {
        assert_eq!(build_subset::<f64>(3, 1, SubsetId::C5).unwrap().len(), 7);
        assert_eq!(build_subset::<f64>(3, 1, SubsetId::C1).unwrap().len(), 1);
        assert_eq!(build_subset::<f64>(5, 1, SubsetId::D8).unwrap().len(), 63);
        assert_eq!(build_subset::<f64>(5, 2, SubsetId::D8).unwrap().len(), 7);
        assert_eq!(build_subset::<f64>(6, 2, SubsetId::C2).unwrap().len(), 2);
        assert!(matches!(
            build_subset::<f64>(3, 2, SubsetId::C1),
            Err(FamilyError::LayerOutOfRange { d: 3, l: 2, max: 1 })
        ));
    }

    #[test]
    fn c1_member_for_qutrits() {
        let (js, k) = build_subset::<f64>(3, 1, SubsetId::C1).unwrap().remove(0);
        assert_eq!(js, vec![1]);
        let expected = Ket::from_terms(3, [([0, 0, 0, 0], c(1.0, 0.0)), ([1, 0, 0, 0], c(-1.0, 0.0))]).unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn psi_minus_u1_for_qutrits() {
        let k = build_psi::<f64>(3, 1, 1, Sign::Minus).unwrap();
        let expected = Ket::from_terms(
            3,
            [
                ([0, 0, 0, 0], c(1.0, 0.0)),
                ([1, 0, 0, 0], c(1.0, 0.0)),
                ([2, 0, 0, 0], c(-1.0, 0.0)),
                ([2, 1, 0, 0], c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn psi_plus_u5_for_qutrits() {
        // ξ₊ on 2, η₊ on 3, (00+01+10+20) on parties 4,1
        let k = build_psi::<f64>(3, 1, 5, Sign::Plus).unwrap();
        assert_eq!(k.len(), 16);
        for i2 in 1..3 {
            for i3 in 0..2 {
                for (i4, i1) in [(0, 0), (0, 1), (1, 0), (2, 0)] {
                    assert_eq!(k.amplitude(&[i1, i2, i3, i4]), c(1.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn psi_norms() {
        for d in 3..8 {
            for l in 1..=layer_count(d) {
                let m = (d - 2 * l + 1) as f64;
                let k = build_psi::<f64>(d, l, 1, Sign::Plus).unwrap();
                assert!((k.norm() - (2.0 * m).sqrt()).abs() < 1e-12);
                let k5 = build_psi::<f64>(d, l, 5, Sign::Minus).unwrap();
                assert!((k5.norm_sqr() - 2.0 * m.powi(3)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn center_products() {
        assert!(build_center::<f64>(3).unwrap().is_empty());
        let c4 = build_center::<f64>(4).unwrap();
        assert_eq!(c4.len(), 15);
        let c6 = build_center::<f64>(6).unwrap();
        assert!(c6.iter().all(|(_, k)| k.support().all(|idx| idx.iter().all(|&i| i == 2 || i == 3))));
    }

    #[test]
    fn stopper_overlaps() {
        let s = build_stopper::<f64>(3).unwrap();
        assert_eq!(s.len(), 81);
        let m = build_psi::<f64>(3, 1, 1, Sign::Minus).unwrap();
        let p = build_psi::<f64>(3, 1, 1, Sign::Plus).unwrap();
        assert!(inner(&s, &m).unwrap().norm() < 1e-15);
        assert!((inner(&s, &p).unwrap() - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ubb_counts() {
        for (d, n) in [(3, 73), (4, 248), (5, 609), (6, 1280)] {
            let fam = build_ubb::<f64>(d).unwrap();
            assert_eq!(fam.len(), n, "d = {d}");
            assert_eq!(fam.len() + 8 * layer_count(d), d.pow(4));
        }
    }

    #[test]
    fn layers_live_in_their_shells() {
        let d = 7;
        let fam = build_ubb::<f64>(d).unwrap();
        for m in fam.with_role(Role::UbbMember) {
            let l = m.layer.unwrap();
            for idx in m.ket.support() {
                let inside = |lo: usize, hi: usize| idx.iter().all(|&i| i >= lo && i <= hi);
                assert!(inside(l - 1, d - l), "{}", m.label);
                assert!(!inside(l, d - l - 1), "{}", m.label);
            }
        }
    }
}
