use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TensorError;

/// Subset of the parties {1, 2, 3, 4}, stored as a bitmask (bit p-1 for party p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PartySet(u8);

impl PartySet {
    pub const ALL: PartySet = PartySet(0b1111);
    pub const EMPTY: PartySet = PartySet(0);

    pub fn from_mask(mask: u8) -> Result<Self, TensorError> {
        if mask & !0b1111 != 0 {
            return Err(TensorError::InvalidParties(format!("mask {mask:#b}")));
        }
        Ok(Self(mask))
    }

    /// From 1-based party labels.
    pub fn from_parties(parties: &[usize]) -> Result<Self, TensorError> {
        let mut mask = 0u8;
        for &p in parties {
            if !(1..=4).contains(&p) {
                return Err(TensorError::InvalidParties(format!("party {p}")));
            }
            mask |= 1 << (p - 1);
        }
        Ok(Self(mask))
    }

    pub fn single(party: usize) -> Result<Self, TensorError> {
        Self::from_parties(&[party])
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn contains(self, party: usize) -> bool {
        (1..=4).contains(&party) && self.0 & (1 << (party - 1)) != 0
    }

    /// 1-based parties in increasing order.
    pub fn parties(self) -> Vec<usize> {
        (1..=4).filter(|&p| self.contains(p)).collect()
    }

    /// 0-based slots in increasing order.
    pub(crate) fn slots(self) -> Vec<usize> {
        (0..4).filter(|&s| self.0 & (1 << s) != 0).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self) -> Self {
        Self(!self.0 & 0b1111)
    }

    /// Dimension of the joint space of these parties.
    pub fn dim(self, d: usize) -> usize {
        d.pow(self.len() as u32)
    }
}

impl fmt::Display for PartySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.parties() {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Split of the four parties into two nonempty groups `A|B`.
///
/// Row side of a matricization is group A. Two values describing the same
/// split with the sides swapped compare unequal; use [`Bipartition::canonical`]
/// (group A contains party 1) when comparing splits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    group_a: PartySet,
}

impl Bipartition {
    pub fn new(group_a: PartySet) -> Result<Self, TensorError> {
        if group_a.is_empty() || group_a == PartySet::ALL {
            return Err(TensorError::InvalidParties(format!(
                "group {{{group_a}}} is not a nonempty proper subset"
            )));
        }
        Ok(Self { group_a })
    }

    pub fn from_parties(group_a: &[usize]) -> Result<Self, TensorError> {
        Self::new(PartySet::from_parties(group_a)?)
    }

    /// The seven canonical splits: 1|234, 12|34, 13|24, 14|23, 123|4, 124|3, 134|2.
    pub fn all() -> [Bipartition; 7] {
        [0b0001, 0b0011, 0b0101, 0b1001, 0b0111, 0b1011, 0b1101]
            .map(|m| Bipartition { group_a: PartySet(m) })
    }

    /// The four single-party cuts i|rest, written with party i first.
    pub fn single_party_cuts() -> [Bipartition; 4] {
        [0b0001, 0b0010, 0b0100, 0b1000].map(|m| Bipartition { group_a: PartySet(m) })
    }

    pub fn group_a(self) -> PartySet {
        self.group_a
    }

    pub fn group_b(self) -> PartySet {
        self.group_a.complement()
    }

    pub fn complement(self) -> Self {
        Self { group_a: self.group_a.complement() }
    }

    pub fn canonical(self) -> Self {
        if self.group_a.contains(1) {
            self
        } else {
            self.complement()
        }
    }

    pub fn is_canonical(self) -> bool {
        self.group_a.contains(1)
    }

    /// Same split, ignoring which side is listed first.
    pub fn same_split(self, other: Bipartition) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.group_a, self.group_b())
    }
}

impl FromStr for Bipartition {
    type Err = TensorError;

    /// Accepts `"12|34"`, `"23|41"`, `"1|234"`; the digits after the bar
    /// must be exactly the complement of those before it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TensorError::InvalidParties(s.to_string());
        let (a, b) = s.split_once('|').ok_or_else(bad)?;
        let parse = |part: &str| -> Result<PartySet, TensorError> {
            let parties = part
                .chars()
                .map(|ch| ch.to_digit(10).map(|v| v as usize).ok_or_else(bad))
                .collect::<Result<Vec<_>, _>>()?;
            let set = PartySet::from_parties(&parties)?;
            if set.len() != parties.len() {
                return Err(bad());
            }
            Ok(set)
        };
        let (a, b) = (parse(a.trim())?, parse(b.trim())?);
        if a.complement() != b {
            return Err(bad());
        }
        Bipartition::new(a)
    }
}

impl Serialize for Bipartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bipartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
