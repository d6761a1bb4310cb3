//! Sturm bounds for congruence subgroups.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::forms::character::prime_factors;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CongruenceGroup {
    Gamma0,
    Gamma1,
    /// A subgroup given only by its index in `SL_2(Z)`.
    Custom(u64),
}

impl fmt::Display for CongruenceGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CongruenceGroup::Gamma0 => write!(f, "g0"),
            CongruenceGroup::Gamma1 => write!(f, "g1"),
            CongruenceGroup::Custom(k) => write!(f, "custom:{k}"),
        }
    }
}

impl FromStr for CongruenceGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "g0" | "gamma0" => Ok(CongruenceGroup::Gamma0),
            "g1" | "gamma1" => Ok(CongruenceGroup::Gamma1),
            _ => s
                .strip_prefix("custom:")
                .and_then(|k| k.parse().ok())
                .filter(|k| *k > 0)
                .map(CongruenceGroup::Custom)
                .ok_or_else(|| format!("unknown group {s:?}; expected g0, g1 or custom:<index>")),
        }
    }
}

/// A Sturm bound together with the data it was computed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmBound {
    pub level: u64,
    pub weight: u64,
    pub group: CongruenceGroup,
    pub index: u64,
    pub bound: u64,
}

/// Index in `SL_2(Z)`: `N prod (1 + 1/p)` for `Gamma_0(N)` and
/// `N^2 prod (1 - 1/p^2)` for `Gamma_1(N)`.
pub fn group_index(level: u64, group: CongruenceGroup) -> u64 {
    let primes = prime_factors(level);
    match group {
        CongruenceGroup::Gamma0 => primes.iter().fold(level, |acc, p| acc / p * (p + 1)),
        CongruenceGroup::Gamma1 => primes.iter().fold(level * level, |acc, p| acc / (p * p) * (p * p - 1)),
        CongruenceGroup::Custom(k) => k,
    }
}

/// `ceil(weight * index / 12)`.
pub fn sturm_bound(level: u64, weight: u64, group: CongruenceGroup) -> SturmBound {
    let index = group_index(level, group);
    SturmBound { level, weight, group, index, bound: (weight * index).div_ceil(12) }
}

/// Index by orbit enumeration under the generators `S` and `T` of `SL_2(Z)`.
///
/// `Gamma_1(N)` is the stabilizer of the bottom row `(0, 1)` modulo `N`, and
/// `Gamma_0(N)` the stabilizer of the point `(0 : 1)` of `P^1(Z/N)`, so the
/// orbit sizes are the indices.
pub fn coset_count(level: u64, group: CongruenceGroup) -> u64 {
    let n = level as i64;
    let canon = |c: i64, d: i64| -> (i64, i64) {
        let (c, d) = (c.rem_euclid(n), d.rem_euclid(n));
        match group {
            CongruenceGroup::Gamma1 | CongruenceGroup::Custom(_) => (c, d),
            CongruenceGroup::Gamma0 => (1..=n.max(1))
                .filter(|u| u.gcd(&n) == 1)
                .map(|u| ((u * c).rem_euclid(n), (u * d).rem_euclid(n)))
                .min()
                .unwrap(),
        }
    };
    let start = canon(0, 1);
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((c, d)) = queue.pop_front() {
        for next in [canon(d, -c), canon(c, c + d)] {
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    seen.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_from_formula() {
        assert_eq!(group_index(49, CongruenceGroup::Gamma0), 56);
        assert_eq!(group_index(30, CongruenceGroup::Gamma1), 576);
        assert_eq!(group_index(243, CongruenceGroup::Gamma0), 324);
        assert_eq!(group_index(1, CongruenceGroup::Gamma1), 1);
    }

    #[test]
    fn bounds_round_up() {
        assert_eq!(sturm_bound(243, 8, CongruenceGroup::Gamma0).bound, 216);
        assert_eq!(sturm_bound(11, 2, CongruenceGroup::Gamma0).bound, 2);
        assert_eq!(sturm_bound(120, 8, CongruenceGroup::Gamma1).bound, 6144);
        assert_eq!(sturm_bound(7, 2, CongruenceGroup::Custom(13)).bound, 3);
    }

    #[test]
    fn enumeration_matches_small_levels() {
        for n in 1..=20 {
            for g in [CongruenceGroup::Gamma0, CongruenceGroup::Gamma1] {
                assert_eq!(coset_count(n, g), group_index(n, g), "N={n} {g}");
            }
        }
    }

    #[test]
    fn parses_group_names() {
        assert_eq!("g0".parse(), Ok(CongruenceGroup::Gamma0));
        assert_eq!("custom:24".parse(), Ok(CongruenceGroup::Custom(24)));
        assert!("custom:0".parse::<CongruenceGroup>().is_err());
        assert!("g2".parse::<CongruenceGroup>().is_err());
    }
}
