//! Homogeneous relations among three cusp forms.
//!
//! The search evaluates every monomial of a given degree at the basis,
//! collects one linear equation per exponent up to the Sturm bound, and
//! returns the exact kernel.

pub mod nullspace;
pub mod psi;
pub mod sturm;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{monomials, HomogeneousPolynomial, Monomial};
use crate::ring::Rationals;
use crate::series::{evaluate_form, QSeries, SeriesError, TruncatedSeries, VanishingOrder};
use nullspace::Echelon;

pub use psi::{psi_certificate, PsiCertificate, PsiStatus};
pub use sturm::{coset_count, group_index, sturm_bound, CongruenceGroup, SturmBound};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("series known to q^{available} but q^{needed} is required")]
    InsufficientPrecision { needed: usize, available: usize },
    #[error("relation degree must be positive")]
    ZeroDegree,
    #[error("psi denominator vanishes to the available precision")]
    DegenerateDenominator,
    #[error("psi numerator vanishes to the available precision")]
    DegenerateNumerator,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Degree 4 with a one-dimensional kernel.
    UniqueQuartic,
    /// Degree 4 with a kernel of dimension at least two (the basis lies on a
    /// conic).
    HyperellipticSignature,
    /// No relation up to the bound.
    None,
    /// Relations exist in a degree other than 4.
    OverDetermined,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationResult {
    pub degree: usize,
    pub bound: usize,
    pub dimension: usize,
    pub classification: Classification,
    /// Normalized kernel basis.
    pub nullspace: Vec<HomogeneousPolynomial>,
    /// Set when the leading-order profile alone excluded any relation.
    pub excluded_by_profile: bool,
}

impl RelationResult {
    /// The relation when the kernel is one-dimensional.
    pub fn unique(&self) -> Option<&HomogeneousPolynomial> {
        (self.dimension == 1).then(|| &self.nullspace[0])
    }
}

/// Leading exponent of each monomial, given the vanishing orders of the basis.
pub fn monomial_order_profile(orders: [usize; 3], degree: usize) -> Vec<(Monomial, usize)> {
    monomials(degree)
        .into_iter()
        .map(|m| (m, m.0 as usize * orders[0] + m.1 as usize * orders[1] + m.2 as usize * orders[2]))
        .collect()
}

/// True when two monomials share a leading exponent.
pub fn profile_has_collision(profile: &[(Monomial, usize)]) -> bool {
    let mut seen = std::collections::HashSet::new();
    profile.iter().any(|(_, e)| !seen.insert(*e))
}

/// Series of every degree-`d` monomial, truncated to `bound`.
pub fn monomial_series(
    basis: &[QSeries; 3],
    degree: usize,
    bound: usize,
) -> Result<Vec<(Monomial, QSeries)>, RelationError> {
    let h: Vec<QSeries> = basis.iter().map(|s| s.truncate(bound)).collect();
    let mut layer: HashMap<Monomial, QSeries> = HashMap::new();
    layer.insert((1, 0, 0), h[0].clone());
    layer.insert((0, 1, 0), h[1].clone());
    layer.insert((0, 0, 1), h[2].clone());
    for d in 2..=degree {
        let next: Vec<(Monomial, QSeries)> = monomials(d)
            .into_iter()
            .map(|m| {
                // Peel off the last variable present to reuse a degree d-1 product.
                let (v, prev) = if m.2 > 0 {
                    (2, (m.0, m.1, m.2 - 1))
                } else if m.1 > 0 {
                    (1, (m.0, m.1 - 1, m.2))
                } else {
                    (0, (m.0 - 1, m.1, m.2))
                };
                let s = layer[&prev].mul(&h[v])?.truncate(bound);
                Ok((m, s))
            })
            .collect::<Result<_, RelationError>>()?;
        layer = next.into_iter().collect();
    }
    Ok(monomials(degree).into_iter().map(|m| (m, layer.remove(&m).unwrap())).collect())
}

/// Kernel of the monomial evaluation map on exponents `1..=bound`.
///
/// Requires every basis series to be known through `q^(bound + degree)`.
pub fn find_relation(basis: &[QSeries; 3], degree: usize, bound: usize) -> Result<RelationResult, RelationError> {
    if degree == 0 {
        return Err(RelationError::ZeroDegree);
    }
    let available = basis.iter().map(|s| s.trunc()).min().unwrap();
    if available < bound + degree {
        return Err(RelationError::InsufficientPrecision { needed: bound + degree, available });
    }
    let orders: Vec<VanishingOrder> = basis.iter().map(|s| s.vanishing_order()).collect();
    if let [Some(a), Some(b), Some(c)] = [orders[0].exact(), orders[1].exact(), orders[2].exact()] {
        let profile = monomial_order_profile([a, b, c], degree);
        if !profile_has_collision(&profile) {
            return Ok(RelationResult {
                degree,
                bound,
                dimension: 0,
                classification: Classification::None,
                nullspace: Vec::new(),
                excluded_by_profile: true,
            });
        }
    }
    let mons = monomial_series(basis, degree, bound)?;
    let mut echelon = Echelon::new(mons.len());
    for n in 1..=bound {
        if echelon.nullity() == 0 {
            break;
        }
        let row: Vec<_> = mons.iter().map(|(_, s)| s.coeff(n).expect("truncated to bound")).collect();
        echelon.push_rational(&row);
    }
    let nullspace: Vec<HomogeneousPolynomial> = echelon
        .kernel()
        .into_iter()
        .map(|v| {
            HomogeneousPolynomial::try_from_terms(degree, mons.iter().map(|(m, _)| *m).zip(v))
                .expect("monomials have the right degree")
                .normalized()
        })
        .collect();
    let dimension = nullspace.len();
    let classification = match (degree, dimension) {
        (_, 0) => Classification::None,
        (4, 1) => Classification::UniqueQuartic,
        (4, _) => Classification::HyperellipticSignature,
        _ => Classification::OverDetermined,
    };
    Ok(RelationResult { degree, bound, dimension, classification, nullspace, excluded_by_profile: false })
}

/// Evidence that `F(h1, h2, h3)` vanishes through the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingCertificate {
    pub bound: usize,
    pub vanishes: bool,
    /// First exponent at which `F(h)` is nonzero, if any up to the bound.
    pub first_nonzero: Option<usize>,
}

pub fn certify_vanishing(
    form: &HomogeneousPolynomial,
    basis: &[QSeries; 3],
    bound: usize,
) -> Result<VanishingCertificate, RelationError> {
    let available = basis.iter().map(|s| s.trunc()).min().unwrap();
    if available < bound {
        return Err(RelationError::InsufficientPrecision { needed: bound, available });
    }
    let h: Vec<TruncatedSeries<Rationals>> = basis.iter().map(|s| s.truncate(bound)).collect();
    let value = evaluate_form(form, &h)?;
    let first_nonzero = value.vanishing_order().exact().filter(|n| *n <= bound);
    Ok(VanishingCertificate { bound, vanishes: first_nonzero.is_none(), first_nonzero })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formal(m: usize) -> [QSeries; 3] {
        [QSeries::from_ints(&[1], m), QSeries::from_ints(&[0, 1], m), QSeries::from_ints(&[0, 0, 1], m)]
    }

    #[test]
    fn profile_collisions() {
        let p = monomial_order_profile([1, 2, 3], 4);
        assert!(profile_has_collision(&p));
        let x2y2 = p.iter().find(|(m, _)| *m == (2, 2, 0)).unwrap().1;
        let x3z = p.iter().find(|(m, _)| *m == (3, 0, 1)).unwrap().1;
        assert_eq!((x2y2, x3z), (6, 6));
        assert!(!profile_has_collision(&monomial_order_profile([1, 2, 6], 4)));
    }

    #[test]
    fn conic_relations_of_the_formal_basis() {
        let b = formal(40);
        let r2 = find_relation(&b, 2, 30).unwrap();
        assert_eq!(r2.dimension, 1);
        assert_eq!(r2.nullspace[0], "X*Z - Y^2".parse::<HomogeneousPolynomial>().unwrap());
        assert_eq!(find_relation(&b, 3, 30).unwrap().dimension, 3);
        let r4 = find_relation(&b, 4, 30).unwrap();
        assert_eq!(r4.dimension, 6);
        assert_eq!(r4.classification, Classification::HyperellipticSignature);
    }

    #[test]
    fn precision_precondition() {
        let b = formal(20);
        assert_eq!(
            find_relation(&b, 4, 18).unwrap_err(),
            RelationError::InsufficientPrecision { needed: 22, available: 20 }
        );
    }

    #[test]
    fn profile_guard_short_circuits() {
        let b = [
            QSeries::from_ints(&[1, 3], 30),
            QSeries::from_ints(&[0, 1, 2], 30),
            QSeries::from_ints(&[0, 0, 0, 0, 0, 1], 30),
        ];
        let r = find_relation(&b, 4, 20).unwrap();
        assert!(r.excluded_by_profile);
        assert_eq!(r.classification, Classification::None);
    }

    #[test]
    fn certificate_detects_failure() {
        let b = formal(30);
        let conic: HomogeneousPolynomial = "X*Z - Y^2".parse().unwrap();
        assert!(certify_vanishing(&conic, &b, 25).unwrap().vanishes);
        let wrong: HomogeneousPolynomial = "X*Z - 2*Y^2".parse().unwrap();
        let c = certify_vanishing(&wrong, &b, 25).unwrap();
        assert_eq!(c.first_nonzero, Some(4));
    }
}
