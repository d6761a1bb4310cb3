//! Points of plane curves over prime fields.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::smooth::{smooth_mod_p, Ternary};
use crate::poly::HomogeneousPolynomial;
use crate::ring::PrimeField;

/// Number of points of `F = 0` in `P^2(F_p)`.
pub fn count_points(f: &HomogeneousPolynomial, p: u64) -> u64 {
    let t = Ternary::from_poly(PrimeField::new(p), f);
    if t.is_zero() {
        return p * p + p + 1;
    }
    let (zero, one) = (0u64, 1u64);
    let at_infinity =
        u64::from(t.eval([&one, &zero, &zero]) == 0) + (0..p).filter(|x| t.eval([x, &one, &zero]) == 0).count() as u64;
    let affine: u64 =
        (0..p).into_par_iter().map(|x| (0..p).filter(|y| t.eval([&x, y, &one]) == 0).count() as u64).sum();
    at_infinity + affine
}

/// A point count compared with the value predicted by Hecke eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCount {
    pub p: u64,
    pub count: u64,
    /// `p + 1 - sum of traces of a_p`, when the traces are known.
    pub expected: Option<i64>,
    pub consistent: Option<bool>,
    /// Whether the reduction modulo `p` is certified nonsingular.
    pub smooth_mod_p: bool,
    /// `|count - p - 1| <= 2 g sqrt(p)`; only asserted when the reduction is
    /// nonsingular.
    pub hasse_weil: Option<bool>,
}

impl PointCount {
    /// `trace` is the sum over the factors of multiplicity times `Tr(a_p)`.
    pub fn new(f: &HomogeneousPolynomial, p: u64, trace: Option<&BigInt>) -> Self {
        let count = count_points(f, p);
        let expected = trace.and_then(|t| (BigInt::from(p + 1) - t).to_i64());
        let consistent = expected.map(|e| e == count as i64);
        let d = f.degree() as f64;
        let genus = (d - 1.0) * (d - 2.0) / 2.0;
        let dev = (count as f64 - p as f64 - 1.0).abs();
        let smooth = smooth_mod_p(f, p).is_some();
        let hasse_weil = smooth.then(|| dev <= 2.0 * genus * (p as f64).sqrt() + 1e-9);
        PointCount { p, count, expected, consistent, smooth_mod_p: smooth, hasse_weil }
    }
}

/// Primes below `limit` not dividing `level` at which the model is smooth.
pub fn good_primes(f: &HomogeneousPolynomial, level: u64, limit: u64) -> Vec<u64> {
    (2..limit)
        .filter(|&p| crate::forms::character::is_prime(p) && !level.is_multiple_of(p))
        .filter(|&p| smooth_mod_p(f, p).is_some())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conic_has_p_plus_one_points() {
        let f: HomogeneousPolynomial = "X*Z - Y^2".parse().unwrap();
        for p in [2, 3, 5, 7, 11] {
            assert_eq!(count_points(&f, p), p + 1);
        }
    }

    #[test]
    fn fermat_quartic_mod_5() {
        // x^4 is 0 or 1 on F_5, so x^4 + y^4 + z^4 = 0 has no nonzero solution.
        let f: HomogeneousPolynomial = "X^4 + Y^4 + Z^4".parse().unwrap();
        assert_eq!(count_points(&f, 5), 0);
    }

    #[test]
    fn klein_quartic_counts() {
        // Primes inert in Q(sqrt(-7)) give p + 1 points.
        let f: HomogeneousPolynomial = "X^3*Y + Y^3*Z + Z^3*X".parse().unwrap();
        for p in [3, 5, 13, 17] {
            let c = PointCount::new(&f, p, None);
            assert_eq!(c.count, p + 1, "p = {p}");
            assert_eq!(c.hasse_weil, Some(true));
        }
    }

    #[test]
    fn good_primes_skip_level_and_bad_reduction() {
        let f: HomogeneousPolynomial = "X^3*Y + Y^3*Z + Z^3*X".parse().unwrap();
        let g = good_primes(&f, 49, 30);
        assert!(!g.contains(&7));
        assert!(g.contains(&29));
    }
}
