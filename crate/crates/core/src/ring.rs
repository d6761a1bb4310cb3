//! Coefficient rings used by truncated series.
//!
//! A ring is a context value (zero-sized for the rationals, a shared minimal
//! polynomial for number fields, a modulus for prime fields) that performs
//! arithmetic on plain element values.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

/// Exact rational numbers.
pub type Q = BigRational;

/// Arithmetic context for series coefficients.
#[allow(clippy::wrong_self_convention)]
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_integer(&self, n: &BigInt) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_integer(&BigInt::from(n))
    }

    /// Cauchy product restricted to exponents `1..=len`.
    ///
    /// `a[i]` is the coefficient of `q^(i+1)`; entries of the result follow the
    /// same convention.
    fn convolve(&self, a: &[Self::Elem], b: &[Self::Elem], len: usize) -> Vec<Self::Elem> {
        (1..=len)
            .into_par_iter()
            .map(|n| {
                let mut acc = self.zero();
                let lo = n.saturating_sub(b.len()).max(1);
                let hi = (n - 1).min(a.len());
                for i in lo..=hi {
                    let (x, y) = (&a[i - 1], &b[n - i - 1]);
                    if !self.is_zero(x) && !self.is_zero(y) {
                        acc = self.add(&acc, &self.mul(x, y));
                    }
                }
                acc
            })
            .collect()
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = Q;

    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::one()
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn neg(&self, a: &Q) -> Q {
        -a
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a * b
    }
    fn sub(&self, a: &Q, b: &Q) -> Q {
        a - b
    }
    fn from_integer(&self, n: &BigInt) -> Q {
        Q::from_integer(n.clone())
    }

    fn convolve(&self, a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
        let (ai, da) = integerize(a);
        let (bi, db) = integerize(b);
        let c = int_convolve(&ai, &bi, len);
        let d = da * db;
        if d.is_one() {
            c.into_iter().map(Q::from_integer).collect()
        } else {
            c.into_iter().map(|x| Q::new(x, d.clone())).collect()
        }
    }
}

/// Scale a rational vector to integers; returns the scaled vector and the
/// common denominator.
pub fn integerize(v: &[Q]) -> (Vec<BigInt>, BigInt) {
    let d = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let out = v.iter().map(|x| if d.is_one() { x.numer().clone() } else { x.numer() * (&d / x.denom()) }).collect();
    (out, d)
}

fn int_convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let bits = |v: &[BigInt]| v.iter().map(|x| x.bits()).max().unwrap_or(0);
    let terms = 64 - (a.len().min(b.len()) as u64 + 1).leading_zeros() as u64;
    if bits(a) <= 63 && bits(b) <= 63 && bits(a) + bits(b) + terms <= 126 {
        let a: Vec<i128> = a.iter().map(|x| x.to_i128().unwrap()).collect();
        let b: Vec<i128> = b.iter().map(|x| x.to_i128().unwrap()).collect();
        return (1..=len)
            .into_par_iter()
            .map(|n| {
                let lo = n.saturating_sub(b.len()).max(1);
                let hi = (n - 1).min(a.len());
                let mut acc: i128 = 0;
                for i in lo..=hi {
                    acc += a[i - 1] * b[n - i - 1];
                }
                BigInt::from(acc)
            })
            .collect();
    }
    (1..=len)
        .into_par_iter()
        .map(|n| {
            let lo = n.saturating_sub(b.len()).max(1);
            let hi = (n - 1).min(a.len());
            let mut acc = BigInt::zero();
            for i in lo..=hi {
                let (x, y) = (&a[i - 1], &b[n - i - 1]);
                if !x.is_zero() && !y.is_zero() {
                    acc += x * y;
                }
            }
            acc
        })
        .collect()
}

/// The prime field `F_p`, elements stored as residues in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// `p` must be prime and below `2^32`.
    pub fn new(p: u64) -> Self {
        assert!((2..(1 << 32)).contains(&p), "modulus out of range");
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, q: &Q) -> Option<u64> {
        let n = residue(q.numer(), self.p);
        let d = residue(q.denom(), self.p);
        if d == 0 {
            return None;
        }
        Some(n * inv_mod(d, self.p) % self.p)
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn from_integer(&self, n: &BigInt) -> u64 {
        residue(n, self.p)
    }
}

/// Least non-negative residue of `n` modulo `p`.
pub fn residue(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

/// Inverse of `a` modulo the prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Rational square root, if `q` is a square in `Q`.
pub fn rational_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Q::new(n, d))
}

/// Parse a decimal rational such as `-3`, `7/12`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Serde helpers writing rationals as strings such as `"-3/2"`.
pub mod qstr {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Q};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let t = String::deserialize(d)?;
        parse_rational(&t).ok_or_else(|| D::Error::custom(format!("invalid rational {t:?}")))
    }

    pub mod array {
        use serde::{de::Error, ser::SerializeTuple, Deserialize, Deserializer, Serializer};

        use super::super::{parse_rational, Q};

        pub fn serialize<S: Serializer, const N: usize>(v: &[Q; N], s: S) -> Result<S::Ok, S::Error> {
            let mut t = s.serialize_tuple(N)?;
            for q in v {
                t.serialize_element(&q.to_string())?;
            }
            t.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[Q; N], D::Error> {
            let v: Vec<String> = Vec::deserialize(d)?;
            let qs: Vec<Q> = v
                .iter()
                .map(|t| parse_rational(t).ok_or_else(|| D::Error::custom(format!("invalid rational {t:?}"))))
                .collect::<Result<_, _>>()?;
            qs.try_into().map_err(|_| D::Error::custom(format!("expected {N} rationals")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
        (1..=len)
            .map(|n| {
                let mut acc = Q::zero();
                for i in 1..n {
                    if i <= a.len() && n - i <= b.len() {
                        acc += &a[i - 1] * &b[n - i - 1];
                    }
                }
                acc
            })
            .collect()
    }

    #[test]
    fn rational_fast_path_matches_naive_product() {
        let a: Vec<Q> = (1..40).map(|i| qf(i * i - 7, (i % 5) + 1)).collect();
        let b: Vec<Q> = (1..30).map(|i| qf(3 - i, (i % 3) + 1)).collect();
        assert_eq!(Rationals.convolve(&a, &b, 60), naive(&a, &b, 60));
    }

    #[test]
    fn big_integer_fallback_matches_naive_product() {
        let big = Q::from_integer(BigInt::from(1u8) << 100);
        let a = vec![big.clone(), q(3), -big.clone()];
        let b = vec![q(1), big.clone(), q(-2)];
        assert_eq!(Rationals.convolve(&a, &b, 6), naive(&a, &b, 6));
    }

    #[test]
    fn prime_field_reduction_and_inverse() {
        let f = PrimeField::new(7);
        assert_eq!(f.reduce(&qf(1, 3)), Some(5));
        assert_eq!(f.reduce(&qf(1, 7)), None);
        assert_eq!(f.mul(&3, &inv_mod(3, 7)), 1);
        assert_eq!(f.from_i64(-1), 6);
    }

    #[test]
    fn parses_and_roots_rationals() {
        assert_eq!(parse_rational("-7/12"), Some(qf(-7, 12)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(rational_sqrt(&qf(9, 4)), Some(qf(3, 2)));
        assert_eq!(rational_sqrt(&q(2)), None);
    }
}
