//! Dirichlet characters described by exponent codes on local generators.
//!
//! For an odd prime power `p^a` the code is one exponent `e` in
//! `[0, phi(p^a))`, meaning `eps(g) = exp(2 pi i e / phi(p^a))` on the least
//! positive generator `g` of `(Z/p^a)^*`. For `4` the single exponent gives the
//! value at `-1`. For `2^a` with `a >= 3` there are two exponents: the value at
//! `-1` (denominator 2) and at `5` (denominator `2^(a-2)`). Modulus `2` has no
//! exponents.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharacterError {
    #[error("exponent {value} out of range [0, {bound}) at {prime_power}")]
    Range { prime_power: String, value: u64, bound: u64 },
    #[error("level {level} needs {expected} character exponents, got {got}")]
    Arity { level: u64, expected: usize, got: usize },
    #[error("{0} shares a factor with the modulus")]
    NotCoprime(u64),
}

/// Local data at one prime power `p^alpha` dividing the level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharComponent {
    pub p: u64,
    pub alpha: u32,
    pub exponents: Vec<u64>,
}

impl CharComponent {
    pub fn prime_power(&self) -> u64 {
        self.p.pow(self.alpha)
    }

    /// Denominators of the exponents (the orders of the local generators).
    pub fn denominators(&self) -> Vec<u64> {
        match (self.p, self.alpha) {
            (2, 1) => vec![],
            (2, 2) => vec![2],
            (2, a) => vec![2, 1 << (a - 2)],
            (p, a) => vec![(p - 1) * p.pow(a - 1)],
        }
    }

    fn order(&self) -> u64 {
        self.exponents.iter().zip(self.denominators()).fold(1, |acc, (e, d)| acc.lcm(&(d / e.gcd(&d))))
    }

    /// Discrete logarithms of `n` on the local generators.
    fn logs(&self, n: u64) -> Vec<u64> {
        let m = self.prime_power();
        let n = n % m;
        match (self.p, self.alpha) {
            (2, 1) => vec![],
            (2, 2) => vec![u64::from(n % 4 == 3)],
            (2, _) => {
                let neg = n % 4 == 3;
                let u = if neg { m - n } else { n };
                vec![u64::from(neg), dlog(5, u, m)]
            }
            _ => vec![dlog(primitive_root(self.p, self.alpha), n, m)],
        }
    }
}

/// Smallest positive generator of `(Z/p^a)^*` for an odd prime `p`.
pub fn primitive_root(p: u64, alpha: u32) -> u64 {
    let m = p.pow(alpha);
    let phi = (p - 1) * p.pow(alpha - 1);
    let factors = prime_factors(phi);
    (2..m)
        .find(|&g| g % p != 0 && factors.iter().all(|q| crate::ring::pow_mod(g, phi / q, m) != 1))
        .expect("odd prime powers have primitive roots")
}

fn dlog(g: u64, n: u64, m: u64) -> u64 {
    let mut x = 1 % m;
    let mut k = 0;
    loop {
        if x == n % m {
            return k;
        }
        x = x * g % m;
        k += 1;
        assert!(k <= m, "{n} is not a power of {g} modulo {m}");
    }
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Prime factorization `[(p, alpha)]` in increasing order of `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut a = 0;
            while n.is_multiple_of(p) {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// A Dirichlet character modulo the level, one component per prime power.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirichletCharacterCode {
    level: u64,
    components: Vec<CharComponent>,
}

impl DirichletCharacterCode {
    pub fn trivial(level: u64) -> Self {
        let components = factorize(level)
            .into_iter()
            .map(|(p, alpha)| {
                let mut c = CharComponent { p, alpha, exponents: vec![] };
                c.exponents = vec![0; c.denominators().len()];
                c
            })
            .collect();
        DirichletCharacterCode { level, components }
    }

    /// Build from the flattened exponent list used in labels (prime powers in
    /// increasing order, modulus 2 omitted).
    pub fn from_flat(level: u64, flat: &[u64]) -> Result<Self, CharacterError> {
        let mut code = Self::trivial(level);
        let expected: usize = code.components.iter().map(|c| c.exponents.len()).sum();
        if flat.len() != expected {
            return Err(CharacterError::Arity { level, expected, got: flat.len() });
        }
        let mut it = flat.iter();
        for c in &mut code.components {
            for e in c.exponents.iter_mut() {
                *e = *it.next().unwrap();
            }
        }
        code.validate()?;
        Ok(code)
    }

    pub fn from_components(level: u64, components: Vec<CharComponent>) -> Result<Self, CharacterError> {
        let code = DirichletCharacterCode { level, components };
        let shape = Self::trivial(level);
        let same_shape = shape.components.len() == code.components.len()
            && shape
                .components
                .iter()
                .zip(&code.components)
                .all(|(a, b)| a.p == b.p && a.alpha == b.alpha && a.exponents.len() == b.exponents.len());
        if !same_shape {
            let got = code.components.iter().map(|c| c.exponents.len()).sum();
            let expected = shape.components.iter().map(|c| c.exponents.len()).sum();
            return Err(CharacterError::Arity { level, expected, got });
        }
        code.validate()?;
        Ok(code)
    }

    fn validate(&self) -> Result<(), CharacterError> {
        for c in &self.components {
            for (e, d) in c.exponents.iter().zip(c.denominators()) {
                if *e >= d {
                    return Err(CharacterError::Range {
                        prime_power: format!("{}^{}", c.p, c.alpha),
                        value: *e,
                        bound: d,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn components(&self) -> &[CharComponent] {
        &self.components
    }

    pub fn flat(&self) -> Vec<u64> {
        self.components.iter().flat_map(|c| c.exponents.iter().copied()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(|c| c.exponents.iter().all(|e| *e == 0))
    }

    pub fn order(&self) -> u64 {
        self.components.iter().fold(1, |acc, c| acc.lcm(&c.order()))
    }

    /// `r` in `[0, 1)` with `eps(n) = exp(2 pi i r)`.
    pub fn value(&self, n: u64) -> Result<Q, CharacterError> {
        if n.gcd(&self.level) != 1 {
            return Err(CharacterError::NotCoprime(n));
        }
        let mut r = Q::zero();
        for c in &self.components {
            for ((e, d), k) in c.exponents.iter().zip(c.denominators()).zip(c.logs(n)) {
                r += Q::new(BigInt::from(e * k), BigInt::from(d));
            }
        }
        Ok(&r - r.floor())
    }

    /// `eps(n)` as an exponent `k` of a primitive `order()`-th root of unity.
    pub fn value_exponent(&self, n: u64) -> Result<u64, CharacterError> {
        let r = self.value(n)? * Q::from_integer(BigInt::from(self.order()));
        debug_assert!(r.is_integer());
        Ok(u64::try_from(r.to_integer()).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::qf;

    #[test]
    fn value_at_generator_of_three() {
        let c = DirichletCharacterCode::from_flat(3, &[1]).unwrap();
        assert_eq!(c.value(2).unwrap(), qf(1, 2));
        assert_eq!(c.value(4).unwrap(), qf(0, 1));
    }

    #[test]
    fn flat_codes_follow_prime_power_order() {
        let c = DirichletCharacterCode::from_flat(120, &[0, 0, 0, 2]).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.value(7).unwrap(), qf(1, 2));
        assert_eq!(c.value(11).unwrap(), qf(0, 1));
        let d = DirichletCharacterCode::from_flat(24, &[0, 1, 0]).unwrap();
        assert_eq!(d.value(5).unwrap(), qf(1, 2));
        assert_eq!(d.value(7).unwrap(), qf(0, 1));
    }

    #[test]
    fn exponents_out_of_range_are_rejected() {
        assert!(matches!(DirichletCharacterCode::from_flat(49, &[42]), Err(CharacterError::Range { bound: 42, .. })));
        assert!(matches!(DirichletCharacterCode::from_flat(24, &[0, 2, 0]), Err(CharacterError::Range { .. })));
        assert!(matches!(DirichletCharacterCode::from_flat(30, &[0]), Err(CharacterError::Arity { .. })));
    }

    #[test]
    fn orders_of_table_characters() {
        let cases: [(u64, &[u64], u64); 6] =
            [(20, &[1, 1], 4), (39, &[0, 6], 2), (39, &[0, 4], 3), (45, &[2, 0], 3), (49, &[14], 3), (36, &[1, 3], 2)];
        for (n, flat, o) in cases {
            assert_eq!(DirichletCharacterCode::from_flat(n, flat).unwrap().order(), o, "{n} {flat:?}");
        }
    }

    #[test]
    fn character_is_multiplicative() {
        let c = DirichletCharacterCode::from_flat(120, &[1, 1, 1, 3]).unwrap();
        for a in 1..120u64 {
            for b in 1..120u64 {
                if a.gcd(&120) == 1 && b.gcd(&120) == 1 {
                    let lhs = c.value(a * b % 120).unwrap();
                    let s = c.value(a).unwrap() + c.value(b).unwrap();
                    assert_eq!(lhs, &s - s.floor());
                }
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3, 1), 2);
        assert_eq!(primitive_root(7, 2), 3);
        assert_eq!(primitive_root(5, 1), 2);
        assert_eq!(primitive_root(13, 1), 2);
    }
}
