//! Univariate polynomials and determinants over a field.

use num_traits::{One, Zero};

use crate::ring::{inv_mod, PrimeField, Rationals, Ring, Q};

/// A ring in which nonzero elements can be inverted.
pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

impl Field for Rationals {
    fn inv(&self, a: &Q) -> Q {
        Q::one() / a
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.modulus())
    }
}

/// Coefficients constant term first, without trailing zeros.
pub type UPoly<E> = Vec<E>;

pub fn trim<K: Field>(k: &K, mut p: UPoly<K::Elem>) -> UPoly<K::Elem> {
    while p.last().is_some_and(|c| k.is_zero(c)) {
        p.pop();
    }
    p
}

pub fn add<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> UPoly<K::Elem> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => k.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(k, out)
}

pub fn sub<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> UPoly<K::Elem> {
    let nb: Vec<K::Elem> = b.iter().map(|x| k.neg(x)).collect();
    add(k, a, &nb)
}

pub fn mul<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> UPoly<K::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    trim(k, out)
}

/// Exact quotient `a / b`; the remainder must vanish.
pub fn div_exact<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> UPoly<K::Elem> {
    let b = trim(k, b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(k, a.to_vec());
    if r.len() < b.len() {
        assert!(r.is_empty(), "inexact polynomial division");
        return Vec::new();
    }
    let inv = k.inv(b.last().unwrap());
    let mut quot = vec![k.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = k.mul(r.last().unwrap(), &inv);
        for (i, y) in b.iter().enumerate() {
            r[shift + i] = k.sub(&r[shift + i], &k.mul(&c, y));
        }
        quot[shift] = c;
        r = trim(k, r);
    }
    assert!(r.is_empty(), "inexact polynomial division");
    trim(k, quot)
}

/// Determinant of a square matrix of polynomials by Bareiss elimination.
pub fn poly_det<K: Field>(k: &K, mut m: Vec<Vec<UPoly<K::Elem>>>) -> UPoly<K::Elem> {
    let n = m.len();
    let mut negate = false;
    let mut prev: UPoly<K::Elem> = vec![k.one()];
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_empty()) else {
            return Vec::new();
        };
        if p != c {
            m.swap(p, c);
            negate = !negate;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                let t = sub(k, &mul(k, &m[i][j], &m[c][c]), &mul(k, &m[i][c], &m[c][j]));
                m[i][j] = div_exact(k, &t, &prev);
            }
            m[i][c] = Vec::new();
        }
        prev = m[c][c].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.iter().map(|x| k.neg(x)).collect()
    } else {
        d
    }
}

/// Determinant over the field by Gaussian elimination.
pub fn det<K: Field>(k: &K, mut m: Vec<Vec<K::Elem>>) -> K::Elem {
    let n = m.len();
    let mut acc = k.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !k.is_zero(&m[r][c])) else {
            return k.zero();
        };
        if p != c {
            m.swap(p, c);
            acc = k.neg(&acc);
        }
        let inv = k.inv(&m[c][c]);
        acc = k.mul(&acc, &m[c][c]);
        for i in c + 1..n {
            if k.is_zero(&m[i][c]) {
                continue;
            }
            let f = k.mul(&m[i][c], &inv);
            let (top, rest) = m.split_at_mut(i);
            for (x, y) in rest[0][c..n].iter_mut().zip(&top[c][c..n]) {
                *x = k.sub(x, &k.mul(&f, y));
            }
        }
    }
    acc
}

/// Sylvester matrix of two coefficient lists given highest degree first.
pub fn sylvester<E: Clone>(a: &[E], b: &[E], zero: E) -> Vec<Vec<E>> {
    let (n, m) = (a.len() - 1, b.len() - 1);
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for i in 0..m {
        let mut r = vec![zero.clone(); size];
        r[i..i + n + 1].clone_from_slice(a);
        rows.push(r);
    }
    for i in 0..n {
        let mut r = vec![zero.clone(); size];
        r[i..i + m + 1].clone_from_slice(b);
        rows.push(r);
    }
    rows
}

pub fn is_zero_poly<E: Zero>(p: &[E]) -> bool {
    p.iter().all(|c| c.is_zero())
}
