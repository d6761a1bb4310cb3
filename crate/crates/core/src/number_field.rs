//! Number fields of degree at most three in a power basis.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ring::{integerize, q, rational_sqrt, Ring, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("defining polynomial has degree {0}; supported degrees are 1 to 3")]
    UnsupportedDegree(usize),
    #[error("defining polynomial {0} is reducible over Q")]
    Reducible(String),
    #[error("element has {got} coordinates, field degree is {expected}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug)]
struct FieldData {
    /// Monic defining polynomial, constant term first.
    poly: Vec<Q>,
    /// `Tr(x^k)` for `k < 2 * degree`.
    power_traces: Vec<Q>,
}

/// `Q[x] / (p(x))` for an irreducible monic `p` of degree 1 to 3.
#[derive(Clone, Debug)]
pub struct NumberField(Arc<FieldData>);

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.poly == other.0.poly
    }
}

/// Coordinates on the power basis `1, x, x^2, ...`.
pub type NfElem = Vec<Q>;

impl NumberField {
    /// Coefficients are given highest degree first; the polynomial is made
    /// monic.
    pub fn new(high_first: &[Q]) -> Result<Self, FieldError> {
        let start = high_first.iter().position(|c| !c.is_zero()).unwrap_or(high_first.len());
        let coeffs = &high_first[start..];
        let degree = coeffs.len().saturating_sub(1);
        if !(1..=3).contains(&degree) {
            return Err(FieldError::UnsupportedDegree(degree));
        }
        if !is_irreducible(coeffs) {
            return Err(FieldError::Reducible(format_poly(coeffs)));
        }
        let lead = coeffs[0].clone();
        let poly: Vec<Q> = coeffs.iter().rev().map(|c| c / &lead).collect();
        let power_traces = newton_power_sums(&poly, 2 * degree);
        Ok(NumberField(Arc::new(FieldData { poly, power_traces })))
    }

    pub fn rationals() -> Self {
        Self::new(&[q(1), q(0)]).expect("x is irreducible")
    }

    pub fn degree(&self) -> usize {
        self.0.poly.len() - 1
    }

    /// Monic defining polynomial, highest degree first.
    pub fn poly_high_first(&self) -> Vec<Q> {
        self.0.poly.iter().rev().cloned().collect()
    }

    pub fn elem(&self, coords: Vec<Q>) -> Result<NfElem, FieldError> {
        if coords.len() != self.degree() {
            return Err(FieldError::Dimension { expected: self.degree(), got: coords.len() });
        }
        Ok(coords)
    }

    pub fn from_rational(&self, r: Q) -> NfElem {
        let mut v = vec![Q::zero(); self.degree()];
        v[0] = r;
        v
    }

    /// The generator `x` (equal to a rational when the degree is 1).
    pub fn generator(&self) -> NfElem {
        if self.degree() == 1 {
            return self.from_rational(-self.0.poly[0].clone());
        }
        let mut v = vec![Q::zero(); self.degree()];
        v[1] = Q::one();
        v
    }

    pub fn is_rational(&self, a: &NfElem) -> bool {
        a[1..].iter().all(|c| c.is_zero())
    }

    pub fn nf_mul(&self, a: &NfElem, b: &NfElem) -> NfElem {
        let n = self.degree();
        let mut prod = vec![Q::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for k in (n..prod.len()).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for i in 0..n {
                prod[k - n + i] -= &c * &self.0.poly[i];
            }
        }
        prod.truncate(n);
        prod
    }

    pub fn trace(&self, a: &NfElem) -> Q {
        a.iter().zip(&self.0.power_traces).map(|(c, t)| c * t).sum()
    }

    pub fn pow(&self, a: &NfElem, e: u32) -> NfElem {
        let mut r = self.one();
        for _ in 0..e {
            r = self.nf_mul(&r, a);
        }
        r
    }

    /// Characteristic polynomial of multiplication by `a`, monic, highest
    /// degree first.
    pub fn charpoly(&self, a: &NfElem) -> Vec<Q> {
        let n = self.degree();
        let mut p = Vec::with_capacity(n);
        let mut x = a.clone();
        for _ in 0..n {
            p.push(self.trace(&x));
            x = self.nf_mul(&x, a);
        }
        // Newton's identities: k e_k = sum_{i=1}^k (-1)^(i-1) e_{k-i} p_i.
        let mut e = vec![Q::one()];
        for k in 1..=n {
            let mut s = Q::zero();
            for i in 1..=k {
                let t = &e[k - i] * &p[i - 1];
                if i % 2 == 1 {
                    s += t;
                } else {
                    s -= t;
                }
            }
            e.push(s / q(k as i64));
        }
        e.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() }).collect()
    }

    /// Solve `sum_i c_i b_i = a` for coordinates `c` on the basis `b` (which
    /// must span the field).
    pub fn coordinates_on(&self, basis: &[NfElem], a: &NfElem) -> Option<Vec<Q>> {
        let n = self.degree();
        // Columns are basis vectors.
        let mut m: Vec<Vec<Q>> = (0..n)
            .map(|r| {
                let mut row: Vec<Q> = basis.iter().map(|b| b[r].clone()).collect();
                row.push(a[r].clone());
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !m[r][c].is_zero())?;
            m.swap(c, p);
            let inv = Q::one() / &m[c][c];
            for x in m[c].iter_mut() {
                *x *= &inv;
            }
            let pivot = m[c].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != c && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x -= &f * y;
                    }
                }
            }
        }
        Some(m.into_iter().map(|row| row[n].clone()).collect())
    }

    /// A square root of the rational `n` inside the field, if one exists.
    ///
    /// In a quadratic field `x^2 + b x + c` the element `2x + b` squares to
    /// the discriminant `D`, so `sqrt(n) = r (2x + b)` whenever `n / D = r^2`.
    pub fn sqrt_rational(&self, n: &Q) -> Option<NfElem> {
        if let Some(r) = rational_sqrt(n) {
            return Some(self.from_rational(r));
        }
        if self.degree() != 2 || n.is_zero() {
            return None;
        }
        let (c, b) = (&self.0.poly[0], &self.0.poly[1]);
        let disc = b * b - q(4) * c;
        let r = rational_sqrt(&(n / &disc))?;
        Some(vec![&r * b, &r * q(2)])
    }

    /// The primitive `o`-th roots of unity contained in the field.
    pub fn roots_of_unity(&self, o: u64) -> Vec<NfElem> {
        match o {
            1 => vec![self.one()],
            2 => vec![self.from_rational(q(-1))],
            3 | 4 | 6 => {
                // Roots of x^2 + s x + t with (s, t) = (1, 1), (0, 1), (-1, 1).
                let s = match o {
                    3 => q(1),
                    4 => q(0),
                    _ => q(-1),
                };
                let Some(root) = self.sqrt_rational(&(&s * &s - q(4))) else {
                    return Vec::new();
                };
                let half = Q::new(BigInt::one(), BigInt::from(2));
                let base = self.from_rational(-&s * &half);
                let r: NfElem = root.iter().map(|x| x * &half).collect();
                vec![self.add(&base, &r), self.sub(&base, &r)]
            }
            _ => Vec::new(),
        }
    }

    pub fn format_elem(&self, a: &NfElem) -> String {
        let mut parts = Vec::new();
        for (k, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match k {
                0 => format!("{c}"),
                1 => format!("({c})*y"),
                _ => format!("({c})*y^{k}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[y]/({})", format_poly(&self.poly_high_first()))
    }
}

impl Ring for NumberField {
    type Elem = NfElem;

    fn zero(&self) -> NfElem {
        vec![Q::zero(); self.degree()]
    }
    fn one(&self) -> NfElem {
        self.from_rational(Q::one())
    }
    fn is_zero(&self, a: &NfElem) -> bool {
        a.iter().all(|c| c.is_zero())
    }
    fn add(&self, a: &NfElem, b: &NfElem) -> NfElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn neg(&self, a: &NfElem) -> NfElem {
        a.iter().map(|x| -x).collect()
    }
    fn mul(&self, a: &NfElem, b: &NfElem) -> NfElem {
        self.nf_mul(a, b)
    }
    fn from_integer(&self, n: &BigInt) -> NfElem {
        self.from_rational(Q::from_integer(n.clone()))
    }
}

/// Power sums `p_k = Tr(x^k)`, `k = 0 .. count`, for a monic polynomial
/// given constant term first.
fn newton_power_sums(poly: &[Q], count: usize) -> Vec<Q> {
    let n = poly.len() - 1;
    // a[i] is the coefficient of x^(n-i).
    let a: Vec<Q> = poly.iter().rev().cloned().collect();
    let mut p = vec![q(n as i64)];
    for k in 1..count {
        let mut s = Q::zero();
        for i in 1..k.min(n + 1) {
            s -= &a[i] * &p[k - i];
        }
        if k <= n {
            s -= q(k as i64) * &a[k];
        }
        p.push(s);
    }
    p
}

/// Discriminant of a polynomial of degree 1 to 3, highest degree first.
pub fn poly_disc(high_first: &[Q]) -> Q {
    match high_first.len() {
        2 => Q::one(),
        3 => {
            let (a, b, c) = (&high_first[0], &high_first[1], &high_first[2]);
            b * b - q(4) * a * c
        }
        4 => {
            let (a, b, c, d) = (&high_first[0], &high_first[1], &high_first[2], &high_first[3]);
            b * b * c * c - q(4) * a * c * c * c - q(4) * b * b * b * d - q(27) * a * a * d * d + q(18) * a * b * c * d
        }
        n => panic!("discriminant of degree {} not supported", n.saturating_sub(1)),
    }
}

/// Irreducibility over Q for degree at most three (rational root test).
pub fn is_irreducible(high_first: &[Q]) -> bool {
    let (ints, _) = integerize(high_first);
    let start = ints.iter().position(|c| !c.is_zero()).unwrap_or(ints.len());
    let ints = &ints[start..];
    let degree = ints.len().saturating_sub(1);
    if degree == 0 {
        return false;
    }
    if degree == 1 {
        return true;
    }
    assert!(degree <= 3, "irreducibility test limited to degree 3");
    let constant = ints.last().unwrap();
    if constant.is_zero() {
        return false;
    }
    let lead = &ints[0];
    for num in divisors(constant) {
        for den in divisors(lead) {
            for sign in [1i64, -1] {
                let r = Q::new(BigInt::from(sign) * &num, den.clone());
                let v = ints.iter().fold(Q::zero(), |acc, c| acc * &r + Q::from_integer(c.clone()));
                if v.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out
}

pub fn format_poly(high_first: &[Q]) -> String {
    let n = high_first.len().saturating_sub(1);
    let mut parts = Vec::new();
    for (i, c) in high_first.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = n - i;
        parts.push(match e {
            0 => format!("{c}"),
            1 => format!("{c}*y"),
            _ => format!("{c}*y^{e}"),
        });
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::qf;

    fn field(c: &[i64]) -> NumberField {
        NumberField::new(&c.iter().map(|x| q(*x)).collect::<Vec<_>>()).unwrap()
    }

    /// Matrix of multiplication by `a` (columns are images of basis vectors).
    fn mult_matrix(k: &NumberField, a: &NfElem) -> Vec<Vec<Q>> {
        let n = k.degree();
        let cols: Vec<NfElem> = (0..n)
            .map(|j| {
                let mut e = vec![Q::zero(); n];
                e[j] = Q::one();
                k.nf_mul(a, &e)
            })
            .collect();
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    #[test]
    fn trace_of_square() {
        let k = field(&[1, 2, -1]);
        let y = k.generator();
        assert_eq!(k.trace(&k.nf_mul(&y, &y)), q(6));
    }

    #[test]
    fn discriminants() {
        assert_eq!(poly_disc(&[q(1), q(0), q(-1), q(0)]), q(4));
        assert_eq!(poly_disc(&[q(1), q(0), q(0), q(5)]), q(-27 * 25));
        assert_eq!(poly_disc(&[q(1), q(0), q(-3), q(-1)]), q(81));
    }

    #[test]
    fn reducible_polynomials_are_rejected() {
        assert!(matches!(NumberField::new(&[q(1), q(0), q(-1)]), Err(FieldError::Reducible(_))));
        assert!(matches!(NumberField::new(&[q(1), q(0), q(-1), q(0)]), Err(FieldError::Reducible(_))));
        assert!(matches!(NumberField::new(&[q(1), q(0), q(0), q(0), q(1)]), Err(FieldError::UnsupportedDegree(4))));
        assert!(is_irreducible(&[q(1), q(0), q(-3), q(-1)]));
        assert!(!is_irreducible(&[q(2), q(-1), q(0)]));
    }

    #[test]
    fn multiplication_matches_matrix_representation() {
        let k = field(&[1, -1, -6, -2]);
        let a = vec![q(1), qf(-2, 3), q(5)];
        let b = vec![q(-4), q(1), qf(1, 2)];
        let m = mult_matrix(&k, &a);
        let expect: Vec<Q> = (0..3).map(|i| (0..3).map(|j| &m[i][j] * &b[j]).sum()).collect();
        assert_eq!(k.nf_mul(&a, &b), expect);
        let tr: Q = (0..3).map(|i| m[i][i].clone()).sum();
        assert_eq!(k.trace(&a), tr);
    }

    #[test]
    fn charpoly_annihilates_element() {
        let k = field(&[1, 0, -3, -1]);
        let a = vec![q(-1), q(1), q(0)];
        let cp = k.charpoly(&a);
        let mut acc = k.zero();
        for c in &cp {
            acc = k.add(&k.nf_mul(&acc, &a), &k.from_rational(c.clone()));
        }
        assert!(k.is_zero(&acc));
        assert_eq!(cp, vec![q(1), q(3), q(0), q(-3)]);
    }

    #[test]
    fn roots_of_unity_in_quadratic_fields() {
        let k = field(&[1, 1, 1]);
        let roots = k.roots_of_unity(3);
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_eq!(k.pow(r, 3), k.one());
            assert_ne!(r, &k.one());
        }
        let gauss = field(&[1, 0, 1]);
        assert_eq!(gauss.roots_of_unity(4).len(), 2);
        assert!(gauss.roots_of_unity(3).is_empty());
        let sqrt = gauss.sqrt_rational(&q(-4)).unwrap();
        assert_eq!(gauss.nf_mul(&sqrt, &sqrt), gauss.from_rational(q(-4)));
    }

    #[test]
    fn coordinates_on_power_basis_of_element() {
        let k = field(&[1, 0, -3, -1]);
        let a = vec![q(-1), q(1), q(0)];
        let basis = vec![k.one(), a.clone(), k.nf_mul(&a, &a)];
        let target = vec![q(2), q(-1), q(3)];
        let c = k.coordinates_on(&basis, &target).unwrap();
        let back = (0..3).fold(k.zero(), |acc, i| k.add(&acc, &basis[i].iter().map(|x| x * &c[i]).collect::<Vec<_>>()));
        assert_eq!(back, target);
    }
}
