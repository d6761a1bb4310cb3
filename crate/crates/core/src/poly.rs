//! Ternary forms with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ring::{integerize, residue, Q};

/// Exponents of `X^i Y^j Z^k`.
pub type Monomial = (u32, u32, u32);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("term {0:?} does not have degree {1}")]
    Degree(Monomial, usize),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// A homogeneous polynomial in `X, Y, Z`.
///
/// Terms iterate in graded-lex order with `X > Y > Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogeneousPolynomial {
    degree: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

/// All monomials of degree `d`, in graded-lex order.
pub fn monomials(d: usize) -> Vec<Monomial> {
    let d = d as u32;
    let mut out = Vec::new();
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push((i, j, d - i - j));
        }
    }
    out
}

impl HomogeneousPolynomial {
    pub fn zero(degree: usize) -> Self {
        HomogeneousPolynomial { degree, terms: BTreeMap::new() }
    }

    /// Panics if a term has the wrong degree; use [`Self::try_from_terms`] for
    /// untrusted input.
    pub fn from_terms(degree: usize, terms: &[(Monomial, i64)]) -> Self {
        let terms = terms.iter().map(|(m, c)| (*m, BigInt::from(*c))).collect::<Vec<_>>();
        Self::try_from_terms(degree, terms).expect("terms of the stated degree")
    }

    pub fn try_from_terms(
        degree: usize,
        terms: impl IntoIterator<Item = (Monomial, BigInt)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(degree);
        for (m, c) in terms {
            if (m.0 + m.1 + m.2) as usize != degree {
                return Err(PolyError::Degree(m, degree));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        let e = self.terms.entry(m).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: Monomial) -> BigInt {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Divide by the content and make the first coefficient positive.
    pub fn normalized(&self) -> Self {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let lead_neg = self.terms().next().map(|(_, c)| c.is_negative()).unwrap_or(false);
        let g = if lead_neg { -g } else { g };
        HomogeneousPolynomial { degree: self.degree, terms: self.terms.iter().map(|(m, c)| (*m, c / &g)).collect() }
    }

    pub fn is_normalized(&self) -> bool {
        self.is_zero() || (self.content().is_one() && self.terms().next().unwrap().1.is_positive())
    }

    pub fn neg(&self) -> Self {
        HomogeneousPolynomial { degree: self.degree, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    /// Equality up to an overall sign.
    pub fn eq_up_to_sign(&self, other: &Self) -> bool {
        self == other || *self == other.neg()
    }

    /// Partial derivative with respect to variable `v` (0 = X, 1 = Y, 2 = Z).
    pub fn partial(&self, v: usize) -> Self {
        let mut out = Self::zero(self.degree.saturating_sub(1));
        for (&(i, j, k), c) in &self.terms {
            let e = [i, j, k];
            if e[v] == 0 {
                continue;
            }
            let mut f = e;
            f[v] -= 1;
            out.add_term((f[0], f[1], f[2]), c * BigInt::from(e[v]));
        }
        out
    }

    /// `F((X, Y, Z) * M^T)`, scaled to a normalized integral form.
    pub fn substitute(&self, m: &[[Q; 3]; 3]) -> Self {
        let acc = self.substitute_raw(m);
        let (keys, vals): (Vec<_>, Vec<_>) = acc.into_iter().unzip();
        let (ints, _) = integerize(&vals);
        Self::try_from_terms(self.degree, keys.into_iter().zip(ints))
            .expect("substitution preserves degree")
            .normalized()
    }

    /// `F((X, Y, Z) * M^T)` for an integer matrix, without rescaling.
    pub fn compose(&self, m: &[[i64; 3]; 3]) -> Self {
        let mq = m.map(|row| row.map(|x| Q::from_integer(x.into())));
        let mut out = Self::zero(self.degree);
        for (mono, c) in self.substitute_raw(&mq) {
            out.add_term(mono, c.to_integer());
        }
        out
    }

    fn substitute_raw(&self, m: &[[Q; 3]; 3]) -> BTreeMap<Monomial, Q> {
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        let linear: Vec<BTreeMap<Monomial, Q>> = (0..3)
            .map(|r| {
                let mut l = BTreeMap::new();
                for (c, e) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)].into_iter().enumerate() {
                    if !m[r][c].is_zero() {
                        l.insert(e, m[r][c].clone());
                    }
                }
                l
            })
            .collect();
        for (&(i, j, k), c) in &self.terms {
            let mut t: BTreeMap<Monomial, Q> = BTreeMap::from([((0, 0, 0), Q::from_integer(c.clone()))]);
            for (v, e) in [i, j, k].into_iter().enumerate() {
                for _ in 0..e {
                    t = mul_sparse(&t, &linear[v]);
                }
            }
            for (mono, x) in t {
                let e = acc.entry(mono).or_insert_with(Q::zero);
                *e += x;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        acc
    }

    /// Coefficients reduced modulo `p`, zero terms dropped.
    pub fn reduce_mod(&self, p: u64) -> Vec<(Monomial, u64)> {
        self.terms().map(|(m, c)| (*m, residue(c, p))).filter(|(_, c)| *c != 0).collect()
    }

    /// List of `[i, j, k, c]` rows in graded-lex order.
    pub fn to_rows(&self) -> Vec<(u32, u32, u32, BigInt)> {
        self.terms().map(|(&(i, j, k), c)| (i, j, k, c.clone())).collect()
    }
}

fn mul_sparse(a: &BTreeMap<Monomial, Q>, b: &BTreeMap<Monomial, Q>) -> BTreeMap<Monomial, Q> {
    let mut out: BTreeMap<Monomial, Q> = BTreeMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = (ma.0 + mb.0, ma.1 + mb.1, ma.2 + mb.2);
            let e = out.entry(m).or_insert_with(Q::zero);
            *e += ca * cb;
        }
    }
    out
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(i, j, k), c)) in self.terms().enumerate() {
            let a = c.abs();
            match (n, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = Vec::new();
            if !a.is_one() {
                parts.push(a.to_string());
            }
            for (v, e) in ["X", "Y", "Z"].iter().zip([i, j, k]) {
                match e {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    _ => parts.push(format!("{v}^{e}")),
                }
            }
            if parts.is_empty() {
                parts.push("1".into());
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl FromStr for HomogeneousPolynomial {
    type Err = PolyError;

    /// Accepts sums of terms such as `3*X^2*Y^2 - x y^3 + 7Z^4`; factors may be
    /// separated by `*`, spaces, or nothing.
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let bad = || PolyError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let compact = compact.strip_suffix("=0").unwrap_or(&compact);
        if compact.is_empty() {
            return Err(bad());
        }
        let mut raw: Vec<(Monomial, BigInt)> = Vec::new();
        let chars: Vec<char> = compact.chars().collect();
        let mut pos = 0;
        while pos < chars.len() {
            let mut sign = BigInt::one();
            if chars[pos] == '+' || chars[pos] == '-' {
                if chars[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            } else if pos > 0 {
                return Err(bad());
            }
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let coef: BigInt = if pos > start {
                chars[start..pos].iter().collect::<String>().parse().map_err(|_| bad())?
            } else {
                BigInt::one()
            };
            let mut e = [0u32; 3];
            let mut any = pos > start;
            while pos < chars.len() && !matches!(chars[pos], '+' | '-') {
                let v = match chars[pos].to_ascii_uppercase() {
                    'X' => 0,
                    'Y' => 1,
                    'Z' => 2,
                    _ => return Err(bad()),
                };
                pos += 1;
                let mut power = 1;
                if pos < chars.len() && chars[pos] == '^' {
                    pos += 1;
                    let s0 = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    power = chars[s0..pos].iter().collect::<String>().parse().map_err(|_| bad())?;
                }
                e[v] += power;
                any = true;
            }
            if !any {
                return Err(bad());
            }
            raw.push(((e[0], e[1], e[2]), sign * coef));
        }
        let degree = raw.iter().map(|(m, _)| (m.0 + m.1 + m.2) as usize).max().unwrap_or(0);
        Self::try_from_terms(degree, raw)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Text(String),
}

impl Serialize for HomogeneousPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(u32, u32, u32, IntRepr)> = self
            .to_rows()
            .into_iter()
            .map(|(i, j, k, c)| {
                let r = i64::try_from(&c).map(IntRepr::Small).unwrap_or(IntRepr::Text(c.to_string()));
                (i, j, k, r)
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<(u32, u32, u32, IntRepr)> = Vec::deserialize(d)?;
        let degree = rows.first().map(|r| (r.0 + r.1 + r.2) as usize).unwrap_or(0);
        let mut terms = Vec::with_capacity(rows.len());
        for (i, j, k, c) in rows {
            let c = match c {
                IntRepr::Small(n) => BigInt::from(n),
                IntRepr::Text(t) => t.parse().map_err(D::Error::custom)?,
            };
            terms.push(((i, j, k), c));
        }
        Self::try_from_terms(degree, terms).map_err(D::Error::custom)
    }
}
