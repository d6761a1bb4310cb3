//! Truncated q-expansions with exact coefficients.
//!
//! A series stores the coefficients of `q^1 .. q^M` and is known modulo
//! `q^(M+1)`; `M` is its truncation order. Arithmetic tracks how far each
//! result is reliable.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::HomogeneousPolynomial;
use crate::ring::{Rationals, Ring, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series are defined over different coefficient rings")]
    RingMismatch,
    #[error("degeneracy factor must be positive")]
    ZeroDegeneracy,
    #[error("form has {expected} variables but {got} series were supplied")]
    Arity { expected: usize, got: usize },
}

/// Position of the first nonzero coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VanishingOrder {
    /// The first nonzero coefficient sits at this exponent.
    Exact(usize),
    /// Every known coefficient vanishes; the value is the truncation order.
    BeyondTruncation(usize),
}

impl VanishingOrder {
    /// Lower bound for the true order (exact when known).
    pub fn at_least(self) -> usize {
        match self {
            VanishingOrder::Exact(n) => n,
            VanishingOrder::BeyondTruncation(m) => m + 1,
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            VanishingOrder::Exact(n) => Some(n),
            VanishingOrder::BeyondTruncation(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

/// Series with rational coefficients.
pub type QSeries = TruncatedSeries<Rationals>;

impl<R: Ring> TruncatedSeries<R> {
    /// `coeffs[i]` is the coefficient of `q^(i+1)`; the truncation order is
    /// `coeffs.len()`.
    pub fn new(ring: R, coeffs: Vec<R::Elem>) -> Self {
        TruncatedSeries { ring, coeffs }
    }

    pub fn zero(ring: R, trunc: usize) -> Self {
        let coeffs = vec![ring.zero(); trunc];
        TruncatedSeries { ring, coeffs }
    }

    /// Build from sparse `(exponent, coefficient)` terms. Terms past `trunc`
    /// are dropped.
    pub fn from_terms(ring: R, terms: &[(usize, R::Elem)], trunc: usize) -> Self {
        let mut s = Self::zero(ring, trunc);
        for (n, c) in terms {
            assert!(*n >= 1, "series have no constant term");
            if *n <= trunc {
                s.coeffs[n - 1] = s.ring.add(&s.coeffs[n - 1], c);
            }
        }
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    /// Coefficient of `q^n`, or `None` when `n` lies past the truncation.
    /// Exponent 0 is always zero.
    pub fn coeff(&self, n: usize) -> Option<R::Elem> {
        match n {
            0 => Some(self.ring.zero()),
            n if n <= self.coeffs.len() => Some(self.coeffs[n - 1].clone()),
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(SeriesError::RingMismatch)
        }
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let m = trunc.min(self.trunc());
        TruncatedSeries::new(self.ring.clone(), self.coeffs[..m].to_vec())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let m = self.trunc().min(other.trunc());
        let coeffs = (0..m).map(|i| self.ring.add(&self.coeffs[i], &other.coeffs[i])).collect();
        Ok(TruncatedSeries::new(self.ring.clone(), coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        TruncatedSeries::new(self.ring.clone(), coeffs)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|x| self.ring.mul(c, x)).collect();
        TruncatedSeries::new(self.ring.clone(), coeffs)
    }

    /// Product, known up to `min(M_a + ord b, M_b + ord a)` capped at
    /// `M_a + M_b`.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let (ma, mb) = (self.trunc(), other.trunc());
        let oa = self.vanishing_order().at_least();
        let ob = other.vanishing_order().at_least();
        let m = (ma + ob).min(mb + oa).min(ma + mb);
        let coeffs = self.ring.convolve(&self.coeffs, &other.coeffs, m);
        Ok(TruncatedSeries::new(self.ring.clone(), coeffs))
    }

    /// `q d/dq`: multiplies the n-th coefficient by n.
    pub fn theta(&self) -> Self {
        let coeffs =
            self.coeffs.iter().enumerate().map(|(i, c)| self.ring.mul(&self.ring.from_i64(i as i64 + 1), c)).collect();
        TruncatedSeries::new(self.ring.clone(), coeffs)
    }

    /// `f(q) -> f(q^d)`; the truncation order becomes `d * M`.
    pub fn degeneracy(&self, d: usize) -> Result<Self, SeriesError> {
        if d == 0 {
            return Err(SeriesError::ZeroDegeneracy);
        }
        let mut out = Self::zero(self.ring.clone(), d * self.trunc());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[d * (i + 1) - 1] = c.clone();
        }
        Ok(out)
    }

    pub fn vanishing_order(&self) -> VanishingOrder {
        match self.coeffs.iter().position(|c| !self.ring.is_zero(c)) {
            Some(i) => VanishingOrder::Exact(i + 1),
            None => VanishingOrder::BeyondTruncation(self.trunc()),
        }
    }

    /// Leading coefficient, if some known coefficient is nonzero.
    pub fn leading(&self) -> Option<(usize, R::Elem)> {
        self.vanishing_order().exact().map(|n| (n, self.coeffs[n - 1].clone()))
    }

    /// True when all coefficients through `q^n` are known and zero.
    pub fn vanishes_through(&self, n: usize) -> bool {
        n <= self.trunc() && self.coeffs[..n].iter().all(|c| self.ring.is_zero(c))
    }

    /// Map coefficients into another ring.
    pub fn map<S: Ring>(&self, ring: S, f: impl Fn(&R::Elem) -> S::Elem) -> TruncatedSeries<S> {
        TruncatedSeries::new(ring, self.coeffs.iter().map(f).collect())
    }
}

impl QSeries {
    /// Rational series from integer coefficients of `q^1, q^2, ...`.
    pub fn from_ints(coeffs: &[i64], trunc: usize) -> Self {
        let terms: Vec<(usize, Q)> =
            coeffs.iter().enumerate().map(|(i, c)| (i + 1, Q::from_integer(BigInt::from(*c)))).collect();
        Self::from_terms(Rationals, &terms, trunc)
    }
}

/// Evaluate a ternary form at three series.
pub fn evaluate_form<R: Ring>(
    form: &HomogeneousPolynomial,
    series: &[TruncatedSeries<R>],
) -> Result<TruncatedSeries<R>, SeriesError> {
    if series.len() != 3 {
        return Err(SeriesError::Arity { expected: 3, got: series.len() });
    }
    series[0].check(&series[1])?;
    series[0].check(&series[2])?;
    let ring = series[0].ring.clone();
    let d = form.degree();
    let powers: Vec<Vec<TruncatedSeries<R>>> = series
        .iter()
        .map(|s| {
            let mut p = vec![s.clone()];
            for _ in 1..d {
                let next = p.last().unwrap().mul(s)?;
                p.push(next);
            }
            Ok(p)
        })
        .collect::<Result<_, SeriesError>>()?;
    let mut acc: Option<TruncatedSeries<R>> = None;
    for (&(i, j, k), c) in form.terms() {
        let mut term: Option<TruncatedSeries<R>> = None;
        for (v, e) in [i, j, k].into_iter().enumerate() {
            if e > 0 {
                let p = &powers[v][e as usize - 1];
                term = Some(match term {
                    None => p.clone(),
                    Some(t) => t.mul(p)?,
                });
            }
        }
        let term = term.expect("forms of positive degree").scale(&ring.from_integer(c));
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    let min_trunc = series.iter().map(|s| s.trunc()).min().unwrap_or(0);
    Ok(acc.unwrap_or_else(|| TruncatedSeries::zero(ring, d * min_trunc)))
}

impl<R: Ring> fmt::Display for TruncatedSeries<R>
where
    R::Elem: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*q^{}", c, i + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.trunc() + 1)
    }
}
