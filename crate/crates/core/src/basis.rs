//! Normalized bases `h1 = q + O(q^2)`, `h2 = q^2 + O(q^3)`, `h3 = O(q^3)`.
//!
//! Three shapes of factor data occur: one cubic-field newform (case A), a
//! quadratic-field newform with a rational one (case AE), and three rational
//! newforms (case EEE). Each has a closed-form construction; by default the
//! result is then put in reduced echelon form, which is the normalization the
//! curve corpus uses.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::character::factorize;
use crate::forms::EigenformPackage;
use crate::number_field::poly_disc;
use crate::ring::{q, qf, Rationals, Ring, Q};
use crate::series::{QSeries, SeriesError, TruncatedSeries, VanishingOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisError {
    #[error("factor dimensions sum to {0}, expected 3")]
    DimensionSum(usize),
    #[error("{0} appears with multiplicity {1}; repeated factors are not supported")]
    Multiplicity(String, u32),
    #[error("factor {label} has level {got}, expected {expected}")]
    Level { label: String, got: u64, expected: u64 },
    #[error("factor shape does not match case {0}")]
    Shape(String),
    #[error("{0} must have trivial Nebentypus")]
    NontrivialCharacter(String),
    #[error("Nebentypus of order {0} is not supported")]
    CharacterOrder(u64),
    #[error("no form of the span starts with q^2: {0}")]
    Hyperelliptic(String),
    #[error("basis series are linearly dependent to the available precision")]
    Dependent,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisCase {
    A,
    AE,
    EEE,
    /// Assembled from an explicit recipe rather than a case formula.
    Explicit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Reduced echelon form: pivots at `q`, `q^2` and `q^(ord h3)`.
    #[default]
    Reduced,
    /// The closed-form construction, with `h3` scaled to leading coefficient 1.
    Formula,
}

impl std::str::FromStr for Normalization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reduced" => Ok(Normalization::Reduced),
            "formula" => Ok(Normalization::Formula),
            _ => Err(format!("unknown normalization {s:?}; expected reduced or formula")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AeBranch {
    /// `a_2` of the quadratic form is irrational.
    IrrationalA2,
    /// `a_2` is rational and differs from that of the rational form.
    RationalA2,
}

/// How the basis was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum BasisDerivation {
    A {
        /// `x^3 + a x^2 + b x + c`, the characteristic polynomial of `a_2`.
        #[serde(with = "crate::ring::qstr")]
        a: Q,
        #[serde(with = "crate::ring::qstr")]
        b: Q,
        #[serde(with = "crate::ring::qstr")]
        c: Q,
        #[serde(with = "crate::ring::qstr")]
        disc: Q,
        #[serde(with = "crate::ring::qstr")]
        disc_derivative: Q,
        /// Coordinate of `a_3` on `a_2^2` in the basis `1, a_2, a_2^2`.
        #[serde(with = "crate::ring::qstr")]
        gamma3: Q,
        /// Coefficient of `q^4` in the unscaled `h3`.
        #[serde(with = "crate::ring::qstr")]
        lead: Q,
    },
    AE {
        /// `a_2 = a2_rational + a2_sqrt * sqrt(d)`.
        #[serde(with = "crate::ring::qstr")]
        a2_rational: Q,
        #[serde(with = "crate::ring::qstr")]
        a2_sqrt: Q,
        d: BigInt,
        #[serde(with = "crate::ring::qstr")]
        c2: Q,
        branch: AeBranch,
    },
    EEE {
        order: [String; 3],
        #[serde(with = "crate::ring::qstr::array")]
        a2: [Q; 3],
    },
    Explicit,
}

#[derive(Clone, Debug)]
pub struct NormalizedBasis {
    pub h: [QSeries; 3],
    pub case: BasisCase,
    pub normalization: Option<Normalization>,
    pub derivation: BasisDerivation,
}

impl NormalizedBasis {
    pub fn ord_h3(&self) -> VanishingOrder {
        self.h[2].vanishing_order()
    }

    pub fn trunc(&self) -> usize {
        self.h.iter().map(|s| s.trunc()).min().unwrap()
    }
}

/// Factors of an abelian threefold `A_f` or product, with multiplicities.
#[derive(Clone, Debug)]
pub struct AbelianFactorSpec {
    pub level: u64,
    pub factors: Vec<(Arc<EigenformPackage>, u32)>,
}

impl AbelianFactorSpec {
    pub fn new(level: u64, factors: Vec<(Arc<EigenformPackage>, u32)>) -> Result<Self, BasisError> {
        for (p, m) in &factors {
            if *m != 1 {
                return Err(BasisError::Multiplicity(p.label().to_string(), *m));
            }
            if p.level() != level {
                return Err(BasisError::Level { label: p.label().to_string(), got: p.level(), expected: level });
            }
        }
        let dim: usize = factors.iter().map(|(p, m)| p.dimension() * *m as usize).sum();
        if dim != 3 {
            return Err(BasisError::DimensionSum(dim));
        }
        Ok(AbelianFactorSpec { level, factors })
    }

    pub fn case(&self) -> BasisCase {
        let mut dims: Vec<usize> = self.factors.iter().map(|(p, _)| p.dimension()).collect();
        dims.sort();
        match dims.as_slice() {
            [3] => BasisCase::A,
            [1, 2] => BasisCase::AE,
            _ => BasisCase::EEE,
        }
    }

    /// True when every factor has trivial Nebentypus.
    pub fn all_trivial(&self) -> bool {
        self.factors.iter().all(|(p, _)| p.label().character.is_trivial())
    }

    pub fn packages(&self) -> impl Iterator<Item = &Arc<EigenformPackage>> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn build(&self, normalization: Normalization) -> Result<NormalizedBasis, BasisError> {
        let pk: Vec<&EigenformPackage> = self.factors.iter().map(|(p, _)| p.as_ref()).collect();
        let basis = match self.case() {
            BasisCase::A => build_case_a(pk[0])?,
            BasisCase::AE => {
                let (f, g) = if pk[0].dimension() == 2 { (pk[0], pk[1]) } else { (pk[1], pk[0]) };
                build_case_ae(f, g)?
            }
            _ => build_case_eee([pk[0], pk[1], pk[2]])?,
        };
        finish(basis, normalization)
    }
}

fn finish(mut basis: NormalizedBasis, normalization: Normalization) -> Result<NormalizedBasis, BasisError> {
    basis.normalization = Some(normalization);
    if normalization == Normalization::Reduced {
        let r = rref(&basis.h)?;
        basis.h = [r[0].clone(), r[1].clone(), r[2].clone()];
    }
    Ok(basis)
}

fn scale_to_leading_one(s: &QSeries) -> Result<QSeries, BasisError> {
    let (_, c) = s.leading().ok_or(BasisError::Dependent)?;
    Ok(s.scale(&(Q::one() / c)))
}

fn lin(terms: &[(&Q, &QSeries)]) -> Result<QSeries, BasisError> {
    let mut acc = terms[0].1.scale(terms[0].0);
    for (c, s) in &terms[1..] {
        acc = acc.add(&s.scale(c))?;
    }
    Ok(acc)
}

/// Case A: `A_f` simple of dimension 3 with trivial character.
pub fn build_case_a(f: &EigenformPackage) -> Result<NormalizedBasis, BasisError> {
    let label = f.label().to_string();
    if f.dimension() != 3 {
        return Err(BasisError::Shape("A".into()));
    }
    if !f.label().character.is_trivial() {
        return Err(BasisError::NontrivialCharacter(label));
    }
    let k = f.field();
    let a2 = f.a(2).ok_or(BasisError::Dependent)?.clone();
    if k.is_rational(&a2) {
        return Err(BasisError::Hyperelliptic(format!("a_2 of {label} is rational")));
    }
    let cp = k.charpoly(&a2);
    let (a, b, c) = (cp[1].clone(), cp[2].clone(), cp[3].clone());
    let disc = poly_disc(&cp);
    let disc_derivative = q(4) * &a * &a - q(12) * &b;
    let third = qf(1, 3);
    let powers = [Ring::one(k), a2.clone(), k.nf_mul(&a2, &a2)];
    let g: Vec<QSeries> = powers
        .iter()
        .map(|w| {
            let coeffs = (1..=f.trunc()).map(|n| k.trace(&k.nf_mul(w, f.a(n).unwrap())) * &third).collect();
            TruncatedSeries::new(Rationals, coeffs)
        })
        .collect();
    let h1 = g[0].clone();
    let h2 = lin(&[(&q(1), &g[1]), (&(&a * &third), &g[0])])?.scale(&(q(18) / &disc_derivative));
    let c1 = -(&a * &a - q(2) * &b) * &third;
    let c2 = (q(2) * &a * &a * &a - q(7) * &a * &b + q(9) * &c) / q(9);
    let h3 = lin(&[(&q(1), &g[2]), (&c1, &h1), (&c2, &h2)])?;
    let gamma3 =
        k.coordinates_on(&powers, f.a(3).ok_or(BasisError::Dependent)?).ok_or(BasisError::Dependent)?[2].clone();
    let lead = h3.coeff(4).unwrap_or_else(Q::zero);
    let h3 = scale_to_leading_one(&h3)?;
    Ok(NormalizedBasis {
        h: [h1, h2, h3],
        case: BasisCase::A,
        normalization: None,
        derivation: BasisDerivation::A { a, b, c, disc, disc_derivative, gamma3, lead },
    })
}

/// Largest square divisor removed: `n = m^2 d` with `d` squarefree.
fn squarefree_part(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut d = sign.clone();
    let mut m = BigInt::one();
    let v = u64::try_from(n.abs()).expect("small discriminant");
    for (p, a) in factorize(v) {
        m *= BigInt::from(p).pow(a / 2);
        if a % 2 == 1 {
            d *= p;
        }
    }
    (m, d)
}

/// Case AE: a quadratic-field newform `f` and a rational newform `g`.
pub fn build_case_ae(f: &EigenformPackage, g: &EigenformPackage) -> Result<NormalizedBasis, BasisError> {
    if f.dimension() != 2 || g.dimension() != 1 {
        return Err(BasisError::Shape("AE".into()));
    }
    if !g.label().character.is_trivial() {
        return Err(BasisError::NontrivialCharacter(g.label().to_string()));
    }
    let order = f.label().character.order();
    if !matches!(order, 1..=4) {
        return Err(BasisError::CharacterOrder(order));
    }
    let poly = f.field().poly_high_first();
    let (bb, cc) = (&poly[1], &poly[2]);
    let disc = bb * bb - q(4) * cc;
    let (num, den) = (disc.numer().clone(), disc.denom().clone());
    // disc = num/den = (num * den) / den^2
    let (m0, d) = squarefree_part(&(&num * &den));
    let m = Q::new(m0, den);
    let half = qf(1, 2);
    let rational_part = |u: &Vec<Q>| -> Q { &u[0] - &u[1] * bb * &half };
    let sqrt_part = |u: &Vec<Q>| -> Q { &u[1] * &m * &half };
    let m_f = f.trunc().min(g.trunc());
    let series = |h: &dyn Fn(&Vec<Q>) -> Q| -> QSeries {
        TruncatedSeries::new(Rationals, (1..=m_f).map(|n| h(f.a(n).unwrap())).collect())
    };
    let a2 = f.a(2).ok_or(BasisError::Dependent)?;
    let (a2_rational, a2_sqrt) = (rational_part(a2), sqrt_part(a2));
    let gs = g.trace_series().truncate(m_f);
    let c2 = g.trace_a(2).ok_or(BasisError::Dependent)?;
    let h1 = series(&rational_part);
    let (h2, h3, branch) = if !a2_sqrt.is_zero() {
        let h2 = series(&sqrt_part).scale(&(Q::one() / &a2_sqrt));
        let h3 = lin(&[(&q(1), &gs), (&q(-1), &h1), (&-(&c2 - &a2_rational), &h2)])?;
        (h2, h3, AeBranch::IrrationalA2)
    } else if c2 != a2_rational {
        let h2 = gs.sub(&h1)?.scale(&(Q::one() / (&c2 - &a2_rational)));
        (h2, series(&sqrt_part), AeBranch::RationalA2)
    } else {
        return Err(BasisError::Hyperelliptic(format!(
            "a_2 of {} is rational and equals a_2 of {}",
            f.label(),
            g.label()
        )));
    };
    let h3 = scale_to_leading_one(&h3)?;
    Ok(NormalizedBasis {
        h: [h1, h2, h3],
        case: BasisCase::AE,
        normalization: None,
        derivation: BasisDerivation::AE { a2_rational, a2_sqrt, d, c2, branch },
    })
}

/// Case EEE: three rational newforms. The first pair in label order with
/// distinct `a_2` supplies `h1` and `h2`.
pub fn build_case_eee(forms: [&EigenformPackage; 3]) -> Result<NormalizedBasis, BasisError> {
    let mut forms = forms.to_vec();
    if forms.iter().any(|f| f.dimension() != 1) {
        return Err(BasisError::Shape("EEE".into()));
    }
    for f in &forms {
        if !f.label().character.is_trivial() {
            return Err(BasisError::NontrivialCharacter(f.label().to_string()));
        }
    }
    forms.sort_by_key(|f| f.label().to_string());
    let a2 = |f: &EigenformPackage| f.trace_a(2).unwrap();
    let (i, j) = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .find(|&(i, j)| a2(forms[i]) != a2(forms[j]))
        .ok_or_else(|| BasisError::Hyperelliptic("all three forms share a_2".into()))?;
    let k = 3 - i - j;
    let (f1, f2, f3) = (forms[i], forms[j], forms[k]);
    let m = forms.iter().map(|f| f.trunc()).min().unwrap();
    let (s1, s2, s3) = (f1.trace_series().truncate(m), f2.trace_series().truncate(m), f3.trace_series().truncate(m));
    let (x, y, z) = (a2(f1), a2(f2), a2(f3));
    let h1 = s1.clone();
    let h2 = s1.sub(&s2)?.scale(&(Q::one() / (&x - &y)));
    let h3 = lin(&[(&q(1), &s3), (&q(-1), &s1), (&-(&z - &x), &h2)])?;
    let h3 = scale_to_leading_one(&h3)?;
    Ok(NormalizedBasis {
        h: [h1, h2, h3],
        case: BasisCase::EEE,
        normalization: None,
        derivation: BasisDerivation::EEE {
            order: [f1.label().to_string(), f2.label().to_string(), f3.label().to_string()],
            a2: [x, y, z],
        },
    })
}

/// Basis assembled from groups of series; groups flagged `reduce` are put in
/// reduced echelon form on their own.
pub fn build_explicit(groups: Vec<(bool, Vec<QSeries>)>) -> Result<NormalizedBasis, BasisError> {
    let mut out = Vec::new();
    for (reduce, members) in groups {
        if reduce {
            out.extend(rref(&members)?);
        } else {
            out.extend(members);
        }
    }
    if out.len() != 3 {
        return Err(BasisError::DimensionSum(out.len()));
    }
    Ok(NormalizedBasis {
        h: [out[0].clone(), out[1].clone(), out[2].clone()],
        case: BasisCase::Explicit,
        normalization: None,
        derivation: BasisDerivation::Explicit,
    })
}

/// Reduced row echelon form of a family of series (pivots scaled to 1).
pub fn rref(series: &[QSeries]) -> Result<Vec<QSeries>, BasisError> {
    let m = series.iter().map(|s| s.trunc()).min().unwrap_or(0);
    let mut rows: Vec<Vec<Q>> = series.iter().map(|s| s.coeffs()[..m].to_vec()).collect();
    let mut r = 0;
    for col in 0..m {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][col];
        for x in rows[r][col..].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    if r < rows.len() {
        return Err(BasisError::Dependent);
    }
    Ok(rows.into_iter().map(|c| TruncatedSeries::new(Rationals, c)).collect())
}

/// True when `h1 = q + ..`, `h2 = q^2 + ..` and `h3 = O(q^3)`.
pub fn has_normalized_shape(h: &[QSeries; 3]) -> bool {
    let lead = |s: &QSeries, n: usize| s.leading().map(|(k, c)| k == n && c.is_one()).unwrap_or(false);
    lead(&h[0], 1) && lead(&h[1], 2) && h[2].vanishing_order().at_least() >= 3
}
