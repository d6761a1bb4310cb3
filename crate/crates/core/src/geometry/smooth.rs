//! Nonsingularity of plane curves via iterated resultants.
//!
//! After a shear `X -> X + tZ, Y -> Y + tZ` the partial `G1` has a nonzero
//! `Z^(d-1)` coefficient. A common zero of the three partials then projects
//! to a common root of the binary forms `Res_Z(G1, G2)` and `Res_Z(G1, G3)`,
//! so a nonzero resultant of those two forms rules out singular points.
//! Working modulo a prime gives a certificate over `Q` as well, since a
//! singular point over `Q-bar` reduces to a common zero of the reduced
//! partials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::upoly::{self, Field, UPoly};
use crate::forms::character::is_prime;
use crate::poly::{HomogeneousPolynomial, Monomial};
use crate::ring::{PrimeField, Rationals, Ring};

/// Shears tried before giving up on a prime.
const MAX_SHEAR: u64 = 8;

/// Primes tried before the exact fallback.
const MOD_P_PRIMES: usize = 12;

/// A ternary form with coefficients in `K`.
#[derive(Clone, Debug)]
pub(crate) struct Ternary<K: Field> {
    pub(crate) k: K,
    pub(crate) degree: usize,
    pub(crate) terms: BTreeMap<Monomial, K::Elem>,
}

impl<K: Field> Ternary<K> {
    pub(crate) fn from_poly(k: K, f: &HomogeneousPolynomial) -> Self {
        let terms = f.terms().map(|(m, c)| (*m, k.from_integer(c))).filter(|(_, c)| !k.is_zero(c)).collect();
        Ternary { k, degree: f.degree(), terms }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn coeff(&self, m: Monomial) -> K::Elem {
        self.terms.get(&m).cloned().unwrap_or_else(|| self.k.zero())
    }

    fn insert_add(&mut self, m: Monomial, c: K::Elem) {
        let k = &self.k;
        let v = k.add(&self.terms.get(&m).cloned().unwrap_or_else(|| k.zero()), &c);
        if k.is_zero(&v) {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    /// `F(X + tZ, Y + tZ, Z)`.
    fn shear(&self, t: i64) -> Self {
        let k = &self.k;
        let tk = k.from_i64(t);
        let mut out = Ternary { k: k.clone(), degree: self.degree, terms: BTreeMap::new() };
        for (&(i, j, l), c) in &self.terms {
            for a in 0..=i {
                for b in 0..=j {
                    let e = (i - a) + (j - b);
                    let coeff = binomial(i, a) * binomial(j, b);
                    let mut v = k.mul(c, &k.from_integer(&coeff));
                    for _ in 0..e {
                        v = k.mul(&v, &tk);
                    }
                    out.insert_add((a, b, l + e), v);
                }
            }
        }
        out
    }

    fn partial(&self, v: usize) -> Self {
        let k = &self.k;
        let mut out = Ternary { k: k.clone(), degree: self.degree.saturating_sub(1), terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            let mut e = [m.0, m.1, m.2];
            if e[v] == 0 {
                continue;
            }
            let factor = k.from_i64(e[v] as i64);
            e[v] -= 1;
            out.insert_add((e[0], e[1], e[2]), k.mul(c, &factor));
        }
        out
    }

    /// Coefficients of `G(x, 1, Z)` as a polynomial in `Z`, highest power
    /// first, each a polynomial in `x`.
    fn z_coefficients(&self) -> Vec<UPoly<K::Elem>> {
        let k = &self.k;
        let e = self.degree;
        let mut out = vec![Vec::new(); e + 1];
        for (&(i, _, l), c) in &self.terms {
            let slot = &mut out[e - l as usize];
            if slot.len() <= i as usize {
                slot.resize(i as usize + 1, k.zero());
            }
            slot[i as usize] = k.add(&slot[i as usize], c);
        }
        out.into_iter().map(|p| upoly::trim(k, p)).collect()
    }

    pub(crate) fn eval(&self, pt: [&K::Elem; 3]) -> K::Elem {
        let k = &self.k;
        let pow = |x: &K::Elem, n: u32| (0..n).fold(k.one(), |acc, _| k.mul(&acc, x));
        self.terms.iter().fold(k.zero(), |acc, (m, c)| {
            let v = k.mul(c, &k.mul(&pow(pt[0], m.0), &k.mul(&pow(pt[1], m.1), &pow(pt[2], m.2))));
            k.add(&acc, &v)
        })
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `Res_Z(a, b)` as a polynomial in `x` (the dehomogenized binary form).
fn z_resultant<K: Field>(k: &K, a: &Ternary<K>, b: &Ternary<K>) -> UPoly<K::Elem> {
    let m = upoly::sylvester(&a.z_coefficients(), &b.z_coefficients(), Vec::new());
    upoly::poly_det(k, m)
}

/// Result of the iterated-resultant test for one shear.
#[derive(Clone, Debug, PartialEq)]
enum ShearOutcome<E> {
    /// No partial has a nonzero `Z^(d-1)` coefficient.
    Unusable,
    /// The final resultant, zero when a common zero may exist.
    Resultant(E),
}

fn shear_test<K: Field>(f: &Ternary<K>, t: i64) -> ShearOutcome<K::Elem> {
    let k = &f.k;
    let g = f.shear(t);
    let e = f.degree - 1;
    let parts: Vec<Ternary<K>> = (0..3).map(|v| g.partial(v)).collect();
    let Some(lead) = (0..3).find(|&v| !k.is_zero(&parts[v].coeff((0, 0, e as u32)))) else {
        return ShearOutcome::Unusable;
    };
    let others: Vec<usize> = (0..3).filter(|&v| v != lead).collect();
    let n = e * e;
    let binary = |p: UPoly<K::Elem>| -> Vec<K::Elem> {
        // Homogenize to degree e^2 and list highest power of x first.
        let mut c = p;
        c.resize(n + 1, k.zero());
        c.reverse();
        c
    };
    if n == 0 {
        // Lines: a nonzero constant partial.
        return ShearOutcome::Resultant(k.one());
    }
    let r12 = binary(z_resultant(k, &parts[lead], &parts[others[0]]));
    let r13 = binary(z_resultant(k, &parts[lead], &parts[others[1]]));
    ShearOutcome::Resultant(upoly::det(k, upoly::sylvester(&r12, &r13, k.zero())))
}

/// Evidence for or against nonsingularity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SmoothnessWitness {
    /// Nonzero resultant modulo `p` after the given shear.
    ModP { p: u64, shear: i64, resultant: u64 },
    /// Nonzero resultant over `Q` after the given shear.
    Exact { shear: i64, resultant: String },
    /// Every usable shear over `Q` gave a zero resultant.
    Obstruction { shears: Vec<i64> },
    /// No shear produced a usable partial.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothnessVerdict {
    Smooth,
    Singular,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessCertificate {
    pub verdict: SmoothnessVerdict,
    pub witness: SmoothnessWitness,
    /// Primes whose test was inconclusive before the witness was found.
    pub primes_tried: Vec<u64>,
}

/// Shear and resultant when the reduction of `F` modulo `p` is nonsingular.
///
/// `None` means no shear certified it, which includes actual bad reduction.
pub fn smooth_mod_p(f: &HomogeneousPolynomial, p: u64) -> Option<(i64, u64)> {
    let k = PrimeField::new(p);
    let t = Ternary::from_poly(k, f);
    if t.is_zero() || f.degree() == 0 {
        return None;
    }
    (0..MAX_SHEAR.min(p)).find_map(|s| match shear_test(&t, s as i64) {
        ShearOutcome::Resultant(r) if r != 0 => Some((s as i64, r)),
        _ => None,
    })
}

/// Certify that the plane curve `F = 0` is nonsingular over `Q-bar`.
pub fn check_smoothness(f: &HomogeneousPolynomial) -> SmoothnessCertificate {
    let mut tried = Vec::new();
    for p in (5u64..).filter(|&p| is_prime(p)).take(MOD_P_PRIMES) {
        if let Some((shear, resultant)) = smooth_mod_p(f, p) {
            return SmoothnessCertificate {
                verdict: SmoothnessVerdict::Smooth,
                witness: SmoothnessWitness::ModP { p, shear, resultant },
                primes_tried: tried,
            };
        }
        tried.push(p);
    }
    let t = Ternary::from_poly(Rationals, f);
    let mut shears = Vec::new();
    for s in 0..MAX_SHEAR as i64 {
        match shear_test(&t, s) {
            ShearOutcome::Unusable => continue,
            ShearOutcome::Resultant(r) if !Rationals.is_zero(&r) => {
                return SmoothnessCertificate {
                    verdict: SmoothnessVerdict::Smooth,
                    witness: SmoothnessWitness::Exact { shear: s, resultant: r.to_string() },
                    primes_tried: tried,
                };
            }
            ShearOutcome::Resultant(_) => shears.push(s),
        }
    }
    if shears.is_empty() {
        SmoothnessCertificate {
            verdict: SmoothnessVerdict::Undetermined,
            witness: SmoothnessWitness::Degenerate,
            primes_tried: tried,
        }
    } else {
        SmoothnessCertificate {
            verdict: SmoothnessVerdict::Singular,
            witness: SmoothnessWitness::Obstruction { shears },
            primes_tried: tried,
        }
    }
}
