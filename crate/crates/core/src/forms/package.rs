//! Eigenform packages: the q-expansion of one newform orbit representative.

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::character::{factorize, is_prime, CharComponent, DirichletCharacterCode};
use super::label::{EigenformLabel, LabelError};
use crate::number_field::{FieldError, NfElem, NumberField};
use crate::ring::{parse_rational, Rationals, Ring, Q};
use crate::series::{QSeries, TruncatedSeries};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PackageError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("label level {label} differs from stated level {stated}")]
    LevelMismatch { label: u64, stated: u64 },
    #[error("nebentypus entry {0} is inconsistent with the label")]
    Nebentypus(String),
    #[error("coefficient field: {0}")]
    Field(#[from] FieldError),
    #[error("coefficient a_{n} is not a valid rational vector: {detail}")]
    Coefficient { n: usize, detail: String },
    #[error("package has no coefficients")]
    Empty,
    #[error("a_1 must equal 1")]
    Normalization,
    #[error("character of order {0} does not take values in the coefficient field")]
    CharacterNotInField(u64),
    #[error("Hecke recursion fails at p = {p} for a_{{p^{exponent}}}")]
    HeckeRecursion { p: u64, exponent: u32 },
    #[error("coefficients are not multiplicative: a_{{{m}*{n}}} != a_{m} a_{n} for (m,n)=({m},{n})")]
    Multiplicativity { m: usize, n: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberRepr {
    Int(i64),
    Text(String),
}

impl NumberRepr {
    pub fn to_rational(&self) -> Option<Q> {
        match self {
            NumberRepr::Int(n) => Some(Q::from_integer(BigInt::from(*n))),
            NumberRepr::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentRepr {
    Single(u64),
    Pair([u64; 2]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NebentypusEntry {
    pub prime_power: String,
    pub exponent: ExponentRepr,
}

/// On-disk layout of a package.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackageFile {
    pub schema_version: u32,
    pub level: u64,
    pub label: String,
    pub nebentypus: Vec<NebentypusEntry>,
    pub field_poly: Vec<NumberRepr>,
    pub coefficients: Vec<Vec<NumberRepr>>,
    #[serde(default)]
    pub provenance: serde_json::Value,
}

/// A validated newform orbit representative.
#[derive(Clone, Debug)]
pub struct EigenformPackage {
    label: EigenformLabel,
    field: NumberField,
    coeffs: Vec<NfElem>,
    /// Primitive root of unity of the character's order used for `eps(p)`.
    zeta: NfElem,
    provenance: serde_json::Value,
    digest: String,
}

impl EigenformPackage {
    pub fn load(path: &Path) -> Result<Self, PackageError> {
        let bytes =
            std::fs::read(path).map_err(|source| PackageError::Io { path: path.display().to_string(), source })?;
        Self::from_slice(&bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, PackageError> {
        let file: PackageFile = serde_json::from_slice(bytes)?;
        let digest = hex::encode(Sha256::digest(bytes));
        Self::from_file(file, digest)
    }

    pub fn from_file(file: PackageFile, digest: String) -> Result<Self, PackageError> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(PackageError::Schema(file.schema_version));
        }
        let label: EigenformLabel = file.label.parse()?;
        if label.level() != file.level {
            return Err(PackageError::LevelMismatch { label: label.level(), stated: file.level });
        }
        check_nebentypus(&label.character, &file.nebentypus)?;
        let poly: Vec<Q> = file
            .field_poly
            .iter()
            .map(|c| c.to_rational())
            .collect::<Option<_>>()
            .ok_or_else(|| PackageError::Nebentypus("field_poly".into()))?;
        let field = NumberField::new(&poly)?;
        if file.coefficients.is_empty() {
            return Err(PackageError::Empty);
        }
        let coeffs = file
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let coords: Vec<Q> = v
                    .iter()
                    .map(|c| c.to_rational())
                    .collect::<Option<_>>()
                    .ok_or_else(|| PackageError::Coefficient { n: i + 1, detail: "unparsable entry".into() })?;
                field.elem(coords).map_err(|e| PackageError::Coefficient { n: i + 1, detail: e.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs[0] != field.one() {
            return Err(PackageError::Normalization);
        }
        let mut pkg = EigenformPackage { label, field, coeffs, zeta: Vec::new(), provenance: file.provenance, digest };
        pkg.zeta = pkg.choose_character_embedding()?;
        pkg.check_multiplicative()?;
        Ok(pkg)
    }

    pub fn label(&self) -> &EigenformLabel {
        &self.label
    }

    pub fn level(&self) -> u64 {
        self.label.level()
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        self.field.degree()
    }

    /// Number of stored coefficients.
    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn provenance(&self) -> &serde_json::Value {
        &self.provenance
    }

    /// SHA-256 of the source bytes.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn a(&self, n: usize) -> Option<&NfElem> {
        n.checked_sub(1).and_then(|i| self.coeffs.get(i))
    }

    pub fn trace_a(&self, n: usize) -> Option<Q> {
        self.a(n).map(|c| self.field.trace(c))
    }

    /// The orbit representative as a series over its coefficient field.
    pub fn eigenform(&self) -> TruncatedSeries<NumberField> {
        TruncatedSeries::new(self.field.clone(), self.coeffs.clone())
    }

    /// Sum over the Galois conjugates.
    pub fn trace_series(&self) -> QSeries {
        TruncatedSeries::new(Rationals, self.coeffs.iter().map(|c| self.field.trace(c)).collect())
    }

    /// The `k`-th power-basis coordinate of each coefficient.
    pub fn coordinate_series(&self, k: usize) -> QSeries {
        assert!(k < self.dimension(), "coordinate index out of range");
        TruncatedSeries::new(Rationals, self.coeffs.iter().map(|c| c[k].clone()).collect())
    }

    /// `eps(n)` inside the coefficient field.
    pub fn character_value(&self, n: u64) -> Option<NfElem> {
        let k = self.label.character.value_exponent(n).ok()?;
        Some(self.field.pow(&self.zeta, k as u32))
    }

    fn choose_character_embedding(&self) -> Result<NfElem, PackageError> {
        let order = self.label.character.order();
        let candidates = self.field.roots_of_unity(order);
        if candidates.is_empty() {
            return Err(PackageError::CharacterNotInField(order));
        }
        let mut first_err = None;
        for zeta in candidates {
            match self.check_hecke(&zeta) {
                Ok(()) => return Ok(zeta),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Err(first_err.unwrap())
    }

    /// `a_{p^(r+1)} = a_p a_{p^r} - eps(p) p a_{p^(r-1)}` for `p` not dividing
    /// the level and `a_{p^(r+1)} = a_p a_{p^r}` otherwise.
    fn check_hecke(&self, zeta: &NfElem) -> Result<(), PackageError> {
        let k = &self.field;
        let m = self.trunc();
        let level = self.level();
        for p in (2..=m as u64).filter(|&p| is_prime(p)) {
            if (p * p) as usize > m {
                break;
            }
            let ap = self.a(p as usize).unwrap();
            let eps_p = if level.is_multiple_of(p) {
                k.zero()
            } else {
                let e = self.label.character.value_exponent(p).expect("coprime");
                let z = k.pow(zeta, e as u32);
                k.mul(&z, &k.from_i64(p as i64))
            };
            let (mut prev, mut cur) = (k.one(), ap.clone());
            let mut pr = p;
            let mut r = 1;
            while ((pr * p) as usize) <= m {
                let next = k.sub(&k.mul(ap, &cur), &k.mul(&eps_p, &prev));
                if &next != self.a((pr * p) as usize).unwrap() {
                    return Err(PackageError::HeckeRecursion { p, exponent: r + 1 });
                }
                prev = cur;
                cur = next;
                pr *= p;
                r += 1;
            }
        }
        Ok(())
    }

    /// `a_n` equals the product of `a_{p^e}` over the factorization of `n`.
    fn check_multiplicative(&self) -> Result<(), PackageError> {
        let k = &self.field;
        for n in 2..=self.trunc() {
            let f = factorize(n as u64);
            if f.len() < 2 {
                continue;
            }
            let prod = f.iter().fold(k.one(), |acc, &(p, e)| k.mul(&acc, self.a(p.pow(e) as usize).unwrap()));
            if &prod != self.a(n).unwrap() {
                let m = f[0].0.pow(f[0].1) as usize;
                return Err(PackageError::Multiplicativity { m, n: n / m });
            }
        }
        Ok(())
    }

    /// Serialize back to the package layout.
    pub fn to_file(&self) -> PackageFile {
        PackageFile {
            schema_version: SCHEMA_VERSION,
            level: self.level(),
            label: self.label.to_string(),
            nebentypus: nebentypus_entries(&self.label.character),
            field_poly: self.field.poly_high_first().iter().map(number_repr).collect(),
            coefficients: self
                .coeffs
                .iter()
                .map(|v| v.iter().map(|c| NumberRepr::Text(c.to_string())).collect())
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Copy keeping only the first `m` coefficients.
    pub fn truncated(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(m.max(1));
        out
    }
}

fn number_repr(c: &Q) -> NumberRepr {
    if c.is_integer() {
        if let Ok(n) = i64::try_from(c.to_integer()) {
            return NumberRepr::Int(n);
        }
    }
    NumberRepr::Text(c.to_string())
}

pub fn nebentypus_entries(code: &DirichletCharacterCode) -> Vec<NebentypusEntry> {
    code.components()
        .iter()
        .map(|c| NebentypusEntry {
            prime_power: format!("{}^{}", c.p, c.alpha),
            exponent: match c.exponents.as_slice() {
                [a, b] => ExponentRepr::Pair([*a, *b]),
                [a] => ExponentRepr::Single(*a),
                _ => ExponentRepr::Single(0),
            },
        })
        .collect()
}

fn check_nebentypus(code: &DirichletCharacterCode, entries: &[NebentypusEntry]) -> Result<(), PackageError> {
    let mut seen = Vec::new();
    for entry in entries {
        let bad = || PackageError::Nebentypus(entry.prime_power.clone());
        let (p, a) = entry.prime_power.split_once('^').ok_or_else(bad)?;
        let (p, a): (u64, u32) = (p.trim().parse().map_err(|_| bad())?, a.trim().parse().map_err(|_| bad())?);
        let comp: &CharComponent = code.components().iter().find(|c| c.p == p).ok_or_else(bad)?;
        if comp.alpha != a || seen.contains(&p) {
            return Err(bad());
        }
        seen.push(p);
        let exps: Vec<u64> = match &entry.exponent {
            ExponentRepr::Single(e) => vec![*e],
            ExponentRepr::Pair(v) => v.to_vec(),
        };
        let matches = if comp.exponents.is_empty() { exps == [0] } else { exps == comp.exponents };
        if !matches {
            return Err(bad());
        }
    }
    for c in code.components() {
        if !seen.contains(&c.p) && !(c.exponents.is_empty() || c.exponents.iter().all(|e| *e == 0)) {
            return Err(PackageError::Nebentypus(format!("{}^{}", c.p, c.alpha)));
        }
    }
    Ok(())
}

/// Least common multiple of denominators, used when scaling traces.
pub fn common_denominator(v: &[Q]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 11A: q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 - 2q^9 - 2q^10 + q^11 - 2q^12.
    const A11: [i64; 12] = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2];

    fn rational_package(label: &str, coeffs: &[i64]) -> String {
        let level: u64 = label.trim_end_matches(char::is_alphabetic).parse().unwrap();
        let neb: Vec<String> =
            factorize(level).iter().map(|(p, a)| format!("{{\"prime_power\":\"{p}^{a}\",\"exponent\":0}}")).collect();
        let co: Vec<String> = coeffs.iter().map(|c| format!("[\"{c}\"]")).collect();
        format!(
            "{{\"schema_version\":1,\"level\":{level},\"label\":\"{label}\",\"nebentypus\":[{}],\
             \"field_poly\":[1,0],\"coefficients\":[{}],\"provenance\":{{}}}}",
            neb.join(","),
            co.join(",")
        )
    }

    #[test]
    fn loads_valid_rational_package() {
        let p = EigenformPackage::from_slice(rational_package("11A", &A11).as_bytes()).unwrap();
        assert_eq!(p.dimension(), 1);
        assert_eq!(p.trace_a(5), Some(Q::one()));
        assert_eq!(p.trace_series().trunc(), 12);
        assert_eq!(p.digest().len(), 64);
    }

    #[test]
    fn rejects_broken_hecke_relation() {
        let mut bad = A11;
        bad[3] = 3;
        let err = EigenformPackage::from_slice(rational_package("11A", &bad).as_bytes()).unwrap_err();
        assert!(matches!(err, PackageError::HeckeRecursion { p: 2, exponent: 2 }), "{err}");
    }

    #[test]
    fn rejects_non_multiplicative_coefficients() {
        let mut bad = A11;
        bad[5] = 3;
        let err = EigenformPackage::from_slice(rational_package("11A", &bad).as_bytes()).unwrap_err();
        assert!(matches!(err, PackageError::Multiplicativity { m: 2, n: 3 }), "{err}");
        assert!(err.to_string().contains("(m,n)=(2,3)"));
    }

    #[test]
    fn rejects_unnormalized_and_mislabelled() {
        let mut bad = A11;
        bad[0] = 2;
        assert!(matches!(
            EigenformPackage::from_slice(rational_package("11A", &bad).as_bytes()),
            Err(PackageError::Normalization)
        ));
        let text = rational_package("11A", &A11).replace("\"level\":11", "\"level\":13");
        assert!(matches!(EigenformPackage::from_slice(text.as_bytes()), Err(PackageError::LevelMismatch { .. })));
    }

    #[test]
    fn rejects_reducible_field() {
        let text = rational_package("11A", &A11).replace("[1,0]", "[1,0,-1]");
        assert!(matches!(
            EigenformPackage::from_slice(text.as_bytes()),
            Err(PackageError::Field(FieldError::Reducible(_)))
        ));
    }

    #[test]
    fn round_trips_through_file_layout() {
        let p = EigenformPackage::from_slice(rational_package("11A", &A11).as_bytes()).unwrap();
        let bytes = serde_json::to_vec(&p.to_file()).unwrap();
        let q = EigenformPackage::from_slice(&bytes).unwrap();
        assert_eq!(q.trace_series(), p.trace_series());
        assert!(q.coeffs.iter().zip(&p.coeffs).all(|(a, b)| a == b));
        assert!(!q.field.is_zero(&q.coeffs[0]));
    }
}
