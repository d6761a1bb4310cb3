//! The embedded curve corpus and the basis recipes it refers to.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::label::{CurveLabel, FlexMarker};
use crate::basis::{build_explicit, AbelianFactorSpec, BasisError, Normalization, NormalizedBasis};
use crate::forms::{EigenformLabel, EigenformPackage, FixtureStore, LabelError, StoreError};
use crate::number_field::format_poly;
use crate::poly::HomogeneousPolynomial;
use crate::relation::CongruenceGroup;
use crate::ring::{parse_rational, Q};
use crate::series::QSeries;

const CORPUS_JSON: &str = include_str!("../../data/corpus.json");

/// SHA-256 of the embedded corpus file.
pub const CORPUS_SHA256: &str = include_str!("../../data/corpus.sha256");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordKind {
    Table,
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRef {
    pub label: String,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

/// `scale * f_coordinate(q^degeneracy)` for one factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisTerm {
    pub factor: String,
    #[serde(default)]
    pub coordinate: usize,
    #[serde(default = "unit_scale")]
    pub scale: String,
    #[serde(default = "unit_degeneracy")]
    pub degeneracy: usize,
    /// Expected defining polynomial of the coefficient field, highest degree
    /// first. Coordinates are only meaningful relative to that generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_poly: Option<Vec<i64>>,
}

fn unit_scale() -> String {
    "1".to_string()
}

fn unit_degeneracy() -> usize {
    1
}

/// Basis members, each a sum of terms; `reduce` puts the group in reduced
/// echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisGroup {
    #[serde(default)]
    pub reduce: bool,
    pub members: Vec<Vec<BasisTerm>>,
}

/// Coefficients of `h1, h2, h3` as `[n, a_n]` pairs, zero elsewhere below
/// `precision`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrintedExpansions {
    pub precision: usize,
    pub h1: Vec<(usize, i64)>,
    pub h2: Vec<(usize, i64)>,
    pub h3: Vec<(usize, i64)>,
}

impl PrintedExpansions {
    pub fn series(&self) -> [Vec<(usize, i64)>; 3] {
        [self.h1.clone(), self.h2.clone(), self.h3.clone()]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectations {
    /// `constant` or `non-constant`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_f: Option<String>,
    /// `none` when the degree-4 search must find nothing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quartic: Option<String>,
}

/// A model obtained from the record's polynomial by a linear substitution,
/// optionally rebuilt from its own basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub name: String,
    pub polynomial: HomogeneousPolynomial,
    /// Rows of `M`; the variant equals `F(M (X, Y, Z)^T)`.
    pub substitution: [[i64; 3]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<FactorRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<BasisGroup>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl Variant {
    /// Input for rebuilding the variant, when it carries its own factors.
    pub fn spec(&self, degree: usize) -> Option<CurveSpec> {
        Some(CurveSpec {
            level: self.level?,
            factors: self.factors.clone(),
            basis: self.basis.clone(),
            degree,
            group: None,
            normalization: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub id: String,
    pub kind: RecordKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<u32>,
    pub label: Option<CurveLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub level: u64,
    pub factors: Vec<FactorRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<BasisGroup>>,
    pub degree: usize,
    pub polynomial: HomogeneousPolynomial,
    pub marker: Option<FlexMarker>,
    pub new: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_expansions: Option<PrintedExpansions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<Variant>,
    /// `geometry` for models checked by smoothness and point counts only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl CurveRecord {
    pub fn display_name(&self) -> String {
        match (&self.label, &self.name) {
            (Some(l), _) => l.to_string(),
            (None, Some(n)) => n.clone(),
            (None, None) => self.id.clone(),
        }
    }

    pub fn geometry_only(&self) -> bool {
        self.verify.as_deref() == Some("geometry")
    }

    pub fn spec(&self) -> CurveSpec {
        CurveSpec {
            level: self.level,
            factors: self.factors.clone(),
            basis: self.basis.clone(),
            degree: self.degree,
            group: None,
            normalization: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Corpus {
    pub schema_version: u32,
    pub records: Vec<CurveRecord>,
}

impl Corpus {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn table(&self) -> impl Iterator<Item = &CurveRecord> {
        self.records.iter().filter(|r| r.kind == RecordKind::Table)
    }

    pub fn auxiliary(&self) -> impl Iterator<Item = &CurveRecord> {
        self.records.iter().filter(|r| r.kind == RecordKind::Auxiliary)
    }

    pub fn get(&self, id: &str) -> Option<&CurveRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Find a record by id, table label or row label (`243E`, `57ABC`).
    pub fn find(&self, key: &str) -> Option<&CurveRecord> {
        self.get(key).or_else(|| {
            self.records
                .iter()
                .find(|r| r.label.as_ref().is_some_and(|l| l.to_string() == key || strip_marker(l) == key))
        })
    }
}

fn strip_marker(l: &CurveLabel) -> String {
    CurveLabel { marker: FlexMarker::None, ..l.clone() }.to_string()
}

/// The embedded corpus.
pub fn load_corpus() -> Arc<Corpus> {
    static CORPUS: OnceLock<Arc<Corpus>> = OnceLock::new();
    CORPUS.get_or_init(|| Arc::new(Corpus::from_json(CORPUS_JSON).expect("embedded corpus is valid"))).clone()
}

/// SHA-256 of the embedded corpus text.
pub fn corpus_digest() -> String {
    text_digest(CORPUS_JSON)
}

pub fn text_digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Input of the relation pipeline: a factor list and, optionally, an explicit
/// basis recipe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub level: u64,
    pub factors: Vec<FactorRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<BasisGroup>>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<CongruenceGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

fn default_degree() -> usize {
    4
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("basis term refers to {0}, which is not among the factors")]
    UnknownFactor(String),
    #[error("{factor} has no coordinate {coordinate}")]
    Coordinate { factor: String, coordinate: usize },
    #[error("invalid scale {0:?}")]
    Scale(String),
    #[error("{factor} has coefficient field {found}, but the basis expects {expected}")]
    FieldMismatch { factor: String, expected: String, found: String },
}

impl SpecError {
    /// True when the failure is a fixture that is simply absent.
    pub fn is_missing_fixture(&self) -> bool {
        matches!(self, SpecError::Store(StoreError::Missing(_)))
    }
}

/// Packages of a spec, resolved from the store.
#[derive(Clone, Debug)]
pub struct ResolvedFactors {
    pub packages: Vec<(Arc<EigenformPackage>, u32)>,
}

impl ResolvedFactors {
    pub fn all_trivial(&self) -> bool {
        self.packages.iter().all(|(p, _)| p.label().character.is_trivial())
    }

    fn find(&self, label: &str) -> Result<&EigenformPackage, SpecError> {
        let want: EigenformLabel = label.parse()?;
        self.packages
            .iter()
            .map(|(p, _)| p.as_ref())
            .find(|p| *p.label() == want)
            .ok_or_else(|| SpecError::UnknownFactor(label.to_string()))
    }
}

impl CurveSpec {
    pub fn resolve(&self, store: &FixtureStore) -> Result<ResolvedFactors, SpecError> {
        let packages = self
            .factors
            .iter()
            .map(|f| {
                let label: EigenformLabel = f.label.parse()?;
                Ok((store.get(&label)?, f.multiplicity))
            })
            .collect::<Result<_, SpecError>>()?;
        Ok(ResolvedFactors { packages })
    }

    /// Default congruence group: `Gamma0` when every Nebentypus is trivial.
    pub fn group_for(&self, resolved: &ResolvedFactors) -> CongruenceGroup {
        self.group.unwrap_or(if resolved.all_trivial() { CongruenceGroup::Gamma0 } else { CongruenceGroup::Gamma1 })
    }

    pub fn build_basis(
        &self,
        resolved: &ResolvedFactors,
        normalization: Normalization,
    ) -> Result<NormalizedBasis, SpecError> {
        match &self.basis {
            None => Ok(AbelianFactorSpec::new(self.level, resolved.packages.clone())?.build(normalization)?),
            Some(groups) => {
                let mut built = Vec::with_capacity(groups.len());
                for g in groups {
                    let members =
                        g.members.iter().map(|terms| member_series(resolved, terms)).collect::<Result<Vec<_>, _>>()?;
                    built.push((g.reduce, members));
                }
                Ok(build_explicit(built)?)
            }
        }
    }
}

fn member_series(resolved: &ResolvedFactors, terms: &[BasisTerm]) -> Result<QSeries, SpecError> {
    let parts = terms
        .iter()
        .map(|t| {
            let pkg = resolved.find(&t.factor)?;
            if t.coordinate >= pkg.dimension() {
                return Err(SpecError::Coordinate { factor: t.factor.clone(), coordinate: t.coordinate });
            }
            if let Some(expected) = &t.field_poly {
                let want: Vec<Q> = expected.iter().map(|&c| Q::from_integer(c.into())).collect();
                let found = pkg.field().poly_high_first();
                if want != found {
                    return Err(SpecError::FieldMismatch {
                        factor: t.factor.clone(),
                        expected: format_poly(&want),
                        found: format_poly(&found),
                    });
                }
            }
            let scale: Q = parse_rational(&t.scale).ok_or_else(|| SpecError::Scale(t.scale.clone()))?;
            let s = pkg.coordinate_series(t.coordinate).degeneracy(t.degeneracy).map_err(BasisError::from)?;
            Ok(s.scale(&scale))
        })
        .collect::<Result<Vec<_>, SpecError>>()?;
    let mut acc = parts[0].clone();
    for s in &parts[1..] {
        acc = acc.add(s).map_err(BasisError::from)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_checksum() {
        assert_eq!(corpus_digest(), CORPUS_SHA256.trim());
    }

    #[test]
    fn corpus_shape() {
        let c = load_corpus();
        assert_eq!(c.table().count(), 44);
        assert_eq!(c.auxiliary().count(), 7);
        let rows: Vec<u32> = c.table().filter_map(|r| r.row).collect();
        assert_eq!(rows, (1..=44).collect::<Vec<_>>());
    }

    #[test]
    fn table_polynomials_are_normalized_quartics() {
        for r in load_corpus().table() {
            assert_eq!(r.degree, 4, "{}", r.id);
            assert_eq!(r.polynomial.degree(), 4, "{}", r.id);
            assert!(r.polynomial.is_normalized(), "{}", r.id);
            let label = r.label.as_ref().unwrap();
            assert_eq!(label.level, r.level);
            assert_eq!(Some(label.marker), r.marker);
        }
    }

    #[test]
    fn lookup_by_label() {
        let c = load_corpus();
        let r = c.find("C^{O}_{1215}").unwrap();
        assert_eq!(r.id, "1215O");
        assert_eq!(r.polynomial.to_string(), "X^3*Z - X*Y^3 + 3*X*Y*Z^2 + 5*X*Z^3 - 6*Y^2*Z^2 - 3*Y*Z^3 + Z^4");
        assert_eq!(r.marker, Some(FlexMarker::Flex));
        assert_eq!(c.find("243E").unwrap().level, 243);
    }

    #[test]
    fn largest_coefficient_is_98_at_65ab() {
        let c = load_corpus();
        let (best, id) = c.table().map(|r| (r.polynomial.max_abs_coeff(), r.id.clone())).max().unwrap();
        assert_eq!(best, 98.into());
        assert_eq!(id, "65AB");
    }

    #[test]
    fn level_855_has_three_odd_primes() {
        let r = load_corpus().find("855H").unwrap().clone();
        let primes = crate::forms::character::factorize(r.level);
        assert_eq!(primes.len(), 3);
        assert!(primes.iter().all(|(p, _)| p % 2 == 1));
    }
}
