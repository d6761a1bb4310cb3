//! The certification pipeline and per-record verification.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{Corpus, CurveRecord, CurveSpec, Expectations, ResolvedFactors, SpecError, Variant};
use crate::basis::{BasisCase, BasisDerivation, Normalization, NormalizedBasis};
use crate::forms::character::is_prime;
use crate::forms::FixtureStore;
use crate::geometry::{
    check_smoothness, classify_p_infinity, smooth_mod_p, FlexClassification, FlexKind, PointCount,
    SmoothnessCertificate, SmoothnessVerdict,
};
use crate::poly::HomogeneousPolynomial;
use crate::relation::{
    certify_vanishing, find_relation, psi_certificate, Classification, CongruenceGroup, PsiCertificate, PsiStatus,
    RelationResult, SturmBound, VanishingCertificate,
};
use crate::ring::{parse_rational, q, Q};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default upper limit for point-count primes.
pub const POINT_COUNT_LIMIT: u64 = 50;

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    pub normalization: Normalization,
    pub group: Option<CongruenceGroup>,
    pub degree: Option<usize>,
    /// Truncate the basis to this many coefficients before the search.
    pub order: Option<usize>,
    /// Primes for point counts; the good primes below the limit by default.
    pub primes: Option<Vec<u64>>,
    /// Skip smoothness, flex classification and point counts.
    pub skip_geometry: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Fixtures,
    Basis,
    Relation,
    Vanishing,
    Psi,
    Geometry,
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage:?}] {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
    /// Set when the failure is an absent fixture file.
    pub missing_fixture: bool,
}

impl PipelineError {
    fn new(stage: Stage, e: impl std::fmt::Display) -> Self {
        PipelineError { stage, message: e.to_string(), missing_fixture: false }
    }

    fn from_spec(stage: Stage, e: SpecError) -> Self {
        PipelineError { stage, message: e.to_string(), missing_fixture: e.is_missing_fixture() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureDigest {
    pub label: String,
    pub sha256: String,
    pub source: Option<String>,
}

/// What the basis looked like, for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSummary {
    pub case: BasisCase,
    pub normalization: Option<Normalization>,
    pub derivation: BasisDerivation,
    pub ord_h3: Option<usize>,
    pub precision: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub group: CongruenceGroup,
    pub relation_bound: SturmBound,
    pub psi_bound: SturmBound,
    pub basis: BasisSummary,
    pub relation: RelationResult,
    pub vanishing: Option<VanishingCertificate>,
    pub psi: Option<PsiCertificate>,
    pub smoothness: Option<SmoothnessCertificate>,
    pub flex: Option<FlexClassification>,
    pub point_counts: Vec<PointCount>,
    pub fixtures: Vec<FixtureDigest>,
    #[serde(skip)]
    pub h: Option<NormalizedBasis>,
}

impl PipelineOutput {
    pub fn polynomial(&self) -> Option<&HomogeneousPolynomial> {
        self.relation.unique()
    }

    /// Vanishing certified, `psi` constant and the model smooth.
    pub fn modular(&self) -> bool {
        self.vanishing.as_ref().is_some_and(|v| v.vanishes)
            && self.psi.as_ref().is_some_and(|p| p.status == PsiStatus::Constant)
            && self.smoothness.as_ref().is_some_and(|s| s.verdict == SmoothnessVerdict::Smooth)
    }
}

fn digests(resolved: &ResolvedFactors) -> Vec<FixtureDigest> {
    resolved
        .packages
        .iter()
        .map(|(p, _)| FixtureDigest {
            label: p.label().to_string(),
            sha256: p.digest().to_string(),
            source: p.provenance().get("source").and_then(|s| s.as_str()).map(str::to_string),
        })
        .collect()
}

/// Sum of multiplicity times `Tr(a_p)` over the factors.
pub fn trace_sum(resolved: &ResolvedFactors, p: u64) -> Option<BigInt> {
    let mut acc = BigInt::zero();
    for (pkg, m) in &resolved.packages {
        if pkg.level() % p == 0 {
            return None;
        }
        let t = pkg.trace_a(p as usize)?;
        if !t.is_integer() {
            return None;
        }
        acc += t.to_integer() * BigInt::from(*m);
    }
    Some(acc)
}

/// Point counts at the given primes, or at the good primes below the limit.
pub fn point_counts(
    f: &HomogeneousPolynomial,
    level: u64,
    resolved: Option<&ResolvedFactors>,
    primes: Option<&[u64]>,
) -> Vec<PointCount> {
    let primes: Vec<u64> = match primes {
        Some(ps) => ps.to_vec(),
        None => (2..POINT_COUNT_LIMIT).filter(|&p| is_prime(p)).collect(),
    };
    primes
        .par_iter()
        .filter(|&&p| is_prime(p))
        .map(|&p| {
            let good = !level.is_multiple_of(p) && smooth_mod_p(f, p).is_some();
            let trace = if good { resolved.and_then(|r| trace_sum(r, p)) } else { None };
            let mut c = PointCount::new(f, p, trace.as_ref());
            if level.is_multiple_of(p) {
                // A bad prime of the Jacobian; the model may still look smooth.
                c.hasse_weil = None;
            }
            c
        })
        .collect()
}

pub fn run_pipeline(
    spec: &CurveSpec,
    store: &FixtureStore,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let resolved = spec.resolve(store).map_err(|e| PipelineError::from_spec(Stage::Fixtures, e))?;
    let normalization = spec.normalization.unwrap_or(opts.normalization);
    let mut basis =
        spec.build_basis(&resolved, normalization).map_err(|e| PipelineError::from_spec(Stage::Basis, e))?;
    if let Some(m) = opts.order {
        for s in basis.h.iter_mut() {
            *s = s.truncate(m.min(s.trunc()));
        }
    }
    let degree = opts.degree.unwrap_or(spec.degree);
    let group = opts.group.or(spec.group).unwrap_or_else(|| spec.group_for(&resolved));
    let relation_bound = crate::relation::sturm_bound(spec.level, 2 * degree as u64, group);
    let psi_bound = crate::relation::sturm_bound(spec.level, 6, group);
    let bound = relation_bound.bound as usize;
    let relation = find_relation(&basis.h, degree, bound).map_err(|e| PipelineError::new(Stage::Relation, e))?;
    let summary = BasisSummary {
        case: basis.case,
        normalization: basis.normalization,
        derivation: basis.derivation.clone(),
        ord_h3: basis.ord_h3().exact(),
        precision: basis.trunc(),
    };
    let mut out = PipelineOutput {
        group,
        relation_bound,
        psi_bound,
        basis: summary,
        relation,
        vanishing: None,
        psi: None,
        smoothness: None,
        flex: None,
        point_counts: Vec::new(),
        fixtures: digests(&resolved),
        h: None,
    };
    if let Some(f) = out.relation.unique().cloned() {
        out.vanishing =
            Some(certify_vanishing(&f, &basis.h, bound).map_err(|e| PipelineError::new(Stage::Vanishing, e))?);
        if degree == 4 {
            out.psi = Some(
                psi_certificate(&f, &basis.h, psi_bound.bound as usize)
                    .map_err(|e| PipelineError::new(Stage::Psi, e))?,
            );
        }
        if !opts.skip_geometry {
            let smooth = check_smoothness(&f);
            if degree == 4 {
                out.flex = Some(classify_p_infinity(&f, out.basis.ord_h3));
            }
            if smooth.verdict == SmoothnessVerdict::Smooth {
                out.point_counts = point_counts(&f, spec.level, Some(&resolved), opts.primes.as_deref());
            }
            out.smoothness = Some(smooth);
        }
    }
    out.h = Some(basis);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Verified,
    Mismatch,
    Skipped,
    Error,
}

/// One named comparison inside a verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariantReport {
    pub name: String,
    pub substitution_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineOutput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub tool_version: String,
    pub label: String,
    pub outcome: Outcome,
    pub checks: Vec<Check>,
    pub stored: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found: Option<String>,
    /// Vanishing, constant `psi` and smoothness all hold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modular: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineOutput>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<VariantReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<SmoothnessCertificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub point_counts: Vec<PointCount>,
    pub fixtures: Vec<FixtureDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl VerificationReport {
    fn new(record: &CurveRecord) -> Self {
        VerificationReport {
            id: record.id.clone(),
            tool_version: TOOL_VERSION.to_string(),
            label: record.display_name(),
            outcome: Outcome::Verified,
            checks: Vec::new(),
            stored: record.polynomial.to_string(),
            found: None,
            modular: None,
            pipeline: None,
            variants: Vec::new(),
            smoothness: None,
            point_counts: Vec::new(),
            fixtures: Vec::new(),
            error: None,
            elapsed_ms: None,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn finish(mut self) -> Self {
        if self.outcome == Outcome::Verified && self.checks.iter().any(|c| !c.passed) {
            self.outcome = Outcome::Mismatch;
        }
        self
    }

    fn fail(mut self, e: PipelineError) -> Self {
        self.outcome = if e.missing_fixture { Outcome::Skipped } else { Outcome::Error };
        self.error = Some(e.to_string());
        self
    }
}

/// Expectation checks common to records and variants.
fn expectation_checks(prefix: &str, expect: &Expectations, out: &PipelineOutput, checks: &mut Vec<Check>) {
    if let Some(want) = &expect.psi {
        let got = out.psi.as_ref().map(|p| p.status);
        let want_status = if want == "constant" { PsiStatus::Constant } else { PsiStatus::NonConstant };
        checks.push(Check::new(
            format!("{prefix}psi"),
            got == Some(want_status),
            format!("expected {want}, got {got:?}"),
        ));
    }
    if let Some(want) = &expect.c_f {
        let want = parse_rational(want);
        let got = out.psi.as_ref().map(|p| p.c_f.clone());
        checks.push(Check::new(
            format!("{prefix}c_f"),
            want.is_some() && got == want,
            format!("expected {}, got {}", fmt_opt(&want), fmt_opt(&got)),
        ));
    }
}

fn fmt_opt(q: &Option<Q>) -> String {
    q.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "none".into())
}

fn point_count_check(counts: &[PointCount]) -> Check {
    let compared: Vec<&PointCount> = counts.iter().filter(|c| c.consistent.is_some()).collect();
    let bad: Vec<u64> = compared.iter().filter(|c| c.consistent == Some(false)).map(|c| c.p).collect();
    let hw: Vec<u64> = counts.iter().filter(|c| c.hasse_weil == Some(false)).map(|c| c.p).collect();
    Check::new(
        "point-counts",
        bad.is_empty() && hw.is_empty() && !compared.is_empty(),
        format!("{} primes compared, inconsistent at {bad:?}, outside Hasse-Weil at {hw:?}", compared.len()),
    )
}

fn series_checks(record: &CurveRecord, h: &NormalizedBasis, checks: &mut Vec<Check>) {
    let Some(printed) = &record.printed_expansions else { return };
    let mut diffs = Vec::new();
    for (k, terms) in printed.series().iter().enumerate() {
        for n in 1..printed.precision {
            let want = terms.iter().find(|(m, _)| *m == n).map(|(_, c)| *c).unwrap_or(0);
            match h.h[k].coeff(n) {
                Some(c) if c == q(want) => {}
                got => diffs.push(format!("h{}[{n}]: expected {want}, got {}", k + 1, fmt_opt(&got))),
            }
        }
    }
    checks.push(Check::new("expansions", diffs.is_empty(), diffs.join("; ")));
}

fn substitution_holds(f: &HomogeneousPolynomial, v: &Variant) -> bool {
    let m: [[Q; 3]; 3] = v.substitution.map(|row| row.map(q));
    let g = f.substitute(&m);
    g == v.polynomial.normalized()
}

/// Rebuild and certify a stored record.
pub fn verify_record(record: &CurveRecord, store: &FixtureStore, opts: &PipelineOptions) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(record);
    let stored = record.polynomial.normalized();
    let spec = record.spec();

    if record.geometry_only() {
        let resolved = match spec.resolve(store) {
            Ok(r) => r,
            Err(e) => return report.fail(PipelineError::from_spec(Stage::Fixtures, e)),
        };
        let smooth = check_smoothness(&stored);
        report.checks.push(Check::new(
            "smooth",
            smooth.verdict == SmoothnessVerdict::Smooth,
            format!("{:?}", smooth.verdict),
        ));
        if smooth.verdict == SmoothnessVerdict::Smooth {
            report.point_counts = point_counts(&stored, record.level, Some(&resolved), opts.primes.as_deref());
            report.checks.push(point_count_check(&report.point_counts));
        }
        report.smoothness = Some(smooth);
        report.fixtures = digests(&resolved);
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        return report.finish();
    }

    let out = match run_pipeline(&spec, store, opts) {
        Ok(o) => o,
        Err(e) => return report.fail(e),
    };
    report.fixtures = out.fixtures.clone();
    let found = out.polynomial().cloned();
    report.found = found.as_ref().map(|f| f.to_string());
    report.checks.push(Check::new(
        "relation",
        found.as_ref() == Some(&stored),
        format!("dimension {}, classification {:?}", out.relation.dimension, out.relation.classification),
    ));
    if let Some(v) = &out.vanishing {
        report.checks.push(Check::new("vanishing", v.vanishes, format!("bound {}", v.bound)));
    }
    if let Some(h) = &out.h {
        series_checks(record, h, &mut report.checks);
    }
    if let Some(expect) = &record.expect {
        expectation_checks("", expect, &out, &mut report.checks);
        if expect.quartic.as_deref() == Some("none") {
            let quartic = PipelineOptions { degree: Some(4), skip_geometry: true, ..opts.clone() };
            match run_pipeline(&spec, store, &quartic) {
                Ok(o) => report.checks.push(Check::new(
                    "no-quartic",
                    o.relation.classification == Classification::None,
                    format!("degree-4 classification {:?}", o.relation.classification),
                )),
                Err(e) => report.checks.push(Check::new("no-quartic", false, e.to_string())),
            }
        }
    }
    if record.degree == 4 && !opts.skip_geometry {
        if let Some(s) = &out.smoothness {
            report.checks.push(Check::new(
                "smooth",
                s.verdict == SmoothnessVerdict::Smooth,
                format!("{:?}", s.verdict),
            ));
        }
        if let (Some(marker), Some(flex)) = (record.marker, &out.flex) {
            let want = FlexKind::from_marker(marker);
            report.checks.push(Check::new(
                "flex",
                flex.kind == want && flex.consistent != Some(false),
                format!("marker {marker:?}, classified {}, ord h3 {:?}", flex.kind, flex.ord_h3),
            ));
        }
        if record.kind == super::corpus::RecordKind::Table {
            report.checks.push(point_count_check(&out.point_counts));
        }
    }
    for v in &record.variants {
        let substitution = substitution_holds(&stored, v);
        report.checks.push(Check::new(
            format!("variant-{}-substitution", v.name),
            substitution,
            format!("{:?}", v.substitution),
        ));
        let mut vr = VariantReport { name: v.name.clone(), substitution_holds: substitution, pipeline: None };
        if let Some(vspec) = v.spec(record.degree) {
            let vopts = PipelineOptions { degree: None, group: None, ..opts.clone() };
            match run_pipeline(&vspec, store, &vopts) {
                Ok(o) => {
                    let vf = o.polynomial().cloned();
                    report.checks.push(Check::new(
                        format!("variant-{}-relation", v.name),
                        vf.as_ref() == Some(&v.polynomial.normalized()),
                        vf.map(|f| f.to_string()).unwrap_or_else(|| "no unique relation".into()),
                    ));
                    if let Some(e) = &v.expect {
                        expectation_checks(&format!("variant-{}-", v.name), e, &o, &mut report.checks);
                    }
                    vr.pipeline = Some(o);
                }
                Err(e) => report.checks.push(Check::new(format!("variant-{}-relation", v.name), false, e.to_string())),
            }
        }
        report.variants.push(vr);
    }
    report.modular = found.as_ref().filter(|_| record.degree == 4).map(|_| out.modular());
    report.pipeline = Some(out);
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    report.finish()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableReport {
    pub tool_version: String,
    pub total: usize,
    pub verified: usize,
    pub skipped: usize,
    pub mismatched: usize,
    pub errors: usize,
    pub corpus_sha256: String,
    pub reports: Vec<VerificationReport>,
}

impl TableReport {
    pub fn summary_line(&self) -> String {
        let mut s = format!(
            "verified {}/{}, skipped {} (missing fixtures), mismatched {}",
            self.verified, self.total, self.skipped, self.mismatched
        );
        if self.errors > 0 {
            s.push_str(&format!(", errors {}", self.errors));
        }
        s
    }
}

/// Verify every table row; rows run in parallel.
pub fn reproduce_table(corpus: &Corpus, store: &FixtureStore, opts: &PipelineOptions) -> TableReport {
    let rows: Vec<&CurveRecord> = corpus.table().collect();
    let reports: Vec<VerificationReport> = rows.par_iter().map(|r| verify_record(r, store, opts)).collect();
    let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
    TableReport {
        tool_version: TOOL_VERSION.to_string(),
        total: rows.len(),
        verified: count(Outcome::Verified),
        skipped: count(Outcome::Skipped),
        mismatched: count(Outcome::Mismatch),
        errors: count(Outcome::Error),
        corpus_sha256: super::corpus::corpus_digest(),
        reports,
    }
}

/// Strip wall-clock fields so reports compare byte for byte.
pub fn strip_timings(report: &mut VerificationReport) {
    report.elapsed_ms = None;
}
