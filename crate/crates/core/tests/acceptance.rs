//! Acceptance criteria, one test per criterion.
//!
//! Each test writes a `criterion N ... PASS|FAIL` line straight to standard
//! output, so the lines show up without `--nocapture`.

use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use modcurves::forms::FixtureStore;
use modcurves::geometry::{
    check_smoothness, classify_p_infinity, count_points, smooth_mod_p, FlexKind, SmoothnessVerdict,
};
use modcurves::records::{
    load_corpus, reproduce_table, run_pipeline, trace_sum, verify_record, CurveRecord, FlexMarker, Outcome,
    PipelineOptions, TableReport, VerificationReport,
};
use modcurves::relation::{
    coset_count, find_relation, group_index, psi_certificate, Classification, CongruenceGroup, PsiStatus,
};
use modcurves::ring::{q, Q};
use modcurves::{HomogeneousPolynomial, QSeries};
use num_traits::One;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn store() -> &'static FixtureStore {
    static STORE: OnceLock<FixtureStore> = OnceLock::new();
    STORE.get_or_init(|| {
        FixtureStore::open(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")).expect("fixture directory")
    })
}

fn table() -> &'static TableReport {
    static TABLE: OnceLock<TableReport> = OnceLock::new();
    TABLE.get_or_init(|| reproduce_table(&load_corpus(), store(), &PipelineOptions::default()))
}

fn record(id: &str) -> CurveRecord {
    load_corpus().get(id).unwrap_or_else(|| panic!("record {id}")).clone()
}

fn line(n: &str, title: &str, ok: bool, detail: impl AsRef<str>) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n} {verdict}: {title} [{}]", detail.as_ref());
}

fn passed(r: &VerificationReport, check: &str) -> bool {
    r.check(check).is_some_and(|c| c.passed)
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn poly(s: &str) -> HomogeneousPolynomial {
    s.parse().unwrap()
}

#[test]
fn criterion_1_table_reproduction() {
    let t = table();
    let mut failures = Vec::new();
    let mut slow = Vec::new();
    for r in &t.reports {
        let rec = load_corpus().get(&r.id).unwrap().clone();
        if r.outcome == Outcome::Skipped {
            continue;
        }
        if !passed(r, "relation") {
            failures.push(r.id.clone());
        }
        let limit = if rec.level <= 500 { Duration::from_secs(300) } else { Duration::from_secs(1800) };
        if Duration::from_millis(r.elapsed_ms.unwrap_or(0)) > limit {
            slow.push(r.id.clone());
        }
    }
    let required = ["49A14", "243E", "57ABC", "39A06"];
    let missing: Vec<&str> = required
        .iter()
        .copied()
        .filter(|id| t.reports.iter().find(|r| r.id == *id).is_none_or(|r| !passed(r, "relation")))
        .collect();
    let covered = t.reports.iter().filter(|r| r.outcome != Outcome::Skipped).count();
    let slowest = t.reports.iter().filter_map(|r| r.elapsed_ms.map(|m| (m, r.id.as_str()))).max().unwrap();
    let ok = failures.is_empty() && slow.is_empty() && missing.is_empty() && covered == 44;
    line(
        "1",
        "table rows reproduce the stored quartic exactly",
        ok,
        format!(
            "{covered}/44 rows with fixtures, mismatches {failures:?}, over time {slow:?}, slowest {} at {} ms",
            slowest.1, slowest.0
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2_level_243_worked_example() {
    let r = verify_record(&record("243E-worked"), store(), &PipelineOptions::default());
    let out = r.pipeline.as_ref().unwrap();
    let psi = out.psi.as_ref().unwrap();
    let ok = passed(&r, "expansions")
        && passed(&r, "relation")
        && out.relation.dimension == 1
        && psi.status == PsiStatus::Constant
        && psi.c_f == q(1);
    line(
        "2",
        "243E expansions, quartic and c_F",
        ok,
        format!(
            "h1..h3 match through q^19 (printed to O(q^20)): {}, dimension {}, c_F = {}",
            passed(&r, "expansions"),
            out.relation.dimension,
            psi.c_f
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_degree_seven_relation() {
    let rec = record("178D-F7");
    let spec = rec.spec();
    let seven = run_pipeline(&spec, store(), &PipelineOptions { degree: Some(7), ..Default::default() }).unwrap();
    let four =
        run_pipeline(&spec, store(), &PipelineOptions { degree: Some(4), skip_geometry: true, ..Default::default() })
            .unwrap();
    let exact = seven.polynomial() == Some(&rec.polynomial.normalized());
    let none = four.relation.classification == Classification::None;
    line(
        "3",
        "178D: degree 7 gives F_7, degree 4 gives none",
        exact && none,
        format!("F_7 exact {exact}, degree-4 classification {:?}", four.relation.classification),
    );
    assert!(exact && none);
}

#[test]
fn criterion_4_degree_six_relation() {
    let rec = record("243F-F6");
    let out = run_pipeline(&rec.spec(), store(), &PipelineOptions { degree: Some(6), ..Default::default() }).unwrap();
    let exact = out.polynomial() == Some(&rec.polynomial.normalized());
    line("4", "243F: degree 6 gives F_6", exact, format!("dimension {}", out.relation.dimension));
    assert!(exact);
}

#[test]
fn criterion_5_non_constant_psi_and_level_30() {
    let r = verify_record(&record("120-C1"), store(), &PipelineOptions::default());
    let out = r.pipeline.as_ref().unwrap();
    let vanishes = out.vanishing.as_ref().is_some_and(|v| v.vanishes);
    let non_constant = out.psi.as_ref().is_some_and(|p| p.status == PsiStatus::NonConstant);
    let refused = r.modular == Some(false);
    let g = passed(&r, "variant-G-substitution");
    let h = passed(&r, "variant-H-substitution");
    let h_rel = passed(&r, "variant-H-relation");
    let h_psi = r
        .variants
        .iter()
        .find(|v| v.name == "H")
        .and_then(|v| v.pipeline.as_ref())
        .and_then(|p| p.psi.as_ref())
        .is_some_and(|p| p.status == PsiStatus::Constant && p.c_f == q(1));
    let ok = passed(&r, "relation") && vanishes && non_constant && refused && g && h && h_rel && h_psi;
    line(
        "5",
        "level 120: vanishing, psi non-constant, G and H substitutions, psi_H = 1 at level 30",
        ok,
        format!(
            "vanishing {vanishes}, non-constant {non_constant}, refused {refused}, G {g}, H {h}, H relation {h_rel}, psi_H = 1 {h_psi}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_flex_markers() {
    let mut mismatches = Vec::new();
    for rec in load_corpus().table() {
        let want = FlexKind::from_marker(rec.marker.unwrap_or(FlexMarker::None));
        let got = classify_p_infinity(&rec.polynomial.normalized(), None).kind;
        if got != want {
            mismatches.push(rec.id.clone());
        }
    }
    // The pipeline also cross-checks the flex type against ord h3.
    let pipeline: Vec<String> = table().reports.iter().filter(|r| !passed(r, "flex")).map(|r| r.id.clone()).collect();
    let ok = mismatches.is_empty() && pipeline.is_empty();
    line(
        "6",
        "flex markers on all 44 rows",
        ok,
        format!("coefficient test mismatches {mismatches:?}, ord h3 mismatches {pipeline:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_7_sturm_oracle() {
    let mut bad = Vec::new();
    for n in 1..=60 {
        for g in [CongruenceGroup::Gamma0, CongruenceGroup::Gamma1] {
            if coset_count(n, g) != group_index(n, g) {
                bad.push((n, g));
            }
        }
    }
    line("7", "index formula agrees with coset enumeration, N <= 60", bad.is_empty(), format!("disagreements {bad:?}"));
    assert!(bad.is_empty());
}

#[test]
fn criterion_8_point_counts() {
    let mut compared = 0;
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for rec in load_corpus().table() {
        let f = rec.polynomial.normalized();
        let resolved = rec.spec().resolve(store()).expect("fixtures for every row");
        for p in (2..50u64).filter(|&p| modcurves::forms::character::is_prime(p)) {
            if rec.level % p == 0 || smooth_mod_p(&f, p).is_none() {
                continue;
            }
            let start = Instant::now();
            let count = count_points(&f, p) as i64;
            slowest = slowest.max(start.elapsed());
            let trace = trace_sum(&resolved, p).unwrap();
            let expected = i64::try_from(num_bigint::BigInt::from(p + 1) - trace).unwrap();
            compared += 1;
            if count != expected {
                bad.push((rec.id.clone(), p, count, expected));
            }
        }
    }
    let ok = bad.is_empty() && slowest < Duration::from_secs(1);
    line(
        "8",
        "point counts equal p + 1 - sum Tr(a_p) at good primes below 50",
        ok,
        format!("{compared} (row, prime) pairs, mismatches {bad:?}, slowest prime {slowest:?}"),
    );
    assert!(ok);
}

fn series(coeffs: Vec<i64>, trunc: usize) -> QSeries {
    QSeries::from_ints(&coeffs, trunc)
}

fn arb_series() -> impl Strategy<Value = QSeries> {
    (1usize..25, 0usize..4).prop_flat_map(|(trunc, lead)| {
        proptest::collection::vec(-20i64..20, trunc).prop_map(move |mut v| {
            for c in v.iter_mut().take(lead.min(trunc)) {
                *c = 0;
            }
            series(v, trunc)
        })
    })
}

/// Compare two series on the range both determine.
fn agree(a: &QSeries, b: &QSeries) -> bool {
    let m = a.trunc().min(b.trunc());
    a.truncate(m) == b.truncate(m)
}

#[test]
fn criterion_9a_series_ring_axioms() {
    let mut runner = runner(1000);
    let result = runner.run(&(arb_series(), arb_series(), arb_series()), |(a, b, c)| {
        let ab = a.mul(&b).unwrap();
        prop_assert!(agree(&ab, &b.mul(&a).unwrap()));
        prop_assert!(agree(&ab.mul(&c).unwrap(), &a.mul(&b.mul(&c).unwrap()).unwrap()));
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = ab.add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(agree(&left, &right));
        prop_assert!(agree(&a.add(&b).unwrap().add(&c).unwrap(), &a.add(&b.add(&c).unwrap()).unwrap()));
        prop_assert!(a.sub(&a).unwrap().vanishes_through(a.trunc()));
        let leibniz = a.theta().mul(&b).unwrap().add(&a.mul(&b.theta()).unwrap()).unwrap();
        prop_assert!(agree(&ab.theta(), &leibniz));
        Ok(())
    });
    line("9a", "series ring axioms and Leibniz rule, 1000 cases", result.is_ok(), format!("{result:?}"));
    result.unwrap();
}

type Matrix = [[i64; 3]; 3];

fn det3(m: &Matrix) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inverse(m: &Matrix) -> [[Q; 3]; 3] {
    let d = Q::from_integer(det3(m).into());
    let cof = |r: usize, c: usize| {
        let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
        if (r + c).is_multiple_of(2) {
            minor
        } else {
            -minor
        }
    };
    std::array::from_fn(|i| std::array::from_fn(|j| Q::from_integer(cof(j, i).into()) / &d))
}

/// Products of elementary matrices, a sign and a permutation.
fn arb_unimodular() -> impl Strategy<Value = Matrix> {
    (proptest::collection::vec((0usize..3, 0usize..3, -3i64..=3), 1..6), 0usize..6, any::<bool>()).prop_map(
        |(ops, perm, neg)| {
            let mut m: Matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
            for (i, j, k) in ops {
                if i != j {
                    let src = m[j];
                    for (x, y) in m[i].iter_mut().zip(src) {
                        *x += k * y;
                    }
                }
            }
            let p = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
            let mut out = [m[p[0]], m[p[1]], m[p[2]]];
            if neg {
                out[0] = out[0].map(|x| -x);
            }
            out
        },
    )
}

/// `g = M^{-1} f`.
fn transform(f: &[QSeries; 3], minv: &[[Q; 3]; 3]) -> [QSeries; 3] {
    std::array::from_fn(|i| {
        (0..3).fold(QSeries::zero(modcurves::Rationals, f[0].trunc()), |acc, j| {
            acc.add(&f[j].scale(&minv[i][j])).unwrap()
        })
    })
}

#[test]
fn criterion_9b_psi_basis_change_law() {
    // F = X^2 (XZ - Y^2) vanishes on (q, q^2, q^3) with constant psi.
    let m = 60;
    let f = [series(vec![1], m), series(vec![0, 1], m), series(vec![0, 0, 1], m)];
    let form = poly("X^3*Z - X^2*Y^2");
    let bound = 40;
    let base = psi_certificate(&form, &f, bound).unwrap();
    assert_eq!(base.status, PsiStatus::Constant);
    let mut runner = runner(100);
    let result = runner.run(&arb_unimodular(), |mat| {
        let minv = inverse(&mat);
        let g = transform(&f, &minv);
        let form_g = form.compose(&mat);
        let cert = psi_certificate(&form_g, &g, bound).unwrap();
        let det_inv = Q::one() / Q::from_integer(det3(&mat).into());
        prop_assert_eq!(cert.status, PsiStatus::Constant);
        prop_assert_eq!(cert.c_f.clone(), &base.c_f * det_inv);
        Ok(())
    });
    line("9b", "psi scales by det(M^-1) under 100 unimodular M", result.is_ok(), format!("{result:?}"));
    result.unwrap();
}

#[test]
fn criterion_9c_formal_basis_dimension() {
    let m = 60;
    let f = [series(vec![1], m), series(vec![0, 1], m), series(vec![0, 0, 1], m)];
    let r = find_relation(&f, 4, 40).unwrap();
    let stated = 3;
    let ok = r.dimension == stated && r.classification == Classification::HyperellipticSignature;
    line(
        "9c",
        "formal basis (q, q^2, q^3) at degree 4 has nullspace dimension 3",
        ok,
        format!(
            "computed dimension {} ({:?}); the quartic multiples of XZ - Y^2 are (XZ - Y^2) times the 6 quadrics; \
             dimension 3 is the degree-3 count",
            r.dimension, r.classification
        ),
    );
    // Known defect in the stated value: the computed dimension is the
    // mathematically correct one and is pinned here so regressions still fail.
    assert_eq!(r.dimension, 6);
    assert_eq!(r.classification, Classification::HyperellipticSignature);
    assert_eq!(find_relation(&f, 3, 40).unwrap().dimension, 3);
}

#[test]
fn criterion_9d_profile_guard() {
    let strategy = (6usize..12, proptest::collection::vec(-9i64..9, 100)).prop_map(|(k, tail)| {
        let m = 40;
        let mut h1 = vec![1];
        h1.extend_from_slice(&tail[..30]);
        let mut h2 = vec![0, 1];
        h2.extend_from_slice(&tail[30..60]);
        let mut h3 = vec![0; k - 1];
        h3.push(1);
        h3.extend_from_slice(&tail[60..60 + (m - k)]);
        [series(h1, m), series(h2, m), series(h3, m)]
    });
    let mut runner = runner(200);
    let result = runner.run(&strategy, |h| {
        let r = find_relation(&h, 4, 30).unwrap();
        prop_assert!(r.excluded_by_profile);
        prop_assert_eq!(r.classification, Classification::None);
        Ok(())
    });
    line("9d", "profile guard rejects degree 4 when ord h3 >= 6", result.is_ok(), format!("{result:?}"));
    result.unwrap();
}

/// A quartic singular at a point: no monomials of `Z`-degree above 2 (so
/// (0:0:1) is singular), moved by a unimodular matrix.
fn arb_singular_quartic() -> impl Strategy<Value = HomogeneousPolynomial> {
    (proptest::collection::vec(-5i64..=5, 12), arb_unimodular()).prop_filter_map("zero form", |(c, m)| {
        let monos: Vec<(u32, u32, u32)> =
            modcurves::poly::monomials(4).into_iter().filter(|&(_, _, k)| k <= 2).collect();
        let terms: Vec<((u32, u32, u32), i64)> = monos.into_iter().zip(c).collect();
        let f = HomogeneousPolynomial::from_terms(4, &terms);
        (!f.is_zero()).then(|| f.compose(&m))
    })
}

#[test]
fn criterion_9e_smoothness_separates() {
    let rough: Vec<String> = load_corpus()
        .table()
        .filter(|r| check_smoothness(&r.polynomial.normalized()).verdict != SmoothnessVerdict::Smooth)
        .map(|r| r.id.clone())
        .collect();
    let mut fixed = vec![
        poly("X^2*Y*Z + X*Y^2*Z + X*Y*Z^2"),
        poly("X^4 + Y^4 + Z^4 + 2*X^2*Y^2 + 2*X^2*Z^2 + 2*Y^2*Z^2"),
        poly("X^3*Z - X^2*Y^2"),
        poly("Y^2*Z^2 - X^4 - X^3*Z"),
    ];
    fixed.push(HomogeneousPolynomial::from_terms(4, &[((4, 0, 0), 1), ((0, 4, 0), -1)]));
    let mut flagged = fixed.iter().all(|f| check_smoothness(f).verdict == SmoothnessVerdict::Singular);
    let mut runner = runner(40);
    let result = runner.run(&arb_singular_quartic(), |f| {
        prop_assert_eq!(check_smoothness(&f).verdict, SmoothnessVerdict::Singular, "{}", f);
        Ok(())
    });
    flagged &= result.is_ok();
    let ok = rough.is_empty() && flagged;
    line(
        "9e",
        "smoothness: all 44 rows smooth, constructed singular quartics flagged",
        ok,
        format!("non-smooth rows {rough:?}, singular set flagged {flagged} {result:?}"),
    );
    assert!(ok);
}

#[test]
fn corpus_rows_have_fixtures() {
    let t = table();
    assert_eq!(t.total, 44);
    assert_eq!(t.skipped, 0, "{}", t.summary_line());
}
