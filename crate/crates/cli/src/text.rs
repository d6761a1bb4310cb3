//! Plain-text renderings for `--format text`.

use std::fmt::Write;

use modcurves::geometry::{FlexClassification, PointCount, SmoothnessCertificate};
use modcurves::records::{PipelineOutput, VerificationReport};
use modcurves::HomogeneousPolynomial;
use serde_json::Value;

pub fn ingest(rows: &[Value]) -> String {
    let mut s = String::new();
    for r in rows {
        let path = r["path"].as_str().unwrap_or_default();
        if r["valid"].as_bool() == Some(true) {
            let _ =
                writeln!(s, "ok       {path}  {} ({} coefficients)", r["label"].as_str().unwrap(), r["coefficients"]);
        } else {
            let _ = writeln!(s, "invalid  {path}  {}", r["error"].as_str().unwrap_or_default());
        }
    }
    s
}

pub fn basis(value: &Value, series: &[Vec<String>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "case {}, ord h3 {}", value["case"], value["ord_h3"]);
    for (k, coeffs) in series.iter().enumerate() {
        let terms: Vec<String> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.as_str() != "0")
            .map(|(i, c)| {
                let q = if i == 0 { "q".to_string() } else { format!("q^{}", i + 1) };
                match c.as_str() {
                    "1" => q,
                    "-1" => format!("-{q}"),
                    _ => format!("{c}*{q}"),
                }
            })
            .collect();
        let _ = writeln!(s, "h{} = {} + O(q^{})", k + 1, terms.join(" + ").replace("+ -", "- "), coeffs.len() + 1);
    }
    s
}

pub fn find(out: &PipelineOutput, verdict: &str) -> String {
    let mut s = String::new();
    let r = &out.relation;
    let _ = writeln!(
        s,
        "group {}, relation bound {}, psi bound {}",
        out.group, out.relation_bound.bound, out.psi_bound.bound
    );
    let _ = writeln!(s, "degree {}: nullspace dimension {}, {:?}", r.degree, r.dimension, r.classification);
    for f in &r.nullspace {
        let _ = writeln!(s, "  {f}");
    }
    if let Some(v) = &out.vanishing {
        let _ = writeln!(s, "vanishing through q^{}: {}", v.bound, v.vanishes);
    }
    if let Some(p) = &out.psi {
        let _ = writeln!(s, "psi: {:?}, c_F = {}", p.status, p.c_f);
    }
    if let Some(c) = &out.smoothness {
        let _ = writeln!(s, "smoothness: {:?} ({:?})", c.verdict, c.witness);
    }
    if let Some(f) = &out.flex {
        let _ = writeln!(s, "P = (1:0:0): {}", f.kind);
    }
    if !out.point_counts.is_empty() {
        s.push_str(&counts(&out.point_counts));
    }
    let _ = writeln!(s, "verdict: {verdict}");
    s
}

pub fn reports(reports: &[VerificationReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let _ = write!(s, "{:<12} {:<28} {:?}", r.id, r.label, r.outcome);
        if !failed.is_empty() {
            let _ = write!(s, "  failed: {}", failed.join(", "));
        }
        if let Some(e) = &r.error {
            let _ = write!(s, "  {e}");
        }
        s.push('\n');
    }
    s
}

pub fn classify(
    f: &HomogeneousPolynomial,
    smooth: &SmoothnessCertificate,
    flex: &FlexClassification,
    matches: Option<bool>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{f}");
    let _ = writeln!(s, "smoothness: {:?} ({:?})", smooth.verdict, smooth.witness);
    let _ = writeln!(s, "P = (1:0:0): {}", flex.kind);
    if let Some(m) = matches {
        let _ = writeln!(s, "matches stored marker: {m}");
    }
    s
}

pub fn counts(counts: &[PointCount]) -> String {
    let mut s = String::new();
    for c in counts {
        let expected = c.expected.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        let status = match c.consistent {
            Some(true) => "ok",
            Some(false) => "MISMATCH",
            None => "no expected value",
        };
        let _ = writeln!(s, "p = {:>3}: {:>5} points, expected {:>5}  {status}", c.p, c.count, expected);
    }
    s
}
