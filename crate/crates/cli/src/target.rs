//! Resolving command-line targets: spec files, corpus records, polynomials.

use std::path::Path;
use std::sync::Arc;

use modcurves::records::{load_corpus, text_digest, Corpus, CurveRecord, CurveSpec};
use modcurves::HomogeneousPolynomial;

use crate::Failure;

pub enum Target {
    Spec(CurveSpec),
    Record(Box<CurveRecord>),
    Polynomial(HomogeneousPolynomial),
}

impl Target {
    /// A path to a spec file, then a corpus id or label, then a polynomial.
    pub fn resolve(arg: &str) -> Result<Self, Failure> {
        let path = Path::new(arg);
        if path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input("spec", format!("{}: {e}", path.display())))?;
            let spec: CurveSpec =
                serde_json::from_str(&text).map_err(|e| Failure::input("spec", format!("{}: {e}", path.display())))?;
            return Ok(Target::Spec(spec));
        }
        if let Some(r) = load_corpus().find(arg) {
            return Ok(Target::Record(Box::new(r.clone())));
        }
        if arg.chars().any(|c| matches!(c, 'X' | 'Y' | 'Z' | 'x' | 'y' | 'z')) {
            if let Ok(f) = arg.parse::<HomogeneousPolynomial>() {
                return Ok(Target::Polynomial(f));
            }
        }
        Err(Failure::input("input", format!("{arg:?} is not a spec file, corpus record or polynomial")))
    }

    pub fn spec(self) -> Result<CurveSpec, Failure> {
        match self {
            Target::Spec(s) => Ok(s),
            Target::Record(r) => Ok(r.spec()),
            Target::Polynomial(_) => Err(Failure::input("input", "expected a spec file or corpus record")),
        }
    }

    pub fn polynomial(&self) -> Result<HomogeneousPolynomial, Failure> {
        match self {
            Target::Record(r) => Ok(r.polynomial.normalized()),
            Target::Polynomial(f) if f.is_zero() => Err(Failure::input("input", "zero polynomial")),
            Target::Polynomial(f) => Ok(f.clone()),
            Target::Spec(_) => Err(Failure::input("input", "expected a polynomial or corpus record")),
        }
    }

    pub fn record(&self) -> Option<&CurveRecord> {
        match self {
            Target::Record(r) => Some(r),
            _ => None,
        }
    }
}

/// The built-in corpus, or one read from `path`, with its digest.
pub fn load_corpus_from(path: Option<&Path>) -> Result<(Arc<Corpus>, Option<String>), Failure> {
    match path {
        None => Ok((load_corpus(), None)),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| Failure::input("corpus", format!("{}: {e}", p.display())))?;
            let corpus =
                Corpus::from_json(&text).map_err(|e| Failure::input("corpus", format!("{}: {e}", p.display())))?;
            Ok((Arc::new(corpus), Some(text_digest(&text))))
        }
    }
}
