//! `modcurves`: build, search and verify plane models of modular curves.
//!
//! Reports go to standard output (JSON by default), a one-line summary to
//! standard error. Exit status is 0 on success, 1 when a verification fails
//! and 2 for unusable input.

mod target;
mod text;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modcurves::basis::Normalization;
use modcurves::forms::{ingest_files, FixtureStore, FIXTURE_ENV};
use modcurves::geometry::{check_smoothness, classify_p_infinity, FlexKind, SmoothnessVerdict};
use modcurves::records::{
    point_counts, reproduce_table, run_pipeline, strip_timings, verify_record, Outcome, PipelineOptions, Stage,
};
use modcurves::relation::{CongruenceGroup, PsiStatus};
use serde_json::{json, Value};

use target::{load_corpus_from, Target};

#[derive(Parser, Debug)]
#[command(name = "modcurves", version, about = "Plane quartic models of genus-3 modular curves")]
struct Cli {
    /// Fixture directory (package files under `packages/`).
    #[arg(long, global = true, env = FIXTURE_ENV, default_value = "fixtures")]
    fixtures: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit timings so repeated runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate package files or directories of them.
    Ingest {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Build the normalized basis h1, h2, h3 of a spec or record.
    Basis {
        target: String,
        /// Coefficients to print per series.
        #[arg(long, default_value_t = 20)]
        terms: usize,
        /// Basis normalization: reduced echelon form or the case formulas.
        #[arg(long, default_value = "reduced")]
        normalization: Normalization,
    },
    /// Search for the relation satisfied by a basis and certify it.
    Find {
        /// Spec file, or the id or label of a corpus record.
        target: String,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Rebuild corpus records and compare with the stored models.
    Verify {
        /// Record ids or labels; every record when omitted.
        keys: Vec<String>,
        /// Corpus file replacing the built-in one.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Smoothness and flex type at (1:0:0) of a quartic.
    Classify {
        /// A polynomial in X, Y, Z, or the id or label of a corpus record.
        target: String,
    },
    /// Count points modulo primes and compare with the Hecke traces.
    CountPoints {
        /// A polynomial in X, Y, Z, or the id or label of a corpus record.
        target: String,
        /// Comma-separated primes; defaults to every prime below 50.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Level, for a bare polynomial; primes dividing it get no expected value.
        #[arg(long)]
        level: Option<u64>,
    },
    /// Verify every table row.
    ReproduceTable {
        /// Corpus file replacing the built-in one.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct PipelineArgs {
    /// Degree of the relation to search for.
    #[arg(long)]
    degree: Option<usize>,
    /// Group for the Sturm bounds: g0, g1 or custom:<index>.
    #[arg(long)]
    group: Option<CongruenceGroup>,
    /// Truncate the basis to this many coefficients.
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated primes for the point-count check.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Basis normalization: reduced echelon form or the case formulas.
    #[arg(long, default_value = "reduced")]
    normalization: Normalization,
}

impl PipelineArgs {
    fn options(&self) -> PipelineOptions {
        PipelineOptions {
            normalization: self.normalization,
            group: self.group,
            degree: self.degree,
            order: self.order,
            primes: self.primes.clone(),
            skip_geometry: false,
        }
    }
}

/// A failure that ends the command.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    stage: &'static str,
    message: String,
}

impl Failure {
    pub fn input(stage: &'static str, message: impl Into<String>) -> Self {
        Failure { code: 2, stage, message: message.into() }
    }

    fn verification(stage: &'static str, message: impl Into<String>) -> Self {
        Failure { code: 1, stage, message: message.into() }
    }
}

fn stage_name(s: Stage) -> &'static str {
    match s {
        Stage::Fixtures => "fixtures",
        Stage::Basis => "basis",
        Stage::Relation => "relation",
        Stage::Vanishing => "vanishing",
        Stage::Psi => "psi",
        Stage::Geometry => "geometry",
    }
}

struct Ctx {
    fixtures: PathBuf,
    format: Format,
    deterministic: bool,
}

impl Ctx {
    fn store(&self) -> Result<FixtureStore, Failure> {
        FixtureStore::open(&self.fixtures).map_err(|e| Failure::input("fixtures", e.to_string()))
    }

    fn emit(&self, value: &Value, text: impl FnOnce() -> String) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable report")),
            Format::Text => print!("{}", text()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { fixtures: cli.fixtures, format: cli.format, deterministic: cli.deterministic };
    let result = match cli.command {
        Command::Ingest { paths } => ingest(&ctx, &paths),
        Command::Basis { target, terms, normalization } => basis(&ctx, &target, terms, normalization),
        Command::Find { target, pipeline } => find(&ctx, &target, &pipeline),
        Command::Verify { keys, corpus, pipeline } => verify(&ctx, &keys, corpus, &pipeline),
        Command::Classify { target } => classify(&ctx, &target),
        Command::CountPoints { target, primes, level } => count(&ctx, &target, primes, level),
        Command::ReproduceTable { corpus, pipeline } => table(&ctx, corpus, &pipeline),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.stage, f.message);
            ExitCode::from(f.code)
        }
    }
}

fn ingest(ctx: &Ctx, paths: &[PathBuf]) -> Result<(), Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Failure::input("ingest", format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    let entries = ingest_files(&files);
    let rows: Vec<Value> = entries
        .iter()
        .map(|e| match &e.result {
            Ok(p) => json!({
                "path": e.path.display().to_string(),
                "valid": true,
                "label": p.label().to_string(),
                "dimension": p.dimension(),
                "coefficients": p.trunc(),
                "sha256": p.digest(),
            }),
            Err(err) => json!({
                "path": e.path.display().to_string(),
                "valid": false,
                "error": err.to_string(),
            }),
        })
        .collect();
    let invalid = entries.iter().filter(|e| e.result.is_err()).count();
    ctx.emit(&json!({ "files": rows }), || text::ingest(&rows));
    eprintln!("{} files, {} valid, {} invalid", entries.len(), entries.len() - invalid, invalid);
    if invalid > 0 {
        let first = entries.iter().find_map(|e| e.result.as_ref().err().map(|err| (e, err))).unwrap();
        return Err(Failure::verification("ingest", format!("{}: {}", first.0.path.display(), first.1)));
    }
    Ok(())
}

fn basis(ctx: &Ctx, target: &str, terms: usize, normalization: Normalization) -> Result<(), Failure> {
    let spec = Target::resolve(target)?.spec()?;
    let store = ctx.store()?;
    let resolved = spec.resolve(&store).map_err(|e| Failure::input("fixtures", e.to_string()))?;
    let built = spec
        .build_basis(&resolved, spec.normalization.unwrap_or(normalization))
        .map_err(|e| Failure::verification("basis", e.to_string()))?;
    let series: Vec<Vec<String>> =
        built.h.iter().map(|s| (1..=terms.min(s.trunc())).map(|n| s.coeff(n).unwrap().to_string()).collect()).collect();
    let value = json!({
        "case": built.case,
        "normalization": built.normalization,
        "derivation": built.derivation,
        "ord_h3": built.ord_h3().exact(),
        "precision": built.trunc(),
        "h": series,
    });
    ctx.emit(&value, || text::basis(&value, &series));
    eprintln!("basis case {:?}, ord h3 {:?}, {} coefficients", built.case, built.ord_h3().exact(), built.trunc());
    Ok(())
}

fn find(ctx: &Ctx, target: &str, args: &PipelineArgs) -> Result<(), Failure> {
    let spec = Target::resolve(target)?.spec()?;
    let store = ctx.store()?;
    let start = std::time::Instant::now();
    let out = run_pipeline(&spec, &store, &args.options()).map_err(|e| {
        let stage = stage_name(e.stage);
        if e.missing_fixture || e.stage == Stage::Fixtures {
            Failure::input(stage, e.message)
        } else {
            Failure::verification(stage, e.message)
        }
    })?;
    let degree = out.relation.degree;
    let polynomial = out.polynomial().map(|f| f.to_string());
    let verdict = match (&polynomial, degree) {
        (None, _) => "no-relation",
        (Some(_), 4) if out.modular() => "modular",
        (Some(_), 4) => "refused",
        (Some(_), _) => "relation",
    };
    let mut value = json!({
        "polynomial": polynomial,
        "verdict": verdict,
        "pipeline": out,
    });
    if !ctx.deterministic {
        value["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    ctx.emit(&value, || text::find(&out, verdict));
    match &polynomial {
        Some(f) => {
            let psi = out.psi.as_ref().map(|p| match p.status {
                PsiStatus::Constant => format!(", psi constant, c_F = {}", p.c_f),
                PsiStatus::NonConstant => ", psi non-constant".to_string(),
                PsiStatus::Inconclusive => ", psi inconclusive".to_string(),
            });
            eprintln!("{f}{} ({verdict})", psi.unwrap_or_default());
        }
        None => eprintln!(
            "no unique relation of degree {degree}: dimension {}, {:?}",
            out.relation.dimension, out.relation.classification
        ),
    }
    if out.vanishing.as_ref().is_some_and(|v| !v.vanishes) {
        return Err(Failure::verification("vanishing", "relation does not vanish through the Sturm bound"));
    }
    Ok(())
}

fn verify(ctx: &Ctx, keys: &[String], corpus: Option<PathBuf>, args: &PipelineArgs) -> Result<(), Failure> {
    let (corpus, _) = load_corpus_from(corpus.as_deref())?;
    let records = if keys.is_empty() {
        corpus.records.iter().collect::<Vec<_>>()
    } else {
        keys.iter()
            .map(|k| corpus.find(k).ok_or_else(|| Failure::input("corpus", format!("no record {k:?}"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let store = ctx.store()?;
    let opts = args.options();
    use rayon::prelude::*;
    let mut reports: Vec<_> = records.par_iter().map(|r| verify_record(r, &store, &opts)).collect();
    if ctx.deterministic {
        reports.iter_mut().for_each(strip_timings);
    }
    let value = serde_json::to_value(&reports).expect("serializable report");
    ctx.emit(&value, || text::reports(&reports));
    let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
    eprintln!(
        "verified {}/{}, skipped {}, mismatched {}, errors {}",
        count(Outcome::Verified),
        reports.len(),
        count(Outcome::Skipped),
        count(Outcome::Mismatch),
        count(Outcome::Error)
    );
    if count(Outcome::Mismatch) + count(Outcome::Error) > 0 {
        return Err(Failure::verification("verify", "at least one record failed"));
    }
    if count(Outcome::Skipped) > 0 {
        return Err(Failure::input("fixtures", "fixtures missing for at least one record"));
    }
    Ok(())
}

fn classify(ctx: &Ctx, target: &str) -> Result<(), Failure> {
    let target = Target::resolve(target)?;
    let f = target.polynomial()?;
    if f.degree() != 4 {
        return Err(Failure::input("classify", format!("expected a quartic, got degree {}", f.degree())));
    }
    let smooth = check_smoothness(&f);
    let flex = classify_p_infinity(&f, None);
    let marker = target.record().and_then(|r| r.marker);
    let expected = target.record().filter(|r| r.label.is_some()).map(|r| match r.marker {
        Some(m) => FlexKind::from_marker(m),
        None => FlexKind::from_marker(modcurves::records::FlexMarker::None),
    });
    let matches = expected.map(|k| k == flex.kind);
    let value = json!({
        "polynomial": f.to_string(),
        "smoothness": smooth,
        "flex": flex,
        "marker": marker,
        "marker_matches": matches,
    });
    ctx.emit(&value, || text::classify(&f, &smooth, &flex, matches));
    eprintln!("{:?}, {}", smooth.verdict, flex.kind);
    if matches == Some(false) {
        return Err(Failure::verification("classify", "flex type disagrees with the stored marker"));
    }
    if smooth.verdict != SmoothnessVerdict::Smooth {
        return Err(Failure::verification("classify", format!("curve is {:?}", smooth.verdict).to_lowercase()));
    }
    Ok(())
}

fn count(ctx: &Ctx, target: &str, primes: Option<Vec<u64>>, level: Option<u64>) -> Result<(), Failure> {
    let target = Target::resolve(target)?;
    let f = target.polynomial()?;
    let smooth = check_smoothness(&f);
    if smooth.verdict != SmoothnessVerdict::Smooth {
        return Err(Failure::input(
            "geometry",
            format!("refusing to count points on a curve that is not smooth ({:?})", smooth.verdict),
        ));
    }
    let (level, resolved) = match target.record() {
        Some(r) => {
            let store = ctx.store()?;
            let resolved = r.spec().resolve(&store).ok();
            if resolved.is_none() {
                eprintln!("warning: fixtures for {} unavailable; counts only", r.id);
            }
            (level.unwrap_or(r.level), resolved)
        }
        None => (level.unwrap_or(1), None),
    };
    let counts = point_counts(&f, level, resolved.as_ref(), primes.as_deref());
    let value = json!({ "polynomial": f.to_string(), "level": level, "counts": counts });
    ctx.emit(&value, || text::counts(&counts));
    let bad: Vec<u64> = counts.iter().filter(|c| c.consistent == Some(false)).map(|c| c.p).collect();
    let compared = counts.iter().filter(|c| c.consistent.is_some()).count();
    eprintln!("{} primes, {compared} compared, inconsistent at {bad:?}", counts.len());
    if !bad.is_empty() || counts.iter().any(|c| c.hasse_weil == Some(false)) {
        return Err(Failure::verification("point-counts", format!("inconsistent at {bad:?}")));
    }
    Ok(())
}

fn table(ctx: &Ctx, corpus: Option<PathBuf>, args: &PipelineArgs) -> Result<(), Failure> {
    let (corpus, digest) = load_corpus_from(corpus.as_deref())?;
    let store = ctx.store()?;
    let mut report = reproduce_table(&corpus, &store, &args.options());
    if let Some(d) = digest {
        report.corpus_sha256 = d;
    }
    if ctx.deterministic {
        report.reports.iter_mut().for_each(strip_timings);
    }
    let value = serde_json::to_value(&report).expect("serializable report");
    ctx.emit(&value, || text::reports(&report.reports));
    eprintln!("{}", report.summary_line());
    if report.mismatched + report.errors > 0 {
        return Err(Failure::verification("reproduce-table", report.summary_line()));
    }
    Ok(())
}
