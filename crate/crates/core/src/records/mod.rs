//! Certified curve records and the embedded corpus.

pub mod corpus;
pub mod label;
pub mod verify;

pub use corpus::{
    corpus_digest, load_corpus, text_digest, BasisGroup, BasisTerm, Corpus, CurveRecord, CurveSpec, Expectations,
    FactorRef, RecordKind, ResolvedFactors, SpecError, Variant,
};
pub use label::{CurveLabel, CurveLabelError, FlexMarker};
pub use verify::{
    point_counts, reproduce_table, run_pipeline, strip_timings, trace_sum, verify_record, BasisSummary, Check,
    FixtureDigest, Outcome, PipelineError, PipelineOptions, PipelineOutput, Stage, TableReport, VariantReport,
    VerificationReport, POINT_COUNT_LIMIT, TOOL_VERSION,
};
