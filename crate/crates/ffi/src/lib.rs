//! C ABI for mbrkit.
//!
//! Every fallible function returns an [`MbrkitStatus`] and writes its result
//! through an out-pointer. On failure a description is kept per thread and
//! can be read with [`mbrkit_last_error_message`].
//!
//! Handles (`MbrkitScoreMatrix`, `MbrkitCandidateSet`, `MbrkitPipeline`) are
//! opaque, owned by the caller once created, and released with their `_free`
//! function. Passing NULL to a `_free` function is a no-op.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use mbrkit::correlation;
use mbrkit::ensemble::{self, EnsembleSpec, RankTable, SegmentMatrices, Strategy};
use mbrkit::eval;
use mbrkit::lexical::LexicalMetric;
use mbrkit::mbr::{self, MbrConfig};
use mbrkit::pipeline::{self, PipelineConfig, PipelineSpec, PseudorefMode};
use mbrkit::registry::Orientation;
use mbrkit::types::{CandidateSet, ScoreMatrix};
use mbrkit::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbrkitStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    UnknownMetric = 3,
    UnknownGroup = 4,
    EmptyReference = 5,
    Parse = 6,
    LengthMismatch = 7,
    KindMismatch = 8,
    NonFinite = 9,
    IndexOutOfRange = 10,
    UnsupportedNativeMetric = 11,
    MissingMatrix = 12,
    UnknownStrategy = 13,
    Grammar = 14,
    UnknownTag = 15,
    InvalidFilterN = 16,
    TooFewObservations = 17,
    UndefinedCorrelation = 18,
    UnknownSystem = 19,
    Invalid = 20,
    Panic = 99,
}

fn status_of(error: &Error) -> MbrkitStatus {
    match error.code() {
        "unknown-metric" => MbrkitStatus::UnknownMetric,
        "unknown-group" => MbrkitStatus::UnknownGroup,
        "empty-reference" => MbrkitStatus::EmptyReference,
        "parse" => MbrkitStatus::Parse,
        "length-mismatch" => MbrkitStatus::LengthMismatch,
        "kind-mismatch" | "wrong-kind" => MbrkitStatus::KindMismatch,
        "non-finite" => MbrkitStatus::NonFinite,
        "index-out-of-range" => MbrkitStatus::IndexOutOfRange,
        "unsupported-native-metric" => MbrkitStatus::UnsupportedNativeMetric,
        "missing-matrix" => MbrkitStatus::MissingMatrix,
        "unknown-strategy" => MbrkitStatus::UnknownStrategy,
        "grammar" => MbrkitStatus::Grammar,
        "unknown-tag" => MbrkitStatus::UnknownTag,
        "invalid-n" => MbrkitStatus::InvalidFilterN,
        "too-few-observations" => MbrkitStatus::TooFewObservations,
        "undefined-correlation" => MbrkitStatus::UndefinedCorrelation,
        "unknown-system" => MbrkitStatus::UnknownSystem,
        _ => MbrkitStatus::Invalid,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mbrkit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

struct Failure(MbrkitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), format!("error[{}]: {e}", e.code()))
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MbrkitStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MbrkitStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            MbrkitStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(MbrkitStatus::NullArgument, format!("`{name}` is NULL"))
}

unsafe fn text<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(MbrkitStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn floats<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn out<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| null(name))
}

unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(name))
}

/// Opaque score matrix: pairwise (n x n) or QE (length n).
pub struct MbrkitScoreMatrix(ScoreMatrix);

/// Opaque candidate set.
pub struct MbrkitCandidateSet(CandidateSet);

/// Opaque parsed pipeline, e.g. `mxQE(32)xcMBR`.
pub struct MbrkitPipeline(PipelineSpec);

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mbrkit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a pairwise matrix from `n * n` row-major scores:
/// `scores[i * n + j]` is hypothesis `i` scored against pseudoreference `j`.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_matrix_new_pairwise(
    segment_id: *const c_char,
    metric_id: *const c_char,
    n: usize,
    scores: *const f64,
    out_matrix: *mut *mut MbrkitScoreMatrix,
) -> MbrkitStatus {
    guard(|| {
        let out_matrix = out(out_matrix, "out_matrix")?;
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure(MbrkitStatus::Invalid, format!("n = {n} overflows")))?;
        let m = ScoreMatrix::pairwise(
            text(segment_id, "segment_id")?,
            text(metric_id, "metric_id")?,
            n,
            floats(scores, len, "scores")?.to_vec(),
        )?;
        *out_matrix = Box::into_raw(Box::new(MbrkitScoreMatrix(m)));
        Ok(())
    })
}

/// Creates a QE vector of `n` scores.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_matrix_new_qe(
    segment_id: *const c_char,
    metric_id: *const c_char,
    n: usize,
    scores: *const f64,
    out_matrix: *mut *mut MbrkitScoreMatrix,
) -> MbrkitStatus {
    guard(|| {
        let out_matrix = out(out_matrix, "out_matrix")?;
        let m = ScoreMatrix::qe(
            text(segment_id, "segment_id")?,
            text(metric_id, "metric_id")?,
            floats(scores, n, "scores")?.to_vec(),
        )?;
        *out_matrix = Box::into_raw(Box::new(MbrkitScoreMatrix(m)));
        Ok(())
    })
}

/// Parses one matrix record in the JSON-lines wire format.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_matrix_from_json(
    json: *const c_char,
    out_matrix: *mut *mut MbrkitScoreMatrix,
) -> MbrkitStatus {
    guard(|| {
        let out_matrix = out(out_matrix, "out_matrix")?;
        let line = text(json, "json")?;
        let m = mbrkit::io::read_matrices(line.as_bytes())
            .next()
            .ok_or_else(|| Failure(MbrkitStatus::Parse, "empty input".into()))??;
        *out_matrix = Box::into_raw(Box::new(MbrkitScoreMatrix(m)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_matrix_free(matrix: *mut MbrkitScoreMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Number of candidates the matrix covers, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_matrix_n(matrix: *const MbrkitScoreMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.n)
}

/// True when smaller scores are better for the matrix's metric.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_matrix_lower_is_better(matrix: *const MbrkitScoreMatrix) -> bool {
    matrix
        .as_ref()
        .is_some_and(|m| m.0.orientation == Orientation::LowerBetter)
}

/// Parses one candidate-set record in the JSON-lines wire format.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_candidates_from_json(
    json: *const c_char,
    out_set: *mut *mut MbrkitCandidateSet,
) -> MbrkitStatus {
    guard(|| {
        let out_set = out(out_set, "out_set")?;
        let line = text(json, "json")?;
        let set = mbrkit::io::read_candidates(line.as_bytes())
            .next()
            .ok_or_else(|| Failure(MbrkitStatus::Parse, "empty input".into()))??;
        *out_set = Box::into_raw(Box::new(MbrkitCandidateSet(set)));
        Ok(())
    })
}

/// Builds a candidate set from `n` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_candidates_new(
    segment_id: *const c_char,
    language_pair: *const c_char,
    candidates: *const *const c_char,
    n: usize,
    out_set: *mut *mut MbrkitCandidateSet,
) -> MbrkitStatus {
    guard(|| {
        let out_set = out(out_set, "out_set")?;
        if n > 0 && candidates.is_null() {
            return Err(null("candidates"));
        }
        let texts = (0..n)
            .map(|i| text(*candidates.add(i), "candidates[i]").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let set = CandidateSet {
            segment_id: text(segment_id, "segment_id")?.to_string(),
            source: String::new(),
            candidates: texts,
            reference: None,
            doc_context: None,
            language_pair: text(language_pair, "language_pair")?.to_string(),
        };
        set.validate()?;
        *out_set = Box::into_raw(Box::new(MbrkitCandidateSet(set)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_candidates_free(set: *mut MbrkitCandidateSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_candidates_len(set: *const MbrkitCandidateSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Scores one hypothesis against one reference with chrF, chrF++, sentBLEU
/// or TER.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_lexical_score(
    metric_id: *const c_char,
    hypothesis: *const c_char,
    reference: *const c_char,
    out_score: *mut f64,
) -> MbrkitStatus {
    guard(|| {
        let out_score = out(out_score, "out_score")?;
        let metric = LexicalMetric::from_id(text(metric_id, "metric_id")?)?;
        *out_score = metric.score(
            text(hypothesis, "hypothesis")?,
            text(reference, "reference")?,
        )?;
        Ok(())
    })
}

/// Computes the pairwise matrix of a lexical metric over a candidate set.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_pairwise_matrix(
    set: *const MbrkitCandidateSet,
    metric_id: *const c_char,
    out_matrix: *mut *mut MbrkitScoreMatrix,
) -> MbrkitStatus {
    guard(|| {
        let out_matrix = out(out_matrix, "out_matrix")?;
        let set = handle(set, "set")?;
        let m = mbr::compute_pairwise_matrix(&set.0, text(metric_id, "metric_id")?)?;
        *out_matrix = Box::into_raw(Box::new(MbrkitScoreMatrix(m)));
        Ok(())
    })
}

/// Copies the matrix's expected utilities into `out_values[0..n]`.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_expected_utilities(
    matrix: *const MbrkitScoreMatrix,
    exclude_self: bool,
    out_values: *mut f64,
    capacity: usize,
) -> MbrkitStatus {
    guard(|| {
        let m = handle(matrix, "matrix")?;
        let u = mbr::expected_utilities_with(&m.0, MbrConfig { exclude_self })?;
        if capacity < u.values.len() {
            return Err(Failure(
                MbrkitStatus::LengthMismatch,
                format!("capacity {capacity} < {}", u.values.len()),
            ));
        }
        if !u.values.is_empty() {
            if out_values.is_null() {
                return Err(null("out_values"));
            }
            slice::from_raw_parts_mut(out_values, u.values.len()).copy_from_slice(&u.values);
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_mbr_select(
    matrix: *const MbrkitScoreMatrix,
    exclude_self: bool,
    out_index: *mut usize,
) -> MbrkitStatus {
    guard(|| {
        let out_index = out(out_index, "out_index")?;
        *out_index =
            mbr::mbr_select_with(&handle(matrix, "matrix")?.0, MbrConfig { exclude_self })?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_qe_select(
    matrix: *const MbrkitScoreMatrix,
    out_index: *mut usize,
) -> MbrkitStatus {
    guard(|| {
        let out_index = out(out_index, "out_index")?;
        *out_index = mbr::qe_select(&handle(matrix, "matrix")?.0)?;
        Ok(())
    })
}

/// Competition ranks (0 = best) of `n` scores.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_rank(
    scores: *const f64,
    n: usize,
    lower_is_better: bool,
    out_ranks: *mut usize,
) -> MbrkitStatus {
    guard(|| {
        let orientation = if lower_is_better {
            Orientation::LowerBetter
        } else {
            Orientation::HigherBetter
        };
        let ranks = ensemble::rank_candidates(floats(scores, n, "scores")?, orientation)?;
        if n > 0 {
            if out_ranks.is_null() {
                return Err(null("out_ranks"));
            }
            slice::from_raw_parts_mut(out_ranks, n).copy_from_slice(&ranks);
        }
        Ok(())
    })
}

/// Selects from an `n x m` row-major rank table (`ranks[i * m + k]` is the
/// rank of candidate `i` under metric `k`) with `rankAvg`, `rankMed`,
/// `rankMax` or `rank75q`.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_ensemble_select(
    ranks: *const usize,
    n: usize,
    m: usize,
    strategy: *const c_char,
    out_index: *mut usize,
) -> MbrkitStatus {
    guard(|| {
        let out_index = out(out_index, "out_index")?;
        let strategy: Strategy = text(strategy, "strategy")?.parse()?;
        let len = n
            .checked_mul(m)
            .ok_or_else(|| Failure(MbrkitStatus::Invalid, "n * m overflows".into()))?;
        if len > 0 && ranks.is_null() {
            return Err(null("ranks"));
        }
        let flat = if len == 0 {
            &[][..]
        } else {
            slice::from_raw_parts(ranks, len)
        };
        let table = RankTable {
            segment_id: String::new(),
            metric_ids: (0..m).map(|k| k.to_string()).collect(),
            ranks: flat
                .chunks(m.max(1))
                .take(n)
                .map(<[usize]>::to_vec)
                .collect(),
        };
        *out_index = ensemble::ensemble_select(&table, strategy)?;
        Ok(())
    })
}

unsafe fn segment_matrices(
    matrices: *const *const MbrkitScoreMatrix,
    count: usize,
) -> Result<SegmentMatrices, Failure> {
    if count > 0 && matrices.is_null() {
        return Err(null("matrices"));
    }
    let mut out = SegmentMatrices::new();
    for i in 0..count {
        let m = handle(*matrices.add(i), "matrices[i]")?;
        out.insert(m.0.metric_id.clone(), m.0.clone());
    }
    Ok(out)
}

/// Rank-ensemble selection over a metric group, e.g. `rankAvg:noLex`.
/// `matrices` must hold every member's matrix for the set's language pair.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_ensemble_select_group(
    set: *const MbrkitCandidateSet,
    matrices: *const *const MbrkitScoreMatrix,
    count: usize,
    spec: *const c_char,
    exclude_self: bool,
    out_index: *mut usize,
) -> MbrkitStatus {
    guard(|| {
        let out_index = out(out_index, "out_index")?;
        let set = handle(set, "set")?;
        let spec: EnsembleSpec = text(spec, "spec")?.parse()?;
        let ms = segment_matrices(matrices, count)?;
        *out_index = ensemble::select_with_group(&set.0, &ms, spec, MbrConfig { exclude_self })?;
        Ok(())
    })
}

/// Parses a pipeline name such as `ckQE(32)xcMBR`.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_pipeline_parse(
    name: *const c_char,
    out_pipeline: *mut *mut MbrkitPipeline,
) -> MbrkitStatus {
    guard(|| {
        let out_pipeline = out(out_pipeline, "out_pipeline")?;
        let spec = pipeline::parse_pipeline_name(text(name, "name")?)?;
        *out_pipeline = Box::into_raw(Box::new(MbrkitPipeline(spec)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_pipeline_free(pipeline: *mut MbrkitPipeline) {
    if !pipeline.is_null() {
        drop(Box::from_raw(pipeline));
    }
}

/// Filter size of a parsed pipeline, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_pipeline_filter_n(pipeline: *const MbrkitPipeline) -> usize {
    pipeline.as_ref().map_or(0, |p| p.0.filter_n)
}

/// Runs a pipeline on one segment. With `full_pseudorefs` the MBR stage
/// averages over every candidate instead of only the filtered ones.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_pipeline_select(
    pipeline: *const MbrkitPipeline,
    set: *const MbrkitCandidateSet,
    matrices: *const *const MbrkitScoreMatrix,
    count: usize,
    exclude_self: bool,
    full_pseudorefs: bool,
    out_index: *mut usize,
) -> MbrkitStatus {
    guard(|| {
        let out_index = out(out_index, "out_index")?;
        let spec = handle(pipeline, "pipeline")?;
        let set = handle(set, "set")?;
        let ms = segment_matrices(matrices, count)?;
        let config = PipelineConfig {
            mbr: MbrConfig { exclude_self },
            pseudorefs: if full_pseudorefs {
                PseudorefMode::Full
            } else {
                PseudorefMode::Filtered
            },
        };
        *out_index = pipeline::pipeline_select(&set.0, &spec.0, &ms, config)?;
        Ok(())
    })
}

/// Two-sided paired t-test p-value for `a[i]` against `b[i]`.
#[no_mangle]
pub unsafe extern "C" fn mbrkit_paired_ttest(
    a: *const f64,
    b: *const f64,
    n: usize,
    out_p: *mut f64,
) -> MbrkitStatus {
    guard(|| {
        let out_p = out(out_p, "out_p")?;
        *out_p = eval::paired_ttest(floats(a, n, "a")?, floats(b, n, "b")?)?;
        Ok(())
    })
}

/// `""`, `"*"`, `"†"` or `"‡"` as static UTF-8.
#[no_mangle]
pub extern "C" fn mbrkit_significance_mark(p: f64) -> *const c_char {
    let mark: &'static [u8] = match eval::significance_mark(p) {
        eval::Mark::None => b"\0",
        eval::Mark::Star => b"*\0",
        eval::Mark::Dagger => "†\0".as_bytes(),
        eval::Mark::DoubleDagger => "‡\0".as_bytes(),
    };
    mark.as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_kendall_tau(
    x: *const f64,
    y: *const f64,
    n: usize,
    out_tau: *mut f64,
) -> MbrkitStatus {
    guard(|| {
        let out_tau = out(out_tau, "out_tau")?;
        *out_tau = correlation::kendall_tau(floats(x, n, "x")?, floats(y, n, "y")?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbrkit_pearson(
    x: *const f64,
    y: *const f64,
    n: usize,
    out_r: *mut f64,
) -> MbrkitStatus {
    guard(|| {
        let out_r = out(out_r, "out_r")?;
        *out_r = correlation::pearson(floats(x, n, "x")?, floats(y, n, "y")?)?;
        Ok(())
    })
}
