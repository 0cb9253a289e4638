/* Generated by cbindgen. Do not edit. */

#ifndef MBRKIT_H
#define MBRKIT_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  MBRKIT_STATUS_OK = 0,
  MBRKIT_STATUS_NULL_ARGUMENT = 1,
  MBRKIT_STATUS_INVALID_UTF8 = 2,
  MBRKIT_STATUS_UNKNOWN_METRIC = 3,
  MBRKIT_STATUS_UNKNOWN_GROUP = 4,
  MBRKIT_STATUS_EMPTY_REFERENCE = 5,
  MBRKIT_STATUS_PARSE = 6,
  MBRKIT_STATUS_LENGTH_MISMATCH = 7,
  MBRKIT_STATUS_KIND_MISMATCH = 8,
  MBRKIT_STATUS_NON_FINITE = 9,
  MBRKIT_STATUS_INDEX_OUT_OF_RANGE = 10,
  MBRKIT_STATUS_UNSUPPORTED_NATIVE_METRIC = 11,
  MBRKIT_STATUS_MISSING_MATRIX = 12,
  MBRKIT_STATUS_UNKNOWN_STRATEGY = 13,
  MBRKIT_STATUS_GRAMMAR = 14,
  MBRKIT_STATUS_UNKNOWN_TAG = 15,
  MBRKIT_STATUS_INVALID_FILTER_N = 16,
  MBRKIT_STATUS_TOO_FEW_OBSERVATIONS = 17,
  MBRKIT_STATUS_UNDEFINED_CORRELATION = 18,
  MBRKIT_STATUS_UNKNOWN_SYSTEM = 19,
  MBRKIT_STATUS_INVALID = 20,
  MBRKIT_STATUS_PANIC = 99,
} MbrkitStatus;

/**
 * Opaque candidate set.
 */
typedef struct MbrkitCandidateSet MbrkitCandidateSet;

/**
 * Opaque parsed pipeline, e.g. `mxQE(32)xcMBR`.
 */
typedef struct MbrkitPipeline MbrkitPipeline;

/**
 * Opaque score matrix: pairwise (n x n) or QE (length n).
 */
typedef struct MbrkitScoreMatrix MbrkitScoreMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mbrkit_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mbrkit_version(void);

/**
 * Creates a pairwise matrix from `n * n` row-major scores:
 * `scores[i * n + j]` is hypothesis `i` scored against pseudoreference `j`.
 */
MbrkitStatus mbrkit_matrix_new_pairwise(const char *segment_id,
                                        const char *metric_id,
                                        size_t n,
                                        const double *scores,
                                        MbrkitScoreMatrix **out_matrix);

/**
 * Creates a QE vector of `n` scores.
 */
MbrkitStatus mbrkit_matrix_new_qe(const char *segment_id,
                                  const char *metric_id,
                                  size_t n,
                                  const double *scores,
                                  MbrkitScoreMatrix **out_matrix);

/**
 * Parses one matrix record in the JSON-lines wire format.
 */
MbrkitStatus mbrkit_matrix_from_json(const char *json, MbrkitScoreMatrix **out_matrix);

void mbrkit_matrix_free(MbrkitScoreMatrix *matrix);

/**
 * Number of candidates the matrix covers, or 0 for NULL.
 */
size_t mbrkit_matrix_n(const MbrkitScoreMatrix *matrix);

/**
 * True when smaller scores are better for the matrix's metric.
 */
bool mbrkit_matrix_lower_is_better(const MbrkitScoreMatrix *matrix);

/**
 * Parses one candidate-set record in the JSON-lines wire format.
 */
MbrkitStatus mbrkit_candidates_from_json(const char *json, MbrkitCandidateSet **out_set);

/**
 * Builds a candidate set from `n` NUL-terminated strings.
 */
MbrkitStatus mbrkit_candidates_new(const char *segment_id,
                                   const char *language_pair,
                                   const char *const *candidates,
                                   size_t n,
                                   MbrkitCandidateSet **out_set);

void mbrkit_candidates_free(MbrkitCandidateSet *set);

size_t mbrkit_candidates_len(const MbrkitCandidateSet *set);

/**
 * Scores one hypothesis against one reference with chrF, chrF++, sentBLEU
 * or TER.
 */
MbrkitStatus mbrkit_lexical_score(const char *metric_id,
                                  const char *hypothesis,
                                  const char *reference,
                                  double *out_score);

/**
 * Computes the pairwise matrix of a lexical metric over a candidate set.
 */
MbrkitStatus mbrkit_pairwise_matrix(const MbrkitCandidateSet *set,
                                    const char *metric_id,
                                    MbrkitScoreMatrix **out_matrix);

/**
 * Copies the matrix's expected utilities into `out_values[0..n]`.
 */
MbrkitStatus mbrkit_expected_utilities(const MbrkitScoreMatrix *matrix,
                                       bool exclude_self,
                                       double *out_values,
                                       size_t capacity);

MbrkitStatus mbrkit_mbr_select(const MbrkitScoreMatrix *matrix,
                               bool exclude_self,
                               size_t *out_index);

MbrkitStatus mbrkit_qe_select(const MbrkitScoreMatrix *matrix, size_t *out_index);

/**
 * Competition ranks (0 = best) of `n` scores.
 */
MbrkitStatus mbrkit_rank(const double *scores, size_t n, bool lower_is_better, size_t *out_ranks);

/**
 * Selects from an `n x m` row-major rank table (`ranks[i * m + k]` is the
 * rank of candidate `i` under metric `k`) with `rankAvg`, `rankMed`,
 * `rankMax` or `rank75q`.
 */
MbrkitStatus mbrkit_ensemble_select(const size_t *ranks,
                                    size_t n,
                                    size_t m,
                                    const char *strategy,
                                    size_t *out_index);

/**
 * Rank-ensemble selection over a metric group, e.g. `rankAvg:noLex`.
 * `matrices` must hold every member's matrix for the set's language pair.
 */
MbrkitStatus mbrkit_ensemble_select_group(const MbrkitCandidateSet *set,
                                          const MbrkitScoreMatrix *const *matrices,
                                          size_t count,
                                          const char *spec,
                                          bool exclude_self,
                                          size_t *out_index);

/**
 * Parses a pipeline name such as `ckQE(32)xcMBR`.
 */
MbrkitStatus mbrkit_pipeline_parse(const char *name, MbrkitPipeline **out_pipeline);

void mbrkit_pipeline_free(MbrkitPipeline *pipeline);

/**
 * Filter size of a parsed pipeline, or 0 for NULL.
 */
size_t mbrkit_pipeline_filter_n(const MbrkitPipeline *pipeline);

/**
 * Runs a pipeline on one segment. With `full_pseudorefs` the MBR stage
 * averages over every candidate instead of only the filtered ones.
 */
MbrkitStatus mbrkit_pipeline_select(const MbrkitPipeline *pipeline,
                                    const MbrkitCandidateSet *set,
                                    const MbrkitScoreMatrix *const *matrices,
                                    size_t count,
                                    bool exclude_self,
                                    bool full_pseudorefs,
                                    size_t *out_index);

/**
 * Two-sided paired t-test p-value for `a[i]` against `b[i]`.
 */
MbrkitStatus mbrkit_paired_ttest(const double *a, const double *b, size_t n, double *out_p);

/**
 * `""`, `"*"`, `"†"` or `"‡"` as static UTF-8.
 */
const char *mbrkit_significance_mark(double p);

MbrkitStatus mbrkit_kendall_tau(const double *x, const double *y, size_t n, double *out_tau);

MbrkitStatus mbrkit_pearson(const double *x, const double *y, size_t n, double *out_r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBRKIT_H */
