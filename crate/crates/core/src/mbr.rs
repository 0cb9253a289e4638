//! Expected-utility MBR selection, QE selection, and native pairwise
//! matrices for the lexical metrics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lexical::{LexicalMetric, PairwiseScorer};
use crate::registry::Orientation;
use crate::types::{CandidateSet, MatrixKind, ScoreMatrix};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MbrConfig {
    /// Drop the `j == i` self-score from each candidate's average.
    pub exclude_self: bool,
}

/// Per-candidate utility: mean over pseudoreferences (MBR) or the QE score.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityVector {
    pub segment_id: String,
    pub metric_id: String,
    pub orientation: Orientation,
    pub values: Vec<f64>,
}

/// Index of the best value under `orientation`; ties go to the lowest index.
pub fn argbest(values: &[f64], orientation: Orientation) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if orientation.better(v, values[best]) {
            best = i;
        }
    }
    best
}

fn require_kind(matrix: &ScoreMatrix, kind: MatrixKind) -> Result<()> {
    if matrix.kind != kind {
        return Err(Error::WrongKind {
            expected: kind.as_str(),
            found: matrix.kind.as_str(),
        });
    }
    Ok(())
}

/// Mean of row `i` over the pseudoreference columns `cols`.
pub(crate) fn row_mean(matrix: &ScoreMatrix, i: usize, cols: &[usize], exclude_self: bool) -> f64 {
    let row = matrix.row(i);
    let mut sum = 0.0;
    let mut count = 0usize;
    for &j in cols {
        if exclude_self && j == i {
            continue;
        }
        sum += row[j];
        count += 1;
    }
    if count == 0 {
        // only the self pair was available
        row[i]
    } else {
        sum / count as f64
    }
}

/// Utilities of the hypotheses in `rows`, averaged over the pseudoreferences
/// in `cols`. Indices refer to the full matrix.
pub fn restricted_utilities(
    matrix: &ScoreMatrix,
    rows: &[usize],
    cols: &[usize],
    config: MbrConfig,
) -> Result<Vec<f64>> {
    require_kind(matrix, MatrixKind::Pairwise)?;
    for &i in rows.iter().chain(cols) {
        if i >= matrix.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: matrix.n,
            });
        }
    }
    Ok(rows
        .iter()
        .map(|&i| row_mean(matrix, i, cols, config.exclude_self))
        .collect())
}

pub fn expected_utilities_with(matrix: &ScoreMatrix, config: MbrConfig) -> Result<UtilityVector> {
    require_kind(matrix, MatrixKind::Pairwise)?;
    let all: Vec<usize> = (0..matrix.n).collect();
    let values = restricted_utilities(matrix, &all, &all, config)?;
    Ok(UtilityVector {
        segment_id: matrix.segment_id.clone(),
        metric_id: matrix.metric_id.clone(),
        orientation: matrix.orientation,
        values,
    })
}

/// `values[i] = mean_j scores[i * n + j]`, self pair included.
pub fn expected_utilities(matrix: &ScoreMatrix) -> Result<UtilityVector> {
    expected_utilities_with(matrix, MbrConfig::default())
}

/// Utility vector of any matrix: row means for pairwise, the scores for QE.
pub fn utilities(matrix: &ScoreMatrix, config: MbrConfig) -> Result<UtilityVector> {
    match matrix.kind {
        MatrixKind::Pairwise => expected_utilities_with(matrix, config),
        MatrixKind::Qe => Ok(UtilityVector {
            segment_id: matrix.segment_id.clone(),
            metric_id: matrix.metric_id.clone(),
            orientation: matrix.orientation,
            values: matrix.scores.clone(),
        }),
    }
}

pub fn mbr_select_with(matrix: &ScoreMatrix, config: MbrConfig) -> Result<usize> {
    require_kind(matrix, MatrixKind::Pairwise)?;
    if matrix.n == 1 {
        return Ok(0);
    }
    let u = expected_utilities_with(matrix, config)?;
    Ok(argbest(&u.values, u.orientation))
}

/// The candidate with the best average score against all pseudoreferences.
pub fn mbr_select(matrix: &ScoreMatrix) -> Result<usize> {
    mbr_select_with(matrix, MbrConfig::default())
}

/// The candidate with the best QE score.
pub fn qe_select(matrix: &ScoreMatrix) -> Result<usize> {
    require_kind(matrix, MatrixKind::Qe)?;
    Ok(argbest(&matrix.scores, matrix.orientation))
}

/// Scores every ordered candidate pair with a lexical metric, candidate `j`
/// serving as the reference for hypothesis `i`.
///
/// Rows are computed in parallel on the current rayon pool and assembled in
/// order, so the result does not depend on the worker count.
pub fn compute_pairwise_matrix(set: &CandidateSet, metric_id: &str) -> Result<ScoreMatrix> {
    let metric = LexicalMetric::from_id(metric_id)?;
    let n = set.len();
    let scorer = PairwiseScorer::new(metric, &set.candidates);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| scorer.score(i, j)).collect())
        .collect();
    ScoreMatrix::pairwise(
        set.segment_id.clone(),
        metric.id(),
        n,
        rows.into_iter().flatten().collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(metric: &str, n: usize, scores: &[f64]) -> ScoreMatrix {
        ScoreMatrix::pairwise("s", metric, n, scores.to_vec()).unwrap()
    }

    #[test]
    fn row_means() {
        let u = expected_utilities(&m("chrF", 2, &[100.0, 20.0, 30.0, 100.0])).unwrap();
        assert_eq!(u.values, vec![60.0, 65.0]);
        let c = expected_utilities(&m("chrF", 3, &[7.0; 9])).unwrap();
        assert_eq!(c.values, vec![7.0; 3]);
    }

    #[test]
    fn orientation_decides() {
        let scores = [100.0, 20.0, 30.0, 100.0];
        assert_eq!(mbr_select(&m("chrF", 2, &scores)).unwrap(), 1);
        assert_eq!(mbr_select(&m("TER", 2, &scores)).unwrap(), 0);
    }

    #[test]
    fn exclude_self() {
        let matrix = m("chrF", 2, &[100.0, 20.0, 30.0, 100.0]);
        let config = MbrConfig { exclude_self: true };
        let u = expected_utilities_with(&matrix, config).unwrap();
        assert_eq!(u.values, vec![20.0, 30.0]);
        let one = m("chrF", 1, &[100.0]);
        assert_eq!(
            expected_utilities_with(&one, config).unwrap().values,
            vec![100.0]
        );
    }

    #[test]
    fn qe_selection() {
        let kiwi = ScoreMatrix::qe("s", "CometKiwi22", vec![0.1, 0.9, 0.4]).unwrap();
        assert_eq!(qe_select(&kiwi).unwrap(), 1);
        let mx = ScoreMatrix::qe("s", "MetricX-QE", vec![1.2, 0.3]).unwrap();
        assert_eq!(qe_select(&mx).unwrap(), 1);
    }

    #[test]
    fn wrong_kinds() {
        let kiwi = ScoreMatrix::qe("s", "CometKiwi22", vec![0.1]).unwrap();
        assert!(matches!(mbr_select(&kiwi), Err(Error::WrongKind { .. })));
        assert!(matches!(
            expected_utilities(&kiwi),
            Err(Error::WrongKind { .. })
        ));
        assert!(matches!(
            qe_select(&m("chrF", 1, &[1.0])),
            Err(Error::WrongKind { .. })
        ));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(argbest(&[1.0, 3.0, 3.0], Orientation::HigherBetter), 1);
        assert_eq!(argbest(&[2.0, 1.0, 1.0], Orientation::LowerBetter), 1);
    }

    fn set(candidates: &[&str]) -> CandidateSet {
        CandidateSet {
            segment_id: "s".into(),
            source: "src".into(),
            candidates: candidates.iter().map(|c| c.to_string()).collect(),
            reference: None,
            doc_context: None,
            language_pair: "en-de".into(),
        }
    }

    #[test]
    fn native_matrices() {
        let one = compute_pairwise_matrix(&set(&["anything"]), "chrF").unwrap();
        assert_eq!(one.scores, vec![100.0]);

        let same = compute_pairwise_matrix(&set(&["a b", "a b"]), "TER").unwrap();
        assert_eq!(same.scores, vec![0.0; 4]);

        let err = compute_pairwise_matrix(&set(&["a"]), "MetricX").unwrap_err();
        assert!(matches!(err, Error::UnsupportedNativeMetric(_)));
    }

    #[test]
    fn empty_candidates_do_not_fail_the_matrix() {
        let matrix = compute_pairwise_matrix(&set(&["a b", ""]), "sentBLEU").unwrap();
        assert_eq!(matrix.get(0, 0), 100.0);
        assert_eq!(matrix.get(1, 1), 0.0);
        assert_eq!(matrix.get(1, 0), 0.0);
    }
}
