//! Rank-aggregation ensembles over several utility metrics.
//!
//! Each metric ranks the candidates (0 = best) by its utility: MBR expected
//! utility for reference-based metrics, the raw score for QE metrics. A
//! strategy then reduces every candidate's rank row to one number (mean,
//! median, max, or 0.75 quantile) and picks the smallest, lowest index first.
//!
//! Tied scores share a competition rank: the number of strictly better
//! candidates. Candidates are keyed by index, so duplicate strings keep
//! separate rows.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mbr::{self, MbrConfig};
use crate::registry::{GroupName, Orientation};
use crate::types::{CandidateSet, ScoreMatrix};

/// Competition ranks of `scores`, 0 for the best.
pub fn rank_candidates(scores: &[f64], orientation: Orientation) -> Result<Vec<usize>> {
    if let Some(position) = scores.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            segment: String::new(),
            metric: String::new(),
            position,
        });
    }
    let keyed: Vec<f64> = scores.iter().map(|&v| orientation.normalize(v)).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // descending by normalized score
    order.sort_by(|&a, &b| keyed[b].total_cmp(&keyed[a]));

    let mut ranks = vec![0; scores.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = if pos > 0 && keyed[order[pos - 1]] == keyed[idx] {
            ranks[order[pos - 1]]
        } else {
            pos
        };
    }
    Ok(ranks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    RankAvg,
    RankMed,
    RankMax,
    Rank75q,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::RankAvg,
        Strategy::RankMed,
        Strategy::RankMax,
        Strategy::Rank75q,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::RankAvg => "rankAvg",
            Strategy::RankMed => "rankMed",
            Strategy::RankMax => "rankMax",
            Strategy::Rank75q => "rank75q",
        }
    }

    /// Reduces one candidate's ranks across metrics.
    pub fn aggregate(self, ranks: &[usize]) -> f64 {
        debug_assert!(!ranks.is_empty());
        match self {
            Strategy::RankAvg => {
                let sum: usize = ranks.iter().sum();
                sum as f64 / ranks.len() as f64
            }
            Strategy::RankMax => *ranks.iter().max().unwrap() as f64,
            Strategy::RankMed => quantile(ranks, 0.5),
            Strategy::Rank75q => quantile(ranks, 0.75),
        }
    }
}

/// Quantile with linear interpolation between the closest order statistics.
fn quantile(values: &[usize], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    let (a, b) = (sorted[lo] as f64, sorted[hi] as f64);
    a + (b - a) * frac
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .iter()
            .copied()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A strategy applied to a metric group, written `rankAvg:noLex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnsembleSpec {
    pub strategy: Strategy,
    pub group: GroupName,
}

impl FromStr for EnsembleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (strategy, group) = s
            .split_once(':')
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))?;
        Ok(EnsembleSpec {
            strategy: strategy.parse()?,
            group: group.parse()?,
        })
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.strategy, self.group)
    }
}

/// Ranks of every candidate under every metric of an ensemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    pub segment_id: String,
    pub metric_ids: Vec<String>,
    /// `ranks[i][k]`: rank of candidate `i` under metric `k`.
    pub ranks: Vec<Vec<usize>>,
}

impl RankTable {
    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    /// Builds a table from per-metric rank columns.
    pub fn from_columns(
        segment_id: impl Into<String>,
        metric_ids: Vec<String>,
        columns: &[Vec<usize>],
    ) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) || columns.len() != metric_ids.len() {
            return Err(Error::Invalid("rank columns differ in length".into()));
        }
        let ranks = (0..n)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Ok(RankTable {
            segment_id: segment_id.into(),
            metric_ids,
            ranks,
        })
    }

    pub fn column(&self, k: usize) -> Vec<usize> {
        self.ranks.iter().map(|row| row[k]).collect()
    }
}

/// Matrices of one segment keyed by metric id.
pub type SegmentMatrices = HashMap<String, ScoreMatrix>;

/// Ranks the candidates under each listed metric, in list order.
///
/// QE metrics contribute their score vector; reference-based metrics
/// contribute the expected utilities of their pairwise matrix.
pub fn build_rank_table(
    set: &CandidateSet,
    matrices: &SegmentMatrices,
    metrics: &[&str],
    config: MbrConfig,
) -> Result<RankTable> {
    let mut columns = Vec::with_capacity(metrics.len());
    for &metric in metrics {
        let matrix = matrices.get(metric).ok_or_else(|| Error::MissingMatrix {
            metric: metric.to_string(),
            segment: set.segment_id.clone(),
        })?;
        if matrix.n != set.len() {
            return Err(Error::LengthMismatch {
                segment: set.segment_id.clone(),
                metric: metric.to_string(),
                expected: set.len(),
                found: matrix.n,
            });
        }
        let u = mbr::utilities(matrix, config)?;
        columns.push(rank_candidates(&u.values, u.orientation)?);
    }
    RankTable::from_columns(
        set.segment_id.clone(),
        metrics.iter().map(|m| m.to_string()).collect(),
        &columns,
    )
}

/// Per-candidate aggregates of a table.
pub fn aggregates(table: &RankTable, strategy: Strategy) -> Vec<f64> {
    table
        .ranks
        .iter()
        .map(|row| strategy.aggregate(row))
        .collect()
}

/// The candidate minimizing the strategy's aggregate; lowest index on ties.
pub fn ensemble_select(table: &RankTable, strategy: Strategy) -> Result<usize> {
    if table.ranks.is_empty() || table.metric_ids.is_empty() {
        return Err(Error::Invalid(format!(
            "empty rank table for segment `{}`",
            table.segment_id
        )));
    }
    Ok(mbr::argbest(
        &aggregates(table, strategy),
        Orientation::LowerBetter,
    ))
}

/// Resolves `spec.group` for the segment's language pair and selects.
pub fn select_with_group(
    set: &CandidateSet,
    matrices: &SegmentMatrices,
    spec: EnsembleSpec,
    config: MbrConfig,
) -> Result<usize> {
    let members = spec.group.members(&set.language_pair);
    let table = build_rank_table(set, matrices, &members, config)?;
    ensemble_select(&table, spec.strategy)
}
