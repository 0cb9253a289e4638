//! Independent oracles and fixture generators shared by the integration
//! tests. Nothing here calls into the crate's selection or statistics code.

#![allow(dead_code)]

use std::collections::HashMap;

use mbrkit::types::{CandidateSet, ScoreMatrix};
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean of every row, then the first index holding the best mean.
pub fn brute_force_mbr(scores: &[f64], n: usize, lower_is_better: bool) -> usize {
    let means: Vec<f64> = (0..n)
        .map(|i| {
            let row = &scores[i * n..(i + 1) * n];
            row.iter().sum::<f64>() / n as f64
        })
        .collect();
    let mut best = 0;
    for i in 1..n {
        let better = if lower_is_better {
            means[i] < means[best]
        } else {
            means[i] > means[best]
        };
        if better {
            best = i;
        }
    }
    best
}

/// numpy's default ("linear") quantile.
fn np_quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let virtual_index = q * (v.len() - 1) as f64;
    let lo = virtual_index.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    let t = virtual_index - lo as f64;
    let (a, b) = (v[lo], v[hi]);
    if t >= 0.5 {
        b - (b - a) * (1.0 - t)
    } else {
        a + (b - a) * t
    }
}

fn np_median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// `rank_samples_by_metric`: position in the best-first order. Scores are
/// assumed distinct.
fn rank_samples_by_metric(scores: &[f64], lower_is_better: bool) -> HashMap<usize, usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        if lower_is_better {
            scores[a].total_cmp(&scores[b])
        } else {
            scores[b].total_cmp(&scores[a])
        }
    });
    order
        .into_iter()
        .enumerate()
        .map(|(rank, s)| (s, rank))
        .collect()
}

fn get_ranks_for_samples_by_ensemble(metrics: &[(Vec<f64>, bool)]) -> Vec<Vec<f64>> {
    let n = metrics[0].0.len();
    let mut output = vec![vec![0.0; metrics.len()]; n];
    for (metric_idx, (scores, lower)) in metrics.iter().enumerate() {
        let sample_to_rank = rank_samples_by_metric(scores, *lower);
        for (sample_idx, row) in output.iter_mut().enumerate() {
            row[metric_idx] = sample_to_rank[&sample_idx] as f64;
        }
    }
    output
}

/// `min(zip(samples, scores), key=score)`: the first minimum.
fn select_samples_by_score(score_list: &[f64]) -> usize {
    let mut top = 0;
    for (i, s) in score_list.iter().enumerate() {
        if *s < score_list[top] {
            top = i;
        }
    }
    top
}

/// The four ensembling strategies as written in the reference pseudocode,
/// keyed by strategy name.
pub fn reference_ensemble(strategy: &str, metrics: &[(Vec<f64>, bool)]) -> usize {
    let sample_ranks = get_ranks_for_samples_by_ensemble(metrics);
    let score_list: Vec<f64> = sample_ranks
        .iter()
        .map(|x| match strategy {
            "rankAvg" => x.iter().sum::<f64>() / x.len() as f64,
            "rankMed" => np_median(x),
            "rankMax" => x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "rank75q" => np_quantile(x, 0.75),
            other => panic!("no such strategy {other}"),
        })
        .collect();
    select_samples_by_score(&score_list)
}

/// Tau-b from explicit pair counts.
pub fn pair_count_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]).unwrap();
            let dy = y[i].partial_cmp(&y[j]).unwrap();
            use std::cmp::Ordering::Equal;
            if dx == Equal {
                tied_x += 1;
            }
            if dy == Equal {
                tied_y += 1;
            }
            if dx != Equal && dy != Equal {
                if dx == dy {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let total = (n * (n - 1) / 2) as u64;
    let numerator = concordant as i64 - discordant as i64;
    numerator as f64 / ((total - tied_x) as f64 * (total - tied_y) as f64).sqrt()
}

/// Sample covariance over the product of sample standard deviations.
pub fn covariance_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (mx, my) = (mean(x), mean(y));
    let cov: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / (n - 1.0);
    let var = |v: &[f64], m: f64| v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0);
    cov / (var(x, mx) * var(y, my)).sqrt()
}

/// Two-sided paired t-test p-value through statrs' Student t CDF.
pub fn reference_ttest(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let t = mean / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).unwrap();
    2.0 * dist.cdf(-t.abs())
}

pub fn candidate_set(segment_id: &str, language_pair: &str, n: usize) -> CandidateSet {
    CandidateSet {
        segment_id: segment_id.into(),
        source: "src".into(),
        candidates: (0..n).map(|i| format!("candidate {i}")).collect(),
        reference: Some("reference".into()),
        doc_context: None,
        language_pair: language_pair.into(),
    }
}

/// Distinct values in random order.
pub fn distinct_scores<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| i as f64 + rng.gen_range(0.05..0.95))
        .collect();
    v.shuffle(rng);
    v.iter().map(|x| x / n as f64 * 4.0 - 2.0).collect()
}

pub fn random_pairwise<R: Rng>(rng: &mut R, segment: &str, metric: &str, n: usize) -> ScoreMatrix {
    let scores = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ScoreMatrix::pairwise(segment, metric, n, scores).unwrap()
}

pub fn random_qe<R: Rng>(rng: &mut R, segment: &str, metric: &str, n: usize) -> ScoreMatrix {
    ScoreMatrix::qe(segment, metric, distinct_scores(rng, n)).unwrap()
}

/// Every matrix a segment of `language_pair` could need: pairwise for
/// reference-based metrics and QE vectors for QE metrics.
pub fn full_matrices<R: Rng>(rng: &mut R, set: &CandidateSet) -> HashMap<String, ScoreMatrix> {
    use mbrkit::registry::{self, MetricKind};
    let mut out = HashMap::new();
    for spec in registry::METRICS {
        let m = match spec.kind {
            MetricKind::ReferenceBased => random_pairwise(rng, &set.segment_id, spec.id, set.len()),
            MetricKind::Qe => random_qe(rng, &set.segment_id, spec.id, set.len()),
        };
        out.insert(spec.id.to_string(), m);
    }
    out
}

/// The pseudocode run literally on sample strings: duplicate samples share
/// one dictionary entry, so the rank assigned last wins for all copies.
/// Returns the selected text.
pub fn reference_ensemble_by_text<'a>(
    strategy: &str,
    samples: &[&'a str],
    metrics: &[(Vec<f64>, bool)],
) -> &'a str {
    let mut output = vec![vec![0.0; metrics.len()]; samples.len()];
    for (metric_idx, (scores, lower)) in metrics.iter().enumerate() {
        let by_index = rank_samples_by_metric(scores, *lower);
        let mut order: Vec<(usize, usize)> = by_index.into_iter().map(|(s, r)| (r, s)).collect();
        order.sort_unstable();
        let mut sample_to_rank: HashMap<&str, usize> = HashMap::new();
        for (rank, s) in order {
            sample_to_rank.insert(samples[s], rank);
        }
        for (sample_idx, row) in output.iter_mut().enumerate() {
            row[metric_idx] = sample_to_rank[samples[sample_idx]] as f64;
        }
    }
    let score_list: Vec<f64> = output
        .iter()
        .map(|x| match strategy {
            "rankAvg" => x.iter().sum::<f64>() / x.len() as f64,
            "rankMed" => np_median(x),
            "rankMax" => x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "rank75q" => np_quantile(x, 0.75),
            other => panic!("no such strategy {other}"),
        })
        .collect();
    samples[select_samples_by_score(&score_list)]
}
