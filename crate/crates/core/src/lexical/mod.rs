//! Native sentence-level lexical metrics: sentBLEU, chrF, chrF++ and TER.
//!
//! Configurations follow the sacreBLEU 2.4.2 defaults for `-m bleu
//! --sentence-level`, `-m chrf`, `-m chrf --chrf-word-order 2` and `-m ter`:
//!
//! * BLEU: 13a tokenization, case-sensitive, max order 4, exponential
//!   smoothing, effective order.
//! * chrF: character order 6, beta 2, whitespace excluded; chrF++ adds word
//!   uni- and bigrams.
//! * TER: lowercased whitespace tokens, no punctuation handling, greedy
//!   shifts.
//!
//! For scoring many pairs out of one candidate pool use [`PairwiseScorer`],
//! which prepares every text once.

pub mod bleu;
pub mod chrf;
pub mod ngrams;
pub mod ter;
pub mod tokenize;

use std::fmt;

use crate::error::{Error, Result};
use crate::registry;

use self::ngrams::Interner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexicalMetric {
    SentBleu,
    Chrf,
    ChrfPlusPlus,
    Ter,
}

impl LexicalMetric {
    pub const ALL: [LexicalMetric; 4] = [
        LexicalMetric::SentBleu,
        LexicalMetric::Chrf,
        LexicalMetric::ChrfPlusPlus,
        LexicalMetric::Ter,
    ];

    /// Resolves a registry id. Known neural metrics yield
    /// [`Error::UnsupportedNativeMetric`].
    pub fn from_id(id: &str) -> Result<Self> {
        let canonical = registry::canonical_id(id)?;
        match canonical {
            registry::SENT_BLEU => Ok(LexicalMetric::SentBleu),
            registry::CHRF => Ok(LexicalMetric::Chrf),
            registry::CHRF_PP => Ok(LexicalMetric::ChrfPlusPlus),
            registry::TER => Ok(LexicalMetric::Ter),
            other => Err(Error::UnsupportedNativeMetric(other.to_string())),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            LexicalMetric::SentBleu => registry::SENT_BLEU,
            LexicalMetric::Chrf => registry::CHRF,
            LexicalMetric::ChrfPlusPlus => registry::CHRF_PP,
            LexicalMetric::Ter => registry::TER,
        }
    }

    /// Value of a text scored against itself.
    pub fn self_score(self) -> f64 {
        match self {
            LexicalMetric::Ter => 0.0,
            _ => 100.0,
        }
    }

    /// Scores one pair, rejecting references that are empty after
    /// tokenization.
    pub fn score(self, hypothesis: &str, reference: &str) -> Result<f64> {
        let scorer = PairwiseScorer::new(self, &[hypothesis, reference]);
        if scorer.is_empty_reference(1) {
            return Err(Error::EmptyReference);
        }
        Ok(scorer.score(0, 1))
    }
}

impl fmt::Display for LexicalMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

pub fn sent_bleu(hypothesis: &str, reference: &str) -> Result<f64> {
    LexicalMetric::SentBleu.score(hypothesis, reference)
}

/// chrF with word n-grams up to `word_order` (0 = chrF, 2 = chrF++).
pub fn chrf(hypothesis: &str, reference: &str, word_order: usize) -> Result<f64> {
    let mut interner = Interner::new();
    let hyp = chrf::ChrfProfile::new(hypothesis, word_order, &mut interner);
    let reference = chrf::ChrfProfile::new(reference, word_order, &mut interner);
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    Ok(chrf::score_profiles(&hyp, &reference))
}

pub fn ter(hypothesis: &str, reference: &str) -> Result<f64> {
    LexicalMetric::Ter.score(hypothesis, reference)
}

enum Profiles {
    Bleu(Vec<bleu::BleuProfile>),
    Chrf(Vec<chrf::ChrfProfile>),
    Ter(Vec<Vec<u32>>),
}

/// A pool of texts prepared once for repeated pairwise scoring.
///
/// Pairs whose reference side is empty follow the reference scorer's
/// conventions instead of failing (BLEU and chrF score 0, TER scores 100 for
/// a non-empty hypothesis and 0 otherwise), so a pool may contain empty
/// samples.
pub struct PairwiseScorer {
    metric: LexicalMetric,
    profiles: Profiles,
}

impl PairwiseScorer {
    pub fn new<S: AsRef<str>>(metric: LexicalMetric, texts: &[S]) -> Self {
        let mut interner = Interner::new();
        let profiles = match metric {
            LexicalMetric::SentBleu => Profiles::Bleu(
                texts
                    .iter()
                    .map(|t| bleu::BleuProfile::new(t.as_ref(), &mut interner))
                    .collect(),
            ),
            LexicalMetric::Chrf | LexicalMetric::ChrfPlusPlus => {
                let word_order = if metric == LexicalMetric::Chrf { 0 } else { 2 };
                Profiles::Chrf(
                    texts
                        .iter()
                        .map(|t| chrf::ChrfProfile::new(t.as_ref(), word_order, &mut interner))
                        .collect(),
                )
            }
            LexicalMetric::Ter => Profiles::Ter(
                texts
                    .iter()
                    .map(|t| {
                        tokenize::tokenize_tercom(t.as_ref())
                            .iter()
                            .map(|w| interner.intern(w))
                            .collect()
                    })
                    .collect(),
            ),
        };
        PairwiseScorer { metric, profiles }
    }

    pub fn metric(&self) -> LexicalMetric {
        self.metric
    }

    pub fn len(&self) -> usize {
        match &self.profiles {
            Profiles::Bleu(p) => p.len(),
            Profiles::Chrf(p) => p.len(),
            Profiles::Ter(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when text `i` has nothing to match against as a reference.
    pub fn is_empty_reference(&self, i: usize) -> bool {
        match &self.profiles {
            Profiles::Bleu(p) => p[i].is_empty(),
            Profiles::Chrf(p) => p[i].is_empty(),
            Profiles::Ter(p) => p[i].is_empty(),
        }
    }

    /// Scores text `hyp` against text `reference`.
    pub fn score(&self, hyp: usize, reference: usize) -> f64 {
        match &self.profiles {
            Profiles::Bleu(p) => bleu::score_profiles(&p[hyp], &p[reference]),
            Profiles::Chrf(p) => chrf::score_profiles(&p[hyp], &p[reference]),
            Profiles::Ter(p) => {
                let (edits, ref_len) = ter::edit_statistics(&p[hyp], &p[reference]);
                ter::score_from_stats(edits, ref_len)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scores() {
        assert_eq!(sent_bleu("the cat sat", "the cat sat").unwrap(), 100.0);
        assert_eq!(chrf("abc def", "abc def", 0).unwrap(), 100.0);
        assert_eq!(chrf("abc def", "abc def", 2).unwrap(), 100.0);
        assert_eq!(ter("a b c", "a b c").unwrap(), 0.0);
    }

    #[test]
    fn empty_hypothesis() {
        assert_eq!(sent_bleu("", "the cat sat").unwrap(), 0.0);
        assert_eq!(chrf("", "abc", 0).unwrap(), 0.0);
        assert_eq!(ter("", "a b").unwrap(), 100.0);
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert!(matches!(sent_bleu("a", ""), Err(Error::EmptyReference)));
        assert!(matches!(sent_bleu("a", " \t "), Err(Error::EmptyReference)));
        assert!(matches!(chrf("a", "  ", 0), Err(Error::EmptyReference)));
        assert!(matches!(ter("a", ""), Err(Error::EmptyReference)));
    }

    #[test]
    fn ter_examples() {
        assert_eq!(ter("x", "a b c d").unwrap(), 100.0);
        assert!((ter("c a b", "a b c").unwrap() - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn chrf_word_order_zero_is_chrf() {
        let pairs = [("the cat", "a cat"), ("x", "xyz"), ("abc, def.", "abc def")];
        for (h, r) in pairs {
            let a = chrf(h, r, 0).unwrap();
            let b = PairwiseScorer::new(LexicalMetric::Chrf, &[h, r]).score(0, 1);
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn neural_metrics_are_not_native() {
        assert!(matches!(
            LexicalMetric::from_id("MetricX"),
            Err(Error::UnsupportedNativeMetric(_))
        ));
        assert!(matches!(
            LexicalMetric::from_id("nope"),
            Err(Error::UnknownMetric(_))
        ));
        assert_eq!(
            LexicalMetric::from_id("chrF++").unwrap(),
            LexicalMetric::ChrfPlusPlus
        );
    }
}
