//! Sentence-level chrF / chrF++ (character order 6, beta 2).

use super::ngrams::{char_ngrams, word_ngrams, Counts, Interner};
use super::tokenize::{is_py_whitespace, split_words};

pub const CHAR_ORDER: usize = 6;
pub const BETA: u32 = 2;
const EPS: f64 = 1e-16;
const PUNCTUATION: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

/// Character n-grams (whitespace removed) followed by word n-grams.
#[derive(Debug, Clone)]
pub struct ChrfProfile {
    orders: Vec<Counts>,
}

impl ChrfProfile {
    pub fn new(text: &str, word_order: usize, interner: &mut Interner) -> Self {
        let chars: Vec<char> = text.chars().filter(|c| !is_py_whitespace(*c)).collect();
        let mut orders = char_ngrams(&chars, CHAR_ORDER, interner);
        if word_order > 0 {
            let words = split_punctuation(text);
            orders.extend(word_ngrams(&words, word_order, interner));
        }
        ChrfProfile { orders }
    }

    pub fn is_empty(&self) -> bool {
        self.orders.iter().all(Counts::is_empty)
    }
}

/// Detaches one leading or trailing punctuation mark from each word.
///
/// Only one side is split: a trailing mark wins over a leading one, so
/// `(hi)` becomes `(hi` and `)`.
fn split_punctuation(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for word in split_words(text) {
        let mut chars = word.chars();
        let first = chars.next().expect("split_words yields non-empty words");
        let last = chars.next_back();
        match last {
            None => out.push(word),
            Some(last) if PUNCTUATION.contains(last) => {
                let cut = word.len() - last.len_utf8();
                out.push(&word[..cut]);
                out.push(&word[cut..]);
            }
            Some(_) if PUNCTUATION.contains(first) => {
                let cut = first.len_utf8();
                out.push(&word[..cut]);
                out.push(&word[cut..]);
            }
            Some(_) => out.push(word),
        }
    }
    out
}

/// Per-order (hypothesis count, reference count, matches).
///
/// The hypothesis count is reported as zero for orders where the reference
/// has no n-grams, so those orders drop out of the average.
pub fn match_statistics(hyp: &ChrfProfile, reference: &ChrfProfile) -> Vec<[u32; 3]> {
    hyp.orders
        .iter()
        .zip(&reference.orders)
        .map(|(h, r)| {
            let n_hyp = if r.is_empty() { 0 } else { h.total() };
            [n_hyp, r.total(), h.clipped_matches(r)]
        })
        .collect()
}

/// F-beta over precision and recall averaged across the orders where both
/// sides have n-grams. Scaled to [0, 100].
pub fn f_score(stats: &[[u32; 3]]) -> f64 {
    let factor = f64::from(BETA * BETA);
    let mut avg_prec = 0.0;
    let mut avg_rec = 0.0;
    let mut effective_order = 0u32;
    for &[n_hyp, n_ref, n_match] in stats {
        let prec = if n_hyp > 0 {
            f64::from(n_match) / f64::from(n_hyp)
        } else {
            EPS
        };
        let rec = if n_ref > 0 {
            f64::from(n_match) / f64::from(n_ref)
        } else {
            EPS
        };
        if n_hyp > 0 && n_ref > 0 {
            avg_prec += prec;
            avg_rec += rec;
            effective_order += 1;
        }
    }
    if effective_order == 0 {
        return 0.0;
    }
    avg_prec /= f64::from(effective_order);
    avg_rec /= f64::from(effective_order);
    if avg_prec + avg_rec == 0.0 {
        return 0.0;
    }
    let mut score = (1.0 + factor) * avg_prec * avg_rec;
    score /= factor * avg_prec + avg_rec;
    100.0 * score
}

pub fn score_profiles(hyp: &ChrfProfile, reference: &ChrfProfile) -> f64 {
    f_score(&match_statistics(hyp, reference))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punctuation_split_one_side() {
        assert_eq!(
            split_punctuation("(hi) there, !"),
            ["(hi", ")", "there", ",", "!"]
        );
        assert_eq!(split_punctuation("\"quote"), ["\"", "quote"]);
    }

    #[test]
    fn f_score_of_perfect_match() {
        let stats = vec![[5, 5, 5], [4, 4, 4], [0, 0, 0]];
        assert_eq!(f_score(&stats), 100.0);
    }

    #[test]
    fn f_score_with_no_effective_order() {
        assert_eq!(f_score(&[[0, 3, 0]]), 0.0);
    }
}
