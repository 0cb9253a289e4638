//! Sentence-level BLEU: 13a tokens, n-gram order 4, exponential smoothing,
//! effective order.

use super::ngrams::{word_ngrams, Counts, Interner};
use super::tokenize::{rstrip, split_words, tokenize_13a};

pub const MAX_ORDER: usize = 4;

/// Log of a zero precision.
const LOG_ZERO: f64 = -9_999_999_999.0;

#[derive(Debug, Clone)]
pub struct BleuProfile {
    len: u32,
    orders: Vec<Counts>,
}

impl BleuProfile {
    pub fn new(text: &str, interner: &mut Interner) -> Self {
        let tokenized = tokenize_13a(rstrip(text));
        let tokens: Vec<&str> = split_words(&tokenized).collect();
        BleuProfile {
            len: tokens.len() as u32,
            orders: word_ngrams(&tokens, MAX_ORDER, interner),
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Sufficient statistics of one hypothesis/reference pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BleuStats {
    pub hyp_len: u32,
    pub ref_len: u32,
    pub correct: [u32; MAX_ORDER],
    pub total: [u32; MAX_ORDER],
}

pub fn statistics(hyp: &BleuProfile, reference: &BleuProfile) -> BleuStats {
    let mut correct = [0; MAX_ORDER];
    let mut total = [0; MAX_ORDER];
    for k in 0..MAX_ORDER {
        total[k] = hyp.orders[k].total();
        correct[k] = hyp.orders[k].clipped_matches(&reference.orders[k]);
    }
    BleuStats {
        hyp_len: hyp.len,
        ref_len: reference.len,
        correct,
        total,
    }
}

fn ln_or_floor(p: f64) -> f64 {
    if p == 0.0 {
        LOG_ZERO
    } else {
        p.ln()
    }
}

/// BLEU in [0, 100] from sufficient statistics.
pub fn score_from_stats(stats: &BleuStats) -> f64 {
    if stats.hyp_len == 0 {
        return 0.0;
    }
    let bp = if stats.hyp_len < stats.ref_len {
        (1.0 - f64::from(stats.ref_len) / f64::from(stats.hyp_len)).exp()
    } else {
        1.0
    };

    let mut precisions = [0.0f64; MAX_ORDER];
    let mut smooth = 1.0f64;
    let mut effective_order = MAX_ORDER;
    for (n, precision) in precisions.iter_mut().enumerate() {
        let (correct, total) = (stats.correct[n], stats.total[n]);
        if total == 0 {
            break;
        }
        effective_order = n + 1;
        if correct == 0 {
            smooth *= 2.0;
            *precision = 100.0 / (smooth * f64::from(total));
        } else {
            *precision = 100.0 * f64::from(correct) / f64::from(total);
        }
    }

    let log_sum = precisions[..effective_order]
        .iter()
        .fold(0.0, |acc, &p| acc + ln_or_floor(p));
    // exp(ln(100)) rounds to 100.00000000000004; a perfect match is 100.
    (bp * (log_sum / effective_order as f64).exp()).min(100.0)
}

pub fn score_profiles(hyp: &BleuProfile, reference: &BleuProfile) -> f64 {
    score_from_stats(&statistics(hyp, reference))
}
