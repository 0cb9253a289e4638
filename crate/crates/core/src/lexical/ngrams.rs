//! Interned n-gram count vectors.
//!
//! Every distinct n-gram string seen while preparing a batch of texts gets a
//! dense id, so matching two texts is a merge over sorted `(id, count)` runs
//! instead of repeated string hashing.

use std::collections::HashMap;

#[derive(Debug, Default)]
pub struct Interner {
    ids: HashMap<String, u32>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, key: &str) -> u32 {
        if let Some(&id) = self.ids.get(key) {
            return id;
        }
        let id = self.ids.len() as u32;
        self.ids.insert(key.to_owned(), id);
        id
    }
}

/// Multiset of n-gram ids, sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counts {
    entries: Vec<(u32, u32)>,
    total: u32,
}

impl Counts {
    pub fn from_ids(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        let total = ids.len() as u32;
        let mut entries: Vec<(u32, u32)> = Vec::new();
        for id in ids {
            match entries.last_mut() {
                Some((last, count)) if *last == id => *count += 1,
                _ => entries.push((id, 1)),
            }
        }
        Counts { entries, total }
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Sum over shared n-grams of the smaller count.
    pub fn clipped_matches(&self, other: &Counts) -> u32 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut matched) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    matched += a[i].1.min(b[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        matched
    }
}

/// Character n-gram counts of orders `1..=max_order`.
pub fn char_ngrams(chars: &[char], max_order: usize, interner: &mut Interner) -> Vec<Counts> {
    let mut buf = String::new();
    (1..=max_order)
        .map(|order| {
            let ids = if chars.len() >= order {
                chars
                    .windows(order)
                    .map(|w| {
                        buf.clear();
                        buf.extend(w);
                        interner.intern(&buf)
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Counts::from_ids(ids)
        })
        .collect()
}

/// Word n-gram counts of orders `1..=max_order`; tokens are joined by a
/// single space, which is unambiguous because tokens contain no whitespace.
pub fn word_ngrams<S: AsRef<str>>(
    tokens: &[S],
    max_order: usize,
    interner: &mut Interner,
) -> Vec<Counts> {
    let mut buf = String::new();
    (1..=max_order)
        .map(|order| {
            let ids = if tokens.len() >= order {
                tokens
                    .windows(order)
                    .map(|w| {
                        buf.clear();
                        for (k, t) in w.iter().enumerate() {
                            if k > 0 {
                                buf.push(' ');
                            }
                            buf.push_str(t.as_ref());
                        }
                        interner.intern(&buf)
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Counts::from_ids(ids)
        })
        .collect()
}
