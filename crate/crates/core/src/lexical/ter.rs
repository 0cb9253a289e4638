//! Translation edit rate with Tercom-style greedy block shifts.
//!
//! Shifts are searched greedily: at each step the shift that lowers the
//! word-level edit distance the most is applied, until no shift helps. The
//! edit distance itself is a beam-limited Levenshtein around the length-ratio
//! diagonal, with rows cached by hypothesis prefix.

use std::collections::HashMap;

const COST_INS: i64 = 1;
const COST_DEL: i64 = 1;
const COST_SUB: i64 = 1;
const MAX_SHIFT_SIZE: usize = 10;
const MAX_SHIFT_DIST: usize = 50;
const BEAM_WIDTH: usize = 25;
const MAX_CACHE_SIZE: usize = 10_000;
const MAX_SHIFT_CANDIDATES: usize = 1_000;
const INFINITY: i64 = 10_000_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Nop,
    Sub,
    Ins,
    Del,
    Undef,
}

impl Op {
    /// The trace is computed hypothesis-to-reference and read back the other way.
    fn flipped(self) -> Op {
        match self {
            Op::Ins => Op::Del,
            Op::Del => Op::Ins,
            other => other,
        }
    }
}

type Cell = (i64, Op);
type Row = Vec<Cell>;

struct CacheNode {
    children: HashMap<u32, usize>,
    row: Row,
}

struct BeamEditDistance<'r> {
    reference: &'r [u32],
    initial_row: Row,
    empty_row: Row,
    // nodes[0] is the root; its row is unused.
    nodes: Vec<CacheNode>,
}

impl<'r> BeamEditDistance<'r> {
    fn new(reference: &'r [u32]) -> Self {
        let n = reference.len();
        BeamEditDistance {
            reference,
            initial_row: (0..=n).map(|j| (j as i64 * COST_INS, Op::Ins)).collect(),
            empty_row: vec![(INFINITY, Op::Undef); n + 1],
            nodes: vec![CacheNode {
                children: HashMap::new(),
                row: Vec::new(),
            }],
        }
    }

    fn distance(&mut self, hyp: &[u32]) -> (i64, Vec<Op>) {
        let (start, path) = self.find_cache(hyp);
        let mut dist: Vec<Row> = Vec::with_capacity(hyp.len() + 1);
        dist.push(self.initial_row.clone());
        for &node in &path {
            dist.push(self.nodes[node].row.clone());
        }
        let (value, trace) = self.edit_distance(hyp, start, &mut dist);
        self.add_cache(hyp, start, path.last().copied().unwrap_or(0), &dist);
        (value, trace)
    }

    fn find_cache(&self, hyp: &[u32]) -> (usize, Vec<usize>) {
        let mut node = 0;
        let mut path = Vec::new();
        for word in hyp {
            match self.nodes[node].children.get(word) {
                Some(&child) => {
                    path.push(child);
                    node = child;
                }
                None => break,
            }
        }
        (path.len(), path)
    }

    fn add_cache(&mut self, hyp: &[u32], start: usize, mut node: usize, dist: &[Row]) {
        if self.nodes.len() > MAX_CACHE_SIZE {
            return;
        }
        for (i, &word) in hyp.iter().enumerate().skip(start) {
            let next = match self.nodes[node].children.get(&word) {
                Some(&child) => child,
                None => {
                    self.nodes.push(CacheNode {
                        children: HashMap::new(),
                        row: dist[i + 1].clone(),
                    });
                    let child = self.nodes.len() - 1;
                    self.nodes[node].children.insert(word, child);
                    child
                }
            };
            node = next;
        }
    }

    fn edit_distance(&self, hyp: &[u32], start: usize, dist: &mut Vec<Row>) -> (i64, Vec<Op>) {
        let n_hyp = hyp.len();
        let n_ref = self.reference.len();
        while dist.len() < n_hyp + 1 {
            dist.push(self.empty_row.clone());
        }

        let length_ratio = if hyp.is_empty() {
            1.0
        } else {
            n_ref as f64 / n_hyp as f64
        };
        let beam_width = if (BEAM_WIDTH as f64) < length_ratio / 2.0 {
            (length_ratio / 2.0 + BEAM_WIDTH as f64).ceil() as usize
        } else {
            BEAM_WIDTH
        };

        for i in start + 1..=n_hyp {
            let pseudo_diag = (i as f64 * length_ratio).floor() as usize;
            let min_j = pseudo_diag.saturating_sub(beam_width);
            let max_j = if i == n_hyp {
                n_ref + 1
            } else {
                (n_ref + 1).min(pseudo_diag + beam_width)
            };

            let (prev_rows, cur_rows) = dist.split_at_mut(i);
            let prev = &prev_rows[i - 1];
            let cur = &mut cur_rows[0];
            for j in min_j..max_j {
                if j == 0 {
                    cur[0] = (prev[0].0 + COST_DEL, Op::Del);
                    continue;
                }
                let (cost_sub, op_sub) = if hyp[i - 1] == self.reference[j - 1] {
                    (0, Op::Nop)
                } else {
                    (COST_SUB, Op::Sub)
                };
                // Preference order: diagonal, then deletion, then insertion.
                let candidates = [
                    (prev[j - 1].0 + cost_sub, op_sub),
                    (prev[j].0 + COST_DEL, Op::Del),
                    (cur[j - 1].0 + COST_INS, Op::Ins),
                ];
                for (cost, op) in candidates {
                    if cur[j].0 > cost {
                        cur[j] = (cost, op);
                    }
                }
            }
        }

        let mut trace = Vec::new();
        let (mut i, mut j) = (n_hyp, n_ref);
        while i > 0 || j > 0 {
            let op = dist[i][j].1;
            trace.push(op);
            match op {
                Op::Sub | Op::Nop => {
                    i -= 1;
                    j -= 1;
                }
                Op::Ins => j -= 1,
                Op::Del => i -= 1,
                Op::Undef => unreachable!("trace reached an unfilled cell"),
            }
        }
        trace.reverse();
        (dist[n_hyp][n_ref].0, trace)
    }
}

struct Alignment {
    /// Reference position -> hypothesis position (-1 before the first word).
    align: Vec<isize>,
    ref_err: Vec<u8>,
    hyp_err: Vec<u8>,
}

fn trace_to_alignment(trace: &[Op]) -> Alignment {
    let mut ref_pos: isize = -1;
    let mut hyp_pos: isize = -1;
    let mut align = Vec::new();
    let mut ref_err = Vec::new();
    let mut hyp_err = Vec::new();
    for op in trace {
        match op {
            Op::Nop | Op::Sub => {
                let e = u8::from(*op == Op::Sub);
                hyp_pos += 1;
                ref_pos += 1;
                align.push(hyp_pos);
                ref_err.push(e);
                hyp_err.push(e);
            }
            Op::Ins => {
                hyp_pos += 1;
                hyp_err.push(1);
            }
            Op::Del => {
                ref_pos += 1;
                align.push(hyp_pos);
                ref_err.push(1);
            }
            Op::Undef => unreachable!(),
        }
    }
    debug_assert_eq!(align.len() as isize, ref_pos + 1);
    Alignment {
        align,
        ref_err,
        hyp_err,
    }
}

/// Moves `words[start..start + len]` so that it begins before index `target`.
fn perform_shift(words: &[u32], start: usize, len: usize, target: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(words.len());
    if target < start {
        out.extend_from_slice(&words[..target]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[target..start]);
        out.extend_from_slice(&words[start + len..]);
    } else if target > start + len {
        out.extend_from_slice(&words[..start]);
        out.extend_from_slice(&words[start + len..target]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[target..]);
    } else {
        // a target inside the block moves it right by `target - start`,
        // stopping at the end of the sentence
        let end = (len + target).min(words.len());
        out.extend_from_slice(&words[..start]);
        out.extend_from_slice(&words[start + len..end]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[end..]);
    }
    out
}

/// Matching word runs `(start_h, start_r, len)`, every prefix length yielded.
fn shifted_pairs(hyp: &[u32], reference: &[u32]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for start_h in 0..hyp.len() {
        for start_r in 0..reference.len() {
            if start_r.abs_diff(start_h) > MAX_SHIFT_DIST {
                continue;
            }
            let mut len = 0;
            while hyp[start_h + len] == reference[start_r + len] && len < MAX_SHIFT_SIZE {
                len += 1;
                out.push((start_h, start_r, len));
                if hyp.len() == start_h + len || reference.len() == start_r + len {
                    break;
                }
            }
        }
    }
    out
}

struct Candidate {
    gain: i64,
    len: usize,
    start_h: usize,
    target: usize,
    words: Vec<u32>,
}

impl Candidate {
    /// Larger gain, then longer, then earlier source, then earlier target.
    fn beats(&self, other: &Candidate) -> bool {
        (self.gain, self.len, other.start_h, other.target)
            > (other.gain, other.len, self.start_h, self.target)
    }
}

fn best_shift(
    hyp: &[u32],
    reference: &[u32],
    ed: &mut BeamEditDistance<'_>,
    checked: &mut usize,
) -> Option<(i64, Vec<u32>)> {
    let (pre_score, inv_trace) = ed.distance(hyp);
    let trace: Vec<Op> = inv_trace.into_iter().map(Op::flipped).collect();
    let Alignment {
        align,
        ref_err,
        hyp_err,
    } = trace_to_alignment(&trace);

    let mut best: Option<Candidate> = None;
    for (start_h, start_r, len) in shifted_pairs(hyp, reference) {
        if hyp_err[start_h..start_h + len].iter().all(|&e| e == 0) {
            continue;
        }
        if ref_err[start_r..start_r + len].iter().all(|&e| e == 0) {
            continue;
        }
        let aligned = align[start_r];
        if start_h as isize <= aligned && aligned < (start_h + len) as isize {
            continue;
        }

        let mut prev_target: Option<usize> = None;
        for offset in -1..len as isize {
            let pos = start_r as isize + offset;
            let target = if pos == -1 {
                0
            } else if (pos as usize) < align.len() {
                (align[pos as usize] + 1) as usize
            } else {
                break;
            };
            if prev_target == Some(target) {
                continue;
            }
            prev_target = Some(target);

            let words = perform_shift(hyp, start_h, len, target);
            let (score, _) = ed.distance(&words);
            let candidate = Candidate {
                gain: pre_score - score,
                len,
                start_h,
                target,
                words,
            };
            *checked += 1;
            if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                best = Some(candidate);
            }
        }
        if *checked >= MAX_SHIFT_CANDIDATES {
            break;
        }
    }
    best.map(|b| (b.gain, b.words))
}

/// Returns `(edits, reference length)` for token-id sequences.
pub fn edit_statistics(hyp: &[u32], reference: &[u32]) -> (u64, usize) {
    if reference.is_empty() {
        return (hyp.len() as u64, 0);
    }
    let mut ed = BeamEditDistance::new(reference);
    let mut shifts = 0u64;
    let mut current = hyp.to_vec();
    let mut checked = 0usize;
    while let Some((gain, shifted)) = best_shift(&current, reference, &mut ed, &mut checked) {
        if checked >= MAX_SHIFT_CANDIDATES || gain <= 0 {
            break;
        }
        shifts += 1;
        current = shifted;
    }
    let (distance, _) = ed.distance(&current);
    (shifts + distance as u64, reference.len())
}

/// TER as a percentage, using the conventions for empty references.
pub fn score_from_stats(edits: u64, ref_len: usize) -> f64 {
    let rate = if ref_len > 0 {
        edits as f64 / ref_len as f64
    } else if edits > 0 {
        1.0
    } else {
        0.0
    };
    100.0 * rate
}
