//! Logistic-weight ordered noise patterns.
//!
//! A pattern is a set of reliability ranks (1 = least reliable bit). Its
//! logistic weight is the sum of the ranks, so the patterns of weight `w` are
//! exactly the partitions of `w` into distinct parts no larger than `n`.
//! Weights are visited in increasing order; within a weight, partitions are
//! listed largest part first in descending lexicographic order, e.g. for
//! `w = 6`: `{6}`, `{5,1}`, `{4,2}`, `{3,2,1}`.

/// Lazy generator over all `2^n` rank subsets in logistic-weight order.
///
/// Each call to [`PatternGenerator::next_pattern`] costs time proportional to
/// the number of parts of the current pattern.
#[derive(Clone, Debug)]
pub struct PatternGenerator {
    n: u32,
    weight: u64,
    /// Current partition, strictly decreasing.
    parts: Vec<u32>,
    emitted: u64,
    exhausted: bool,
}

impl PatternGenerator {
    pub fn new(n: usize) -> Self {
        Self {
            n: u32::try_from(n).expect("code length fits in u32"),
            weight: 0,
            parts: Vec::new(),
            emitted: 0,
            exhausted: false,
        }
    }

    /// Rewinds to the empty pattern, keeping the allocation.
    pub fn reset(&mut self) {
        self.weight = 0;
        self.parts.clear();
        self.emitted = 0;
        self.exhausted = false;
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Logistic weight of the most recently emitted pattern.
    pub fn current_weight(&self) -> u64 {
        self.weight
    }

    pub fn queries_emitted(&self) -> u64 {
        self.emitted
    }

    pub fn max_weight(&self) -> u64 {
        let n = u64::from(self.n);
        n * (n + 1) / 2
    }

    /// The next rank set to flip, or `None` once all `2^n` have been emitted.
    pub fn next_pattern(&mut self) -> Option<&[u32]> {
        self.next_with_prefix().map(|(parts, _)| parts)
    }

    /// Like [`PatternGenerator::next_pattern`], also returning how many
    /// leading parts are unchanged from the previous pattern.
    pub fn next_with_prefix(&mut self) -> Option<(&[u32], usize)> {
        if self.exhausted {
            return None;
        }
        if self.emitted == 0 {
            self.emitted = 1;
            return Some((&self.parts, 0));
        }
        let kept = match self.advance_within_weight() {
            Some(kept) => kept,
            None => {
                self.weight += 1;
                if self.weight > self.max_weight() {
                    self.exhausted = true;
                    return None;
                }
                self.parts.clear();
                fill_greedy(&mut self.parts, self.weight, self.n);
                0
            }
        };
        self.emitted += 1;
        Some((&self.parts, kept))
    }

    /// Replaces the partition with its successor of the same weight. Lowers
    /// the rightmost part that can drop by one while the remainder still fits
    /// in distinct smaller parts, then refills the tail greedily. Returns the
    /// index of the lowered part.
    fn advance_within_weight(&mut self) -> Option<usize> {
        let mut tail: u64 = 0;
        for j in (0..self.parts.len()).rev() {
            tail += u64::from(self.parts[j]);
            let lowered = self.parts[j] - 1;
            if lowered == 0 {
                continue;
            }
            let rest = tail - u64::from(lowered);
            let room = u64::from(lowered) * u64::from(lowered - 1) / 2;
            if rest <= room {
                self.parts.truncate(j);
                self.parts.push(lowered);
                fill_greedy(&mut self.parts, rest, lowered - 1);
                return Some(j);
            }
        }
        None
    }
}

impl Iterator for PatternGenerator {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        self.next_pattern().map(<[u32]>::to_vec)
    }
}

/// Appends the largest (descending-lex first) partition of `rest` into
/// distinct parts each at most `cap`. Caller guarantees feasibility.
fn fill_greedy(parts: &mut Vec<u32>, mut rest: u64, mut cap: u32) {
    while rest > 0 {
        let part = rest.min(u64::from(cap)) as u32;
        debug_assert!(part > 0, "infeasible greedy fill");
        parts.push(part);
        rest -= u64::from(part);
        cap = part - 1;
    }
}

/// Sum of ranks.
pub fn logistic_weight(ranks: &[u32]) -> u64 {
    ranks.iter().map(|&r| u64::from(r)).sum()
}
