//! Lexicographic permutation stream that can jump past every permutation
//! sharing a prefix with the current one.

/// Permutations of `1..=n` in lexicographic order of their image sequences.
///
/// After [`skip_prefix(k)`](Self::skip_prefix) the next call to
/// [`next`](Self::next) returns the first permutation whose length-`k`
/// prefix differs from the current one.
#[derive(Debug, Clone)]
pub struct PrefixSkipPermutations {
    perm: Vec<usize>,
    started: bool,
    done: bool,
    yielded: u64,
    skipped: u64,
}

impl PrefixSkipPermutations {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one element");
        PrefixSkipPermutations {
            perm: (1..=n).collect(),
            started: false,
            done: false,
            yielded: 0,
            skipped: 0,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.started && !next_permutation(&mut self.perm) {
            self.done = true;
            return None;
        }
        self.started = true;
        self.yielded += 1;
        Some(&self.perm)
    }

    /// Drops the rest of the block of permutations sharing the current
    /// length-`k` prefix. Returns how many permutations of that block, the
    /// current one included, are accounted as skipped; this is `(n - k)!`
    /// when the current permutation is the first of its block.
    ///
    /// # Panics
    ///
    /// If `k` is outside `1..=n` or nothing has been yielded yet.
    pub fn skip_prefix(&mut self, k: usize) -> u64 {
        let n = self.perm.len();
        assert!(
            (1..=n).contains(&k),
            "prefix length {k} out of range 1..={n}"
        );
        assert!(self.started && !self.done, "no current permutation");
        let suffix = &mut self.perm[k..];
        let count = factorial(suffix.len()) - lexicographic_rank(suffix);
        suffix.sort_unstable_by(|a, b| b.cmp(a));
        self.skipped += count;
        count
    }

    /// Permutations handed out so far.
    pub fn yielded(&self) -> u64 {
        self.yielded
    }

    /// Total accounted by [`skip_prefix`](Self::skip_prefix), including the
    /// permutation current at each call.
    pub fn skipped(&self) -> u64 {
        self.skipped
    }
}

/// Standard in-place successor; `false` once the sequence is descending.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
        return false;
    };
    let pivot = i - 1;
    let j = (i..perm.len())
        .rev()
        .find(|&j| perm[j] > perm[pivot])
        .expect("successor exists");
    perm.swap(pivot, j);
    perm[i..].reverse();
    true
}

/// 0-based position of `seq` among the permutations of its elements.
fn lexicographic_rank(seq: &[usize]) -> u64 {
    let len = seq.len();
    (0..len)
        .map(|i| {
            let smaller_later = seq[i + 1..].iter().filter(|&&x| x < seq[i]).count() as u64;
            smaller_later * factorial(len - 1 - i)
        })
        .sum()
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
