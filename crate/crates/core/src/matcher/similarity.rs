//! String similarity measures. All of them case-fold their inputs first.

fn folded(s: &str) -> Vec<char> {
    s.chars().flat_map(char::to_lowercase).collect()
}

/// Sorted character-bigram multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bigrams {
    chars: Vec<char>,
    pairs: Vec<(char, char)>,
}

impl Bigrams {
    pub(crate) fn new(s: &str) -> Self {
        let chars = folded(s);
        let mut pairs: Vec<(char, char)> = chars.windows(2).map(|w| (w[0], w[1])).collect();
        pairs.sort_unstable();
        Self { chars, pairs }
    }

    pub(crate) fn dice(&self, other: &Bigrams) -> f64 {
        if self.chars.len() < 2 || other.chars.len() < 2 {
            return if self.chars == other.chars { 1.0 } else { 0.0 };
        }
        let (mut i, mut j, mut shared) = (0, 0, 0usize);
        while i < self.pairs.len() && j < other.pairs.len() {
            match self.pairs[i].cmp(&other.pairs[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        2.0 * shared as f64 / (self.pairs.len() + other.pairs.len()) as f64
    }
}

/// Sørensen-Dice coefficient over character-bigram multisets,
/// `2|X ∩ Y| / (|X| + |Y|)`. Inputs shorter than two characters compare by
/// exact equality.
pub fn dice_similarity(a: &str, b: &str) -> f64 {
    Bigrams::new(a).dice(&Bigrams::new(b))
}

/// Minimum number of single-character insertions, deletions and
/// substitutions turning `a` into `b`.
pub fn levenshtein_distance(a: &str, b: &str) -> usize {
    levenshtein_chars(&folded(a), &folded(b))
}

pub(crate) fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            cur[j + 1] = substitution.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

const RUN_PENALTY: i64 = 3;

/// Subsequence score of `query` inside `target`, `None` when `query` is not a
/// subsequence. The score is `0 - gaps - 3 * extra_runs - trailing`, where
/// `gaps` counts target characters skipped between the first and last
/// matched character, `extra_runs` counts contiguous matched runs beyond the
/// first, and `trailing` counts target characters after the match. The best
/// (closest to zero) embedding is used, so an exact match scores 0.
pub fn fuzzy_score(query: &str, target: &str) -> Option<i64> {
    fuzzy_chars(&folded(query), &folded(target))
}

pub(crate) fn fuzzy_chars(query: &[char], target: &[char]) -> Option<i64> {
    let m = target.len() as i64;
    if query.is_empty() {
        return Some(-m);
    }
    if query.len() > target.len() {
        return None;
    }
    const NONE: i64 = i64::MAX / 4;
    // best[i]: minimal penalty so far with the current query char at target[i].
    let mut best: Vec<i64> = target
        .iter()
        .map(|&c| if c == query[0] { 0 } else { NONE })
        .collect();
    for &qc in &query[1..] {
        let mut next = vec![NONE; target.len()];
        // min over i' <= i-2 of best[i'] - i'
        let mut far = NONE;
        for i in 1..target.len() {
            if i >= 2 && best[i - 2] < NONE {
                far = far.min(best[i - 2] - (i as i64 - 2));
            }
            if target[i] != qc {
                continue;
            }
            let adjacent = best[i - 1];
            let jump = if far < NONE {
                far + i as i64 - 1 + RUN_PENALTY
            } else {
                NONE
            };
            next[i] = adjacent.min(jump);
        }
        best = next;
    }
    best.iter()
        .enumerate()
        .filter(|(_, &p)| p < NONE)
        .map(|(i, &p)| p + (m - 1 - i as i64))
        .min()
        .map(|p| -p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dice_examples() {
        assert_eq!(dice_similarity("night", "night"), 1.0);
        assert_eq!(dice_similarity("night", "nacht"), 0.25);
        assert_eq!(dice_similarity("a", "b"), 0.0);
        assert_eq!(dice_similarity("a", "A"), 1.0);
        assert_eq!(dice_similarity("", ""), 1.0);
        assert_eq!(dice_similarity("Night", "NIGHT"), 1.0);
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein_distance("kitten", "sitting"), 3);
        assert_eq!(levenshtein_distance("same", "same"), 0);
        assert_eq!(levenshtein_distance("", "abc"), 3);
        assert_eq!(levenshtein_distance("Hash", "hash"), 0);
        assert_eq!(levenshtein_distance("hash", "hashing"), 3);
    }

    #[test]
    fn fuzzy_examples() {
        assert_eq!(fuzzy_score("tamper", "tamper"), Some(0));
        assert_eq!(fuzzy_score("tp", "tamper"), Some(-7));
        assert_eq!(fuzzy_score("xyz", "tamper"), None);
        assert_eq!(fuzzy_score("TAM", "tamper"), Some(-3));
        assert_eq!(fuzzy_score("", ""), Some(0));
        // A later contiguous embedding beats the leftmost one.
        assert_eq!(fuzzy_score("ab", "axab"), Some(0));
    }
}
