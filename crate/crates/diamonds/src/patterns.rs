//! Classical permutation patterns: containment, avoidance, the
//! reverse/complement symmetries, and the statistics used by the
//! lattice-path bijection (descents, longest increasing subsequence,
//! right-left maxima).
//!
//! Containment works on any sequence of distinct integers, not just
//! permutations of `1..=n`; the search engine relies on this to test
//! partially assigned label prefixes.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("a permutation must have at least one entry")]
    Empty,
    #[error("values are not a permutation of 1..=n")]
    NotAPermutation,
    #[error("entries must be distinct")]
    DuplicateEntries,
    #[error("cannot parse {0:?} as a permutation")]
    Unparseable(String),
}

/// A permutation of `{1, ..., n}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        if values.is_empty() {
            return Err(PermError::Empty);
        }
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            let idx = (v as usize).wrapping_sub(1);
            if idx >= n || seen[idx] {
                return Err(PermError::NotAPermutation);
            }
            seen[idx] = true;
        }
        Ok(Permutation { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length is at least 1 by construction
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n as u32).collect(),
        }
    }

    pub fn reverse(&self) -> Self {
        Permutation {
            values: self.values.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let n = self.values.len() as u32;
        Permutation {
            values: self.values.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    pub fn reverse_complement(&self) -> Self {
        self.reverse().complement()
    }

    /// Number of positions `i` with `values[i] > values[i+1]`.
    pub fn descents(&self) -> usize {
        descents(&self.values)
    }

    /// Length of a longest increasing subsequence.
    pub fn lis(&self) -> usize {
        lis(&self.values)
    }

    /// Number of right-left maxima: entries larger than everything after them.
    pub fn rlmax(&self) -> usize {
        rlmax(&self.values)
    }

    pub fn contains(&self, pattern: &Pattern) -> bool {
        contains(&self.values, pattern)
    }

    pub fn avoids_all(&self, patterns: &PatternSet) -> bool {
        avoids_all(&self.values, patterns)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.values {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Reverse,
    Complement,
    ReverseComplement,
}

pub fn apply_symmetry(perm: &Permutation, which: Symmetry) -> Permutation {
    match which {
        Symmetry::Reverse => perm.reverse(),
        Symmetry::Complement => perm.complement(),
        Symmetry::ReverseComplement => perm.reverse_complement(),
    }
}

/// A pattern is itself a permutation, usually of length 3.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Permutation);

impl Pattern {
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        Permutation::new(values).map(Pattern)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[u32] {
        self.0.values()
    }

    pub fn reverse_complement(&self) -> Self {
        Pattern(self.0.reverse_complement())
    }
}

/// The order-isomorphic pattern of a sequence of distinct entries.
pub fn reduce(subsequence: &[u32]) -> Result<Pattern, PermError> {
    if subsequence.is_empty() {
        return Err(PermError::Empty);
    }
    let mut sorted: Vec<u32> = subsequence.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(PermError::DuplicateEntries);
    }
    let values = subsequence
        .iter()
        .map(|v| sorted.binary_search(v).unwrap() as u32 + 1)
        .collect();
    Ok(Pattern(Permutation { values }))
}

/// Does `seq` (distinct entries) contain `pattern` as a classical pattern?
///
/// Length-3 patterns get a direct triple scan with early exit; longer
/// patterns go through a backtracking matcher. Correctness is checked
/// against an exhaustive subsequence scan in the tests.
pub fn contains(seq: &[u32], pattern: &Pattern) -> bool {
    let p = pattern.values();
    if p.len() > seq.len() {
        return false;
    }
    match p.len() {
        1 => true, // seq is nonempty here
        3 => contains_len3(seq, p),
        _ => match_from(seq, p, 0, &mut Vec::with_capacity(p.len())),
    }
}

fn contains_len3(seq: &[u32], p: &[u32]) -> bool {
    let n = seq.len();
    let ab = p[0] < p[1];
    let ac = p[0] < p[2];
    let bc = p[1] < p[2];
    for i in 0..n - 2 {
        for j in i + 1..n - 1 {
            if (seq[i] < seq[j]) != ab {
                continue;
            }
            for k in j + 1..n {
                if (seq[i] < seq[k]) == ac && (seq[j] < seq[k]) == bc {
                    return true;
                }
            }
        }
    }
    false
}

fn match_from(seq: &[u32], p: &[u32], start: usize, chosen: &mut Vec<u32>) -> bool {
    let t = chosen.len();
    if t == p.len() {
        return true;
    }
    // not enough entries left to finish the match
    if seq.len() - start < p.len() - t {
        return false;
    }
    for i in start..seq.len() {
        let x = seq[i];
        if chosen.iter().zip(p).all(|(&c, &ps)| (c < x) == (ps < p[t])) {
            chosen.push(x);
            if match_from(seq, p, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

pub fn avoids_all(seq: &[u32], patterns: &PatternSet) -> bool {
    patterns.iter().all(|p| !contains(seq, p))
}

pub fn descents(seq: &[u32]) -> usize {
    seq.windows(2).filter(|w| w[0] > w[1]).count()
}

pub fn lis(seq: &[u32]) -> usize {
    let mut tails: Vec<u32> = Vec::new();
    for &x in seq {
        match tails.binary_search(&x) {
            Ok(_) => unreachable!("entries are distinct"),
            Err(i) => {
                if i == tails.len() {
                    tails.push(x);
                } else {
                    tails[i] = x;
                }
            }
        }
    }
    tails.len()
}

pub fn rlmax(seq: &[u32]) -> usize {
    let mut count = 0;
    let mut best = 0;
    for &x in seq.iter().rev() {
        if x > best {
            count += 1;
            best = x;
        }
    }
    count
}

/// A canonically sorted, duplicate-free set of patterns. The empty set
/// means "no restriction".
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
}

impl PatternSet {
    pub fn empty() -> Self {
        PatternSet::default()
    }

    pub fn new(mut patterns: Vec<Pattern>) -> Self {
        patterns.sort_by(|a, b| (a.len(), a.values()).cmp(&(b.len(), b.values())));
        patterns.dedup();
        PatternSet { patterns }
    }

    pub fn from_patterns<I: IntoIterator<Item = Pattern>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pattern> {
        self.patterns.iter()
    }

    pub fn contains_pattern(&self, values: &[u32]) -> bool {
        self.patterns.iter().any(|p| p.values() == values)
    }

    /// The set obtained by reverse-complementing every member.
    pub fn reverse_complement(&self) -> Self {
        Self::new(
            self.patterns
                .iter()
                .map(Pattern::reverse_complement)
                .collect(),
        )
    }
}

impl FromStr for Pattern {
    type Err = PermError;

    /// Digit strings (`"231"`) for lengths up to 9, comma-separated
    /// (`"2,3,1"`) beyond that.
    fn from_str(s: &str) -> Result<Self, PermError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PermError::Empty);
        }
        let values: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|tok| tok.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| PermError::Unparseable(s.to_string()))?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| PermError::Unparseable(s.to_string()))
                })
                .collect::<Result<_, _>>()?
        };
        Pattern::new(values)
    }
}

impl FromStr for PatternSet {
    type Err = PermError;

    /// Colon-separated patterns, e.g. `"231:321"`. The empty string is
    /// the empty set.
    fn from_str(s: &str) -> Result<Self, PermError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(PatternSet::empty());
        }
        let patterns = s
            .split(':')
            .map(Pattern::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PatternSet::new(patterns))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in self.values() {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.values().iter().map(u32::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.patterns.iter().map(Pattern::to_string).collect();
        f.write_str(&parts.join(":"))
    }
}
