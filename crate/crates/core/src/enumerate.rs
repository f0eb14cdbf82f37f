//! Brute-force oracles: compositions, partitions, the multimodal classifier
//! and exhaustive counts for every family in [`crate::genfun`].
//!
//! A composition is multimodal when, with `n` its largest part, the parts
//! before the first `n` weakly increase and the parts after the last `n`
//! weakly decrease. Whatever sits between two consecutive copies of `n` is
//! an arbitrary composition into parts below `n`. The empty composition is
//! not multimodal.

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use thiserror::Error;

use crate::genfun::{FamilyTag, GeneratedSeries};

pub const DEFAULT_ORACLE_LIMIT: usize = 20;
pub const ORACLE_HARD_CAP: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("the empty composition has no multimodal decomposition")]
    EmptyComposition,
    #[error("size {requested} exceeds the oracle limit {limit}")]
    OracleLimitExceeded { requested: usize, limit: usize },
    #[error("oracle limit {0} exceeds the hard cap of {ORACLE_HARD_CAP}")]
    OracleCapExceeded(usize),
    #[error("rank is only defined for strongly unimodal sequences with a single peak")]
    NotSinglePeakStrong,
    #[error("invalid parts: {0}")]
    InvalidParts(String),
}

/// A finite ordered sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self, EnumerateError> {
        if parts.contains(&0) {
            return Err(EnumerateError::InvalidParts("parts must be at least 1".into()));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest part, 0 for the empty composition.
    pub fn largest(&self) -> u32 {
        self.parts.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, self.parts.iter())
    }
}

fn write_parts<'a>(f: &mut fmt::Formatter<'_>, parts: impl Iterator<Item = &'a u32>) -> fmt::Result {
    f.write_str("(")?;
    for (i, p) in parts.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str(")")
}

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, EnumerateError> {
        if parts.contains(&0) {
            return Err(EnumerateError::InvalidParts("parts must be at least 1".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(EnumerateError::InvalidParts("partition parts must weakly decrease".into()));
        }
        Ok(Partition { parts })
    }

    /// Sorts `parts` into weakly decreasing order.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Result<Self, EnumerateError> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `m_i`, the number of parts equal to `i`.
    pub fn multiplicity(&self, i: u32) -> usize {
        self.parts.iter().filter(|&&p| p == i).count()
    }

    pub fn is_distinct(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] > w[1])
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, self.parts.iter())
    }
}

/// Streams the `2^(n-1)` compositions of `n` (one empty composition for `n = 0`).
///
/// Composition `i` puts a cut after position `p` whenever bit `p - 1` of `i`
/// is set, so the first item is `(n)` and the last is all ones.
pub fn compositions_of(n: usize) -> Compositions {
    let total = if n == 0 { 1 } else { 1u64 << (n - 1) };
    Compositions { n, next: 0, total }
}

pub struct Compositions {
    n: usize,
    next: u64,
    total: u64,
}

impl Compositions {
    fn decode(&self, mask: u64) -> Vec<u32> {
        let mut parts = Vec::with_capacity(mask.count_ones() as usize + 1);
        let mut run = 0u32;
        for pos in 1..=self.n {
            run += 1;
            if pos == self.n || mask >> (pos - 1) & 1 == 1 {
                parts.push(run);
                run = 0;
            }
        }
        parts
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        if self.next >= self.total {
            return None;
        }
        let parts = self.decode(self.next);
        self.next += 1;
        Some(Composition { parts })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

/// Streams the partitions of `n` in reverse lexicographic order, `(n)` first.
pub fn partitions_of(n: usize) -> Partitions {
    Partitions { current: None, n, done: false }
}

pub struct Partitions {
    current: Option<Vec<u32>>,
    n: usize,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let next = match self.current.take() {
            None if self.n == 0 => Vec::new(),
            None => vec![self.n as u32],
            Some(mut parts) => {
                // Strip trailing ones, lower the last part above one, refill greedily.
                let mut spill: u32 = 0;
                while parts.last() == Some(&1) {
                    parts.pop();
                    spill += 1;
                }
                match parts.pop() {
                    None => {
                        self.done = true;
                        return None;
                    }
                    Some(p) => {
                        let lowered = p - 1;
                        parts.push(lowered);
                        spill += 1;
                        while spill > 0 {
                            let take = spill.min(lowered);
                            parts.push(take);
                            spill -= take;
                        }
                        parts
                    }
                }
            }
        };
        if next.iter().all(|&p| p == 1) {
            self.done = true;
        }
        self.current = Some(next.clone());
        Some(Partition { parts: next })
    }
}

/// How strictly the sides of a multimodal sequence are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strength {
    Plain,
    /// Strictly increasing left side.
    Semistrong,
    /// Strictly increasing left side and strictly decreasing right side.
    Strong,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Plain => "plain",
            Strength::Semistrong => "semistrong",
            Strength::Strong => "strong",
        })
    }
}

/// The split of a multimodal composition around its `k`-fold peak.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultimodalDecomposition {
    pub peak: u32,
    pub k: usize,
    /// Parts before the first peak; the sequence reads them in increasing order.
    pub left: Partition,
    /// The `k - 1` compositions between consecutive peaks.
    pub middles: Vec<Composition>,
    /// Parts after the last peak, in the order they appear.
    pub right: Partition,
    pub strength: Strength,
}

impl MultimodalDecomposition {
    pub fn reassemble(&self) -> Composition {
        let mut parts: Vec<u32> = self.left.parts().iter().rev().copied().collect();
        parts.push(self.peak);
        for middle in &self.middles {
            parts.extend_from_slice(middle.parts());
            parts.push(self.peak);
        }
        parts.extend_from_slice(self.right.parts());
        Composition { parts }
    }

    pub fn size(&self) -> usize {
        self.left.size()
            + self.right.size()
            + self.middles.iter().map(Composition::size).sum::<usize>()
            + self.k * self.peak as usize
    }

    /// True when every peak is adjacent to the next one.
    pub fn is_unimodal(&self) -> bool {
        self.middles.iter().all(Composition::is_empty)
    }
}

/// Classifies `c`; `Ok(None)` means `c` is not multimodal.
pub fn classify(c: &Composition) -> Result<Option<MultimodalDecomposition>, EnumerateError> {
    let parts = c.parts();
    let Some(&peak) = parts.iter().max() else {
        return Err(EnumerateError::EmptyComposition);
    };
    let first = parts.iter().position(|&p| p == peak).unwrap();
    let last = parts.iter().rposition(|&p| p == peak).unwrap();
    let prefix = &parts[..first];
    let suffix = &parts[last + 1..];
    if prefix.windows(2).any(|w| w[0] > w[1]) || suffix.windows(2).any(|w| w[0] < w[1]) {
        return Ok(None);
    }
    let left_strict = prefix.windows(2).all(|w| w[0] < w[1]);
    let right_strict = suffix.windows(2).all(|w| w[0] > w[1]);
    let strength = match (left_strict, right_strict) {
        (true, true) => Strength::Strong,
        (true, false) => Strength::Semistrong,
        _ => Strength::Plain,
    };
    let middles: Vec<Composition> = parts[first..=last]
        .split(|&p| p == peak)
        .skip(1)
        .map(|m| Composition { parts: m.to_vec() })
        .collect();
    let k = middles.len();
    let middles = middles.into_iter().take(k - 1).collect();
    Ok(Some(MultimodalDecomposition {
        peak,
        k,
        left: Partition { parts: prefix.iter().rev().copied().collect() },
        middles,
        right: Partition { parts: suffix.to_vec() },
        strength,
    }))
}

/// Parts to the right of the peak minus parts to the left.
pub fn rank(d: &MultimodalDecomposition) -> Result<i64, EnumerateError> {
    if d.k != 1 || d.strength != Strength::Strong {
        return Err(EnumerateError::NotSinglePeakStrong);
    }
    Ok(d.right.len() as i64 - d.left.len() as i64)
}

fn check_limit(n: usize, limit: usize) -> Result<(), EnumerateError> {
    if limit > ORACLE_HARD_CAP {
        return Err(EnumerateError::OracleCapExceeded(limit));
    }
    if n > limit {
        return Err(EnumerateError::OracleLimitExceeded { requested: n, limit });
    }
    Ok(())
}

/// Exhaustive counts keyed by `(length, size)`; for `rank_U` the first key is the rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub family: FamilyTag,
    pub order: usize,
    pub counts: BTreeMap<(i64, usize), u64>,
}

impl CountTable {
    pub fn get(&self, key: i64, size: usize) -> u64 {
        self.counts.get(&(key, size)).copied().unwrap_or(0)
    }

    /// Counts summed over the first key, indexed by size `0..=order`.
    pub fn totals(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.order + 1];
        for (&(_, size), &c) in &self.counts {
            out[size] += c;
        }
        out
    }

    /// Cells where the table and `series` differ, as `(key, size, expected, actual)`
    /// with the series value as expected.
    pub fn diff_series(&self, series: &GeneratedSeries) -> Vec<(i64, usize, String, String)> {
        let mut from_series: BTreeMap<(i64, usize), String> = BTreeMap::new();
        for (z, q, c) in series.terms() {
            if q <= self.order {
                from_series.insert((z, q), c.to_string());
            }
        }
        let mut keys: Vec<(i64, usize)> = from_series.keys().copied().collect();
        keys.extend(self.counts.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .filter_map(|key| {
                let expected = from_series.get(&key).cloned().unwrap_or_else(|| "0".into());
                let actual = self.counts.get(&key).copied().unwrap_or(0).to_string();
                (expected != actual).then_some((key.0, key.1, expected, actual))
            })
            .collect()
    }

    /// CSV with columns `family,k,length,size,count`; `k` is blank for k-free families.
    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["family", "k", "length", "size", "count"])?;
        let family = self.family.to_string();
        let family = family.split(':').next().unwrap_or_default();
        let k = self.family.k().map(|k| k.to_string()).unwrap_or_default();
        for (&(len, size), &count) in &self.counts {
            out.write_record([family, &k, &len.to_string(), &size.to_string(), &count.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `n a(n)` lines, one per size.
pub fn write_bfile<W: io::Write, T: fmt::Display>(mut w: W, values: &[T]) -> io::Result<()> {
    for (n, v) in values.iter().enumerate() {
        writeln!(w, "{n} {v}")?;
    }
    Ok(())
}

/// Membership key of a composition in a family: `Some(key)` to count it under `key`.
fn family_key(tag: FamilyTag, c: &Composition) -> Option<i64> {
    let len = c.len() as i64;
    if c.is_empty() {
        return matches!(
            tag,
            FamilyTag::Partition | FamilyTag::PartitionDistinct | FamilyTag::Composition | FamilyTag::CompositionFirstMax
        )
        .then_some(0);
    }
    match tag {
        FamilyTag::Composition => return Some(len),
        FamilyTag::CompositionFirstMax => return (c.parts()[0] == c.largest()).then_some(len),
        FamilyTag::Partition => return c.parts().windows(2).all(|w| w[0] >= w[1]).then_some(len),
        FamilyTag::PartitionDistinct => return c.parts().windows(2).all(|w| w[0] > w[1]).then_some(len),
        _ => {}
    }
    let d = classify(c).expect("nonempty")?;
    let k_is = |k: u32| d.k == k as usize;
    let member = match tag {
        FamilyTag::Unimodal(k) => k_is(k) && d.is_unimodal(),
        FamilyTag::StronglyUnimodal(k) => k_is(k) && d.is_unimodal() && d.strength == Strength::Strong,
        FamilyTag::Multimodal(k) => k_is(k),
        FamilyTag::MultimodalAll => true,
        FamilyTag::StrongMultimodal(k) => k.is_none_or(k_is) && d.strength == Strength::Strong,
        FamilyTag::SemistrongMultimodal(k) => k.is_none_or(k_is) && d.strength >= Strength::Semistrong,
        FamilyTag::RankU => return rank(&d).ok(),
        _ => unreachable!("handled above"),
    };
    member.then_some(len)
}

/// Counts `tag` over every composition of size `0..=n` with the default oracle limit.
pub fn count_family(tag: FamilyTag, n: usize) -> Result<CountTable, EnumerateError> {
    count_family_with_limit(tag, n, DEFAULT_ORACLE_LIMIT)
}

pub fn count_family_with_limit(tag: FamilyTag, n: usize, limit: usize) -> Result<CountTable, EnumerateError> {
    check_limit(n, limit)?;
    let mut counts = BTreeMap::new();
    for size in 0..=n {
        for c in compositions_of(size) {
            if let Some(key) = family_key(tag, &c) {
                *counts.entry((key, size)).or_insert(0) += 1;
            }
        }
    }
    Ok(CountTable { family: tag, order: n, counts })
}

/// `m*(n)`: semi-strongly multimodal sequences of size `n`.
pub fn count_theorem4_left(n: usize) -> Result<u64, EnumerateError> {
    count_theorem4_left_with_limit(n, DEFAULT_ORACLE_LIMIT)
}

pub fn count_theorem4_left_with_limit(n: usize, limit: usize) -> Result<u64, EnumerateError> {
    check_limit(n, limit)?;
    if n == 0 {
        return Ok(0);
    }
    Ok(compositions_of(n)
        .filter(|c| matches!(classify(c), Ok(Some(d)) if d.strength >= Strength::Semistrong))
        .count() as u64)
}

/// Where the right side switches from unrestricted parts to parts used at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HalfBound {
    /// Parts above `(n-1)/2` (rounded down) are used at most once.
    #[default]
    FloorHalfBelowPeak,
    /// Parts above `n/2` (rounded down) are used at most once.
    FloorHalfPeak,
}

impl HalfBound {
    pub fn threshold(self, peak: u32) -> u32 {
        match self {
            HalfBound::FloorHalfBelowPeak => (peak - 1) / 2,
            HalfBound::FloorHalfPeak => peak / 2,
        }
    }
}

/// `m#(n)`: multimodal sequences of size `n` whose left side has only odd
/// parts and whose right side repeats no part above the threshold of `bound`.
pub fn count_theorem4_right(n: usize, bound: HalfBound) -> Result<u64, EnumerateError> {
    count_theorem4_right_with_limit(n, bound, DEFAULT_ORACLE_LIMIT)
}

pub fn count_theorem4_right_with_limit(n: usize, bound: HalfBound, limit: usize) -> Result<u64, EnumerateError> {
    check_limit(n, limit)?;
    if n == 0 {
        return Ok(0);
    }
    let admissible = |d: &MultimodalDecomposition| {
        let cut = bound.threshold(d.peak);
        d.left.parts().iter().all(|p| p % 2 == 1)
            && d.right.parts().windows(2).all(|w| w[0] <= cut || w[0] != w[1])
    };
    Ok(compositions_of(n)
        .filter(|c| matches!(classify(c), Ok(Some(d)) if admissible(&d)))
        .count() as u64)
}
