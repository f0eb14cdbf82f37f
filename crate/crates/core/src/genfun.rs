//! Generating functions as exact truncated series.
//!
//! All constructors work in the formal setting: every denominator has
//! constant term one, so no analytic condition on `z` or `q` (convergence
//! radius, avoidance of the poles coming from `{zq;q}_n = 0`) plays any role
//! here. Those conditions only matter once the series are evaluated
//! numerically, see [`crate::rootsofunity`].
//!
//! In the peak-indexed families the `n`-th summand carries a factor
//! `z^k q^{kn}`, so at order `N` only `n <= N / k` and `k <= N` contribute.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::series::{BivariateSeries, LaurentSeries};
use crate::symbols::{
    divide_by_poch_product, divide_by_poch_sum, multiply_by_poch_product, poch_sum, PochLength,
    Sign,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    Unknown(String),
    #[error("family `{0}` needs a peak multiplicity, e.g. `{0}:k=2`")]
    MissingK(String),
    #[error("family `{0}` does not take a peak multiplicity")]
    UnexpectedK(String),
    #[error("bad peak multiplicity in `{0}`")]
    BadK(String),
}

/// The sequence families the crate can expand and count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    /// All partitions.
    Partition,
    /// Partitions into distinct parts.
    PartitionDistinct,
    /// All compositions.
    Composition,
    /// Compositions whose first part is a largest part.
    CompositionFirstMax,
    /// Unimodal sequences with a `k`-fold peak.
    Unimodal(u32),
    /// Unimodal sequences with a `k`-fold peak and strict sides.
    StronglyUnimodal(u32),
    /// Multimodal sequences with a `k`-fold peak.
    Multimodal(u32),
    MultimodalAll,
    /// Strongly multimodal sequences; `Some(k)` restricts to a `k`-fold peak.
    StrongMultimodal(Option<u32>),
    /// Semi-strongly multimodal sequences; `Some(k)` restricts to a `k`-fold peak.
    SemistrongMultimodal(Option<u32>),
    /// Strongly unimodal single-peak sequences weighted by rank.
    RankU,
}

impl FamilyTag {
    pub fn k(&self) -> Option<u32> {
        match *self {
            FamilyTag::Unimodal(k) | FamilyTag::StronglyUnimodal(k) | FamilyTag::Multimodal(k) => {
                Some(k)
            }
            FamilyTag::StrongMultimodal(k) | FamilyTag::SemistrongMultimodal(k) => k,
            _ => None,
        }
    }

    fn base_name(&self) -> &'static str {
        match self {
            FamilyTag::Partition => "partition",
            FamilyTag::PartitionDistinct => "partition_distinct",
            FamilyTag::Composition => "composition",
            FamilyTag::CompositionFirstMax => "composition_firstmax",
            FamilyTag::Unimodal(_) => "unimodal",
            FamilyTag::StronglyUnimodal(_) => "strongly_unimodal",
            FamilyTag::Multimodal(_) => "multimodal",
            FamilyTag::MultimodalAll => "multimodal_all",
            FamilyTag::StrongMultimodal(_) => "strong_multimodal",
            FamilyTag::SemistrongMultimodal(_) => "semistrong_multimodal",
            FamilyTag::RankU => "rank_U",
        }
    }

    /// Expands the generating function to `order`.
    pub fn series(&self, order: usize) -> GeneratedSeries {
        use FamilyTag::*;
        match *self {
            Partition => partition_gf(order).into(),
            PartitionDistinct => partition_distinct_gf(order).into(),
            Composition => composition_gf(order).into(),
            CompositionFirstMax => composition_firstmax_gf(order).into(),
            Unimodal(k) => unimodal_gf(k, order).into(),
            StronglyUnimodal(k) => strongly_unimodal_gf(k, order).into(),
            Multimodal(k) => multimodal_gf(k, order).into(),
            MultimodalAll => multimodal_all_gf(order).into(),
            StrongMultimodal(None) => strong_multimodal_gf(order).into(),
            StrongMultimodal(Some(k)) => strong_multimodal_k_gf(k, order).into(),
            SemistrongMultimodal(None) => semistrong_multimodal_gf(order).into(),
            SemistrongMultimodal(Some(k)) => semistrong_multimodal_k_gf(k, order).into(),
            RankU => rank_u_gf(order).into(),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{}:k={k}", self.base_name()),
            None => write!(f, "{}", self.base_name()),
        }
    }
}

impl FromStr for FamilyTag {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, k) = match s.split_once(':') {
            Some((name, rest)) => {
                let k = rest
                    .strip_prefix("k=")
                    .and_then(|v| v.parse::<u32>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| FamilyError::BadK(s.to_string()))?;
                (name, Some(k))
            }
            None => (s, None),
        };
        let need_k = |ctor: fn(u32) -> FamilyTag| {
            k.map(ctor).ok_or_else(|| FamilyError::MissingK(name.to_string()))
        };
        let no_k = |tag: FamilyTag| match k {
            None => Ok(tag),
            Some(_) => Err(FamilyError::UnexpectedK(name.to_string())),
        };
        match name {
            "partition" => no_k(FamilyTag::Partition),
            "partition_distinct" => no_k(FamilyTag::PartitionDistinct),
            "composition" => no_k(FamilyTag::Composition),
            "composition_firstmax" => no_k(FamilyTag::CompositionFirstMax),
            "unimodal" => need_k(FamilyTag::Unimodal),
            "strongly_unimodal" => need_k(FamilyTag::StronglyUnimodal),
            "multimodal" => need_k(FamilyTag::Multimodal),
            "multimodal_all" => no_k(FamilyTag::MultimodalAll),
            "strong_multimodal" => Ok(FamilyTag::StrongMultimodal(k)),
            "semistrong_multimodal" => Ok(FamilyTag::SemistrongMultimodal(k)),
            "rank_U" => no_k(FamilyTag::RankU),
            _ => Err(FamilyError::Unknown(s.to_string())),
        }
    }
}

/// Either kind of series a family expands to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratedSeries {
    Bivariate(BivariateSeries),
    Laurent(LaurentSeries),
}

impl GeneratedSeries {
    pub fn to_json(&self) -> String {
        match self {
            GeneratedSeries::Bivariate(s) => s.to_json(),
            GeneratedSeries::Laurent(s) => s.to_json(),
        }
    }

    /// `(z_exp, q_exp, coeff)` for every nonzero coefficient.
    pub fn terms(&self) -> Vec<(i64, usize, BigInt)> {
        match self {
            GeneratedSeries::Bivariate(s) => {
                s.terms().map(|(z, q, c)| (z as i64, q, c.clone())).collect()
            }
            GeneratedSeries::Laurent(s) => s.terms().map(|(z, q, c)| (z, q, c.clone())).collect(),
        }
    }

    /// Coefficients at `z = 1`, indexed by size.
    pub fn z_summed(&self) -> Vec<BigInt> {
        match self {
            GeneratedSeries::Bivariate(s) => s.set_z_one().coeffs().to_vec(),
            GeneratedSeries::Laurent(s) => s.set_z_one().coeffs().to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            GeneratedSeries::Bivariate(s) => s.order(),
            GeneratedSeries::Laurent(s) => s.order(),
        }
    }
}

impl From<BivariateSeries> for GeneratedSeries {
    fn from(s: BivariateSeries) -> Self {
        GeneratedSeries::Bivariate(s)
    }
}

impl From<LaurentSeries> for GeneratedSeries {
    fn from(s: LaurentSeries) -> Self {
        GeneratedSeries::Laurent(s)
    }
}

/// `1 / (zq;q)_inf`.
pub fn partition_gf(order: usize) -> BivariateSeries {
    let mut s = BivariateSeries::one(order);
    divide_by_poch_product(&mut s, PochLength::Infinite, Sign::Plus);
    s
}

/// `(-zq;q)_inf`.
pub fn partition_distinct_gf(order: usize) -> BivariateSeries {
    let mut s = BivariateSeries::one(order);
    multiply_by_poch_product(&mut s, PochLength::Infinite, Sign::Minus);
    s
}

/// `z q^n / (zq;q)_n`: partitions whose largest part is exactly `n`.
pub fn partition_largest_exact_gf(n: usize, order: usize) -> BivariateSeries {
    assert!(n >= 1, "largest part must be positive");
    if n > order {
        return BivariateSeries::zero(order);
    }
    let mut s = BivariateSeries::one(order - n);
    divide_by_poch_product(&mut s, n, Sign::Plus);
    s.shift(1, n, order).expect("triangular shift")
}

/// `1 + sum_{n>=1} z q^n / (zq;q)_n`, the partition generating function
/// assembled by largest part.
pub fn partition_by_largest_part_gf(order: usize) -> BivariateSeries {
    (1..=order).fold(BivariateSeries::one(order), |acc, n| {
        acc + partition_largest_exact_gf(n, order)
    })
}

/// `1 / {zq;q}_inf`.
pub fn composition_gf(order: usize) -> BivariateSeries {
    composition_bounded_gf(PochLength::Infinite, order)
}

/// `1 / {zq;q}_n`: compositions with every part at most `n`.
pub fn composition_bounded_gf(n: impl Into<PochLength>, order: usize) -> BivariateSeries {
    let mut s = BivariateSeries::one(order);
    divide_by_poch_sum(&mut s, n);
    s
}

/// `1 + sum_{n>=1} z q^n / {zq;q}_n`: compositions whose first part is a largest part.
pub fn composition_firstmax_gf(order: usize) -> BivariateSeries {
    let mut acc = BivariateSeries::one(order);
    for n in 1..=order {
        let mut s = BivariateSeries::one(order - n);
        divide_by_poch_sum(&mut s, n);
        acc = acc + s.shift(1, n, order).expect("triangular shift");
    }
    acc
}

/// What sits to one side of the peaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Any partition into parts below the peak: `1/(zq;q)_{n-1}`.
    Partition,
    /// A partition into distinct parts below the peak: `(-zq;q)_{n-1}`.
    Distinct,
}

/// Shape of a peak-indexed family: left side, right side, and whether
/// compositions may sit between consecutive peaks.
#[derive(Debug, Clone, Copy)]
struct PeakShape {
    left: Side,
    right: Side,
    middles: bool,
}

const UNIMODAL: PeakShape = PeakShape { left: Side::Partition, right: Side::Partition, middles: false };
const STRONGLY_UNIMODAL: PeakShape = PeakShape { left: Side::Distinct, right: Side::Distinct, middles: false };
const MULTIMODAL: PeakShape = PeakShape { left: Side::Partition, right: Side::Partition, middles: true };
const STRONG: PeakShape = PeakShape { left: Side::Distinct, right: Side::Distinct, middles: true };
const SEMISTRONG: PeakShape = PeakShape { left: Side::Distinct, right: Side::Partition, middles: true };

impl PeakShape {
    /// Left and right side factors for peak value `n`, truncated at `order`.
    fn sides(&self, n: usize, order: usize) -> BivariateSeries {
        let mut s = BivariateSeries::one(order);
        for side in [self.left, self.right] {
            match side {
                Side::Partition => divide_by_poch_product(&mut s, n - 1, Sign::Plus),
                Side::Distinct => multiply_by_poch_product(&mut s, n - 1, Sign::Minus),
            }
        }
        s
    }

    /// `sum_n z^k q^{kn} sides(n) / {zq;q}_{n-1}^{k-1}`.
    fn fixed_k(&self, k: u32, order: usize) -> BivariateSeries {
        assert!(k >= 1, "peak multiplicity must be positive");
        let k = k as usize;
        let mut acc = BivariateSeries::zero(order);
        for n in 1..=order / k {
            let room = order - k * n;
            let mut s = self.sides(n, room);
            if self.middles {
                for _ in 1..k {
                    divide_by_poch_sum(&mut s, n - 1);
                }
            }
            acc = acc + s.shift(k, k * n, order).expect("triangular shift");
        }
        acc
    }

    /// The same summand summed over every `k >= 1`.
    fn all_k(&self, order: usize) -> BivariateSeries {
        let mut acc = BivariateSeries::zero(order);
        for n in 1..=order {
            let mut running = self.sides(n, order - n);
            for k in 1..=order / n {
                let room = order - k * n;
                running = running.truncate(room);
                if k > 1 && self.middles {
                    divide_by_poch_sum(&mut running, n - 1);
                }
                acc = acc + running.shift(k, k * n, order).expect("triangular shift");
            }
        }
        acc
    }
}

/// Unimodal sequences with `k`-fold peak: `sum_n z^k q^{kn} / (zq;q)_{n-1}^2`.
pub fn unimodal_gf(k: u32, order: usize) -> BivariateSeries {
    UNIMODAL.fixed_k(k, order)
}

/// Strongly unimodal sequences with `k`-fold peak: `sum_n z^k q^{kn} (-zq;q)_{n-1}^2`.
pub fn strongly_unimodal_gf(k: u32, order: usize) -> BivariateSeries {
    STRONGLY_UNIMODAL.fixed_k(k, order)
}

/// `M_k(z;q) = sum_n z^k q^{kn} / ({zq;q}_{n-1}^{k-1} (zq;q)_{n-1}^2)`.
pub fn multimodal_gf(k: u32, order: usize) -> BivariateSeries {
    MULTIMODAL.fixed_k(k, order)
}

/// `M(z;q)`, the sum of [`multimodal_gf`] over every `k`.
pub fn multimodal_all_gf(order: usize) -> BivariateSeries {
    MULTIMODAL.all_k(order)
}

/// `M_k**(z;q) = sum_n z^k q^{kn} (-zq;q)_{n-1}^2 / {zq;q}_{n-1}^{k-1}`.
pub fn strong_multimodal_k_gf(k: u32, order: usize) -> BivariateSeries {
    STRONG.fixed_k(k, order)
}

/// `M_k*(z;q) = sum_n z^k q^{kn} (-zq;q)_{n-1} / ({zq;q}_{n-1}^{k-1} (zq;q)_{n-1})`.
pub fn semistrong_multimodal_k_gf(k: u32, order: usize) -> BivariateSeries {
    SEMISTRONG.fixed_k(k, order)
}

/// `M**(z;q)`, strongly multimodal sequences with any number of peaks.
pub fn strong_multimodal_gf(order: usize) -> BivariateSeries {
    STRONG.all_k(order)
}

/// `M*(z;q)`, semi-strongly multimodal sequences with any number of peaks.
pub fn semistrong_multimodal_gf(order: usize) -> BivariateSeries {
    SEMISTRONG.all_k(order)
}

/// Rank generating function of strongly unimodal single-peak sequences,
/// `U(z;q) = sum_{n>=1} q^n (-q/z;q)_{n-1} (-zq;q)_{n-1}`; `z` marks the rank.
pub fn rank_u_gf(order: usize) -> LaurentSeries {
    let mut acc = LaurentSeries::zero(order);
    for n in 1..=order {
        let mut s = LaurentSeries::one(order - n);
        for i in 1..n {
            s.mul_binomial(1, -1, i);
            s.mul_binomial(1, 1, i);
        }
        acc = acc.add(&s.shift(0, n, order).expect("rank exponents stay in range"));
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Telescoping {
    /// `prod_{i=1}^n (1 - z q^i / {zq;q}_{i-1})`, expected to equal `{zq;q}_n`.
    Forward,
    /// `prod_{i=1}^n (1 + z q^i / {zq;q}_i)`, expected to equal `1/{zq;q}_n`.
    Inverse,
}

/// The telescoping products, built with general series multiplication and
/// inversion so that they are independent of [`poch_sum`].
pub fn telescoping_rhs(n: impl Into<PochLength>, variant: Telescoping, order: usize) -> BivariateSeries {
    let n = n.into().effective(order);
    let mut acc = BivariateSeries::one(order);
    for i in 1..=n {
        let (symbol_len, sign) = match variant {
            Telescoping::Forward => (i - 1, -1),
            Telescoping::Inverse => (i, 1),
        };
        let inv = poch_sum(symbol_len, order).invert().expect("unit constant term");
        let term = inv.shift(1, i, order).expect("triangular shift").scale(&BigInt::from(sign));
        acc = acc.mul(&(BivariateSeries::one(order) + term));
    }
    acc
}

/// The three partition-indexed expansions of `{zq;q}_inf^{±1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorollarySum {
    /// `sum_{distinct λ} (-z)^{ℓ(λ)} q^{|λ|} / prod_{i∈λ} {zq;q}_{i-1}` = `{zq;q}_inf`.
    DistinctShiftedDown,
    /// `sum_{distinct λ} z^{ℓ(λ)} q^{|λ|} / prod_{i∈λ} {zq;q}_i` = `1/{zq;q}_inf`.
    DistinctSameIndex,
    /// `sum_{λ} z^{ℓ(λ)} q^{|λ|} / prod_{i∈λ} {zq;q}_{i-1}` = `1/{zq;q}_inf`.
    AllShiftedDown,
}

impl CorollarySum {
    pub fn from_index(which: u8) -> Option<Self> {
        match which {
            1 => Some(CorollarySum::DistinctShiftedDown),
            2 => Some(CorollarySum::DistinctSameIndex),
            3 => Some(CorollarySum::AllShiftedDown),
            _ => None,
        }
    }
}

/// Sums the chosen expansion over every partition of size at most `order`.
///
/// Partitions are visited depth-first with parts in weakly decreasing order,
/// largest first part first; each partial product is truncated to the room
/// left below `order`.
pub fn corollary_partition_sums(which: CorollarySum, order: usize) -> BivariateSeries {
    let (distinct, sign, shift) = match which {
        CorollarySum::DistinctShiftedDown => (true, -1i64, 1usize),
        CorollarySum::DistinctSameIndex => (true, 1, 0),
        CorollarySum::AllShiftedDown => (false, 1, 1),
    };
    // inverses[i] = 1 / {zq;q}_{i - shift}
    let inverses: Vec<BivariateSeries> = (0..=order)
        .map(|i| {
            let mut s = BivariateSeries::one(order);
            if i >= shift {
                divide_by_poch_sum(&mut s, i - shift);
            }
            s
        })
        .collect();

    struct Walk<'a> {
        order: usize,
        distinct: bool,
        sign: BigInt,
        inverses: &'a [BivariateSeries],
        acc: BivariateSeries,
    }

    impl Walk<'_> {
        // `weight` already includes every chosen part; `size`, `len` describe them.
        fn visit(&mut self, max_part: usize, size: usize, len: usize, weight: &BivariateSeries) {
            let term = weight.shift(len, size, self.order).expect("triangular shift");
            self.acc = &self.acc + &term;
            let room = self.order - size;
            let top = max_part.min(room);
            for part in (1..=top).rev() {
                let next = weight.truncate(room - part).mul(&self.inverses[part]).scale(&self.sign);
                let cap = if self.distinct { part - 1 } else { part };
                self.visit(cap, size + part, len + 1, &next);
            }
        }
    }

    let mut walk = Walk {
        order,
        distinct,
        sign: BigInt::from(sign),
        inverses: &inverses,
        acc: BivariateSeries::zero(order),
    };
    walk.visit(order, 0, 0, &BivariateSeries::one(order));
    debug_assert!(walk.distinct || !walk.sign.is_one() || walk.acc.order() == order);
    walk.acc
}
