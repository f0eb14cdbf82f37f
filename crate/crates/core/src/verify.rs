//! Named, runnable checks for every identity the crate implements.
//!
//! Exact checks compare integer coefficient tables; numeric checks compare
//! complex doubles against a tolerance and are marked `exact: false`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{
    compositions_of, count_family_with_limit, count_theorem4_left_with_limit,
    count_theorem4_right_with_limit, HalfBound, DEFAULT_ORACLE_LIMIT,
};
use crate::genfun::{
    composition_bounded_gf, composition_firstmax_gf, corollary_partition_sums, partition_by_largest_part_gf,
    partition_gf, telescoping_rhs, CorollarySum, FamilyTag, Telescoping,
};
use crate::rootsofunity::{
    f_product, f_sum_closed, fg_closed, fg_direct, fg_infinite, finite_eval_semistrong, finite_eval_strong,
    mk_at_root_corollary, primitive_residues, radial_limit, tail_factor_max, u_at_root, MultimodalKind,
    MultimodalSeries, PeriodicTable, RankSeries, RootError, RootTarget,
};
use crate::series::BivariateSeries;
use crate::symbols::{divide_by_poch_product, poch_sum, PochLength, Sign};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
const MAX_LISTED: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("series orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub location: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub status: Status,
    pub exact: bool,
    pub scope: String,
    pub discrepancies: Vec<Discrepancy>,
    /// Cases that were excluded or skipped, with the reason.
    pub notes: Vec<String>,
    #[serde(skip)]
    pub runtime_ms: u64,
}

impl VerificationReport {
    fn new(check_id: &str, exact: bool, scope: impl Into<String>) -> Self {
        VerificationReport {
            check_id: check_id.to_string(),
            status: Status::Pass,
            exact,
            scope: scope.into(),
            discrepancies: Vec::new(),
            notes: Vec::new(),
            runtime_ms: 0,
        }
    }

    fn push(&mut self, location: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>) {
        self.status = Status::Fail;
        self.discrepancies.push(Discrepancy {
            location: location.into(),
            expected: expected.into(),
            actual: actual.into(),
        });
    }

    fn extend(&mut self, prefix: &str, found: Vec<Discrepancy>) {
        for d in found {
            self.push(format!("{prefix} {}", d.location), d.expected, d.actual);
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Caps the discrepancy list so a badly broken check stays readable.
    fn finish(mut self, started: Instant) -> Self {
        if self.discrepancies.len() > MAX_LISTED {
            let extra = self.discrepancies.len() - MAX_LISTED;
            self.discrepancies.truncate(MAX_LISTED);
            self.note(format!("{extra} further discrepancies not listed"));
        }
        self.runtime_ms = started.elapsed().as_millis() as u64;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// JSON; `runtime_ms` is included only when `timing` is set so that
    /// repeated runs give identical bytes.
    pub fn to_json_value(&self, timing: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data serializes");
        if timing {
            v["runtime_ms"] = self.runtime_ms.into();
        }
        v
    }
}

pub fn reports_to_json(reports: &[VerificationReport], timing: bool) -> String {
    let values: Vec<_> = reports.iter().map(|r| r.to_json_value(timing)).collect();
    serde_json::to_string_pretty(&values).expect("plain data serializes")
}

pub fn reports_to_table(reports: &[VerificationReport], timing: bool) -> String {
    let mut out = String::new();
    let width = reports.iter().map(|r| r.check_id.len()).max().unwrap_or(8).max(8);
    out.push_str(&format!("{:<width$}  {:<7}  {:<5}  {:>5}  scope\n", "check", "status", "exact", "diffs"));
    for r in reports {
        out.push_str(&format!(
            "{:<width$}  {:<7}  {:<5}  {:>5}  {}",
            r.check_id,
            r.status.to_string(),
            r.exact,
            r.discrepancies.len(),
            r.scope
        ));
        if timing {
            out.push_str(&format!(" [{} ms]", r.runtime_ms));
        }
        out.push('\n');
        for d in &r.discrepancies {
            out.push_str(&format!("    {}: expected {}, got {}\n", d.location, d.expected, d.actual));
        }
        for n in &r.notes {
            out.push_str(&format!("    note: {n}\n"));
        }
    }
    out
}

fn series_diffs(lhs: &BivariateSeries, rhs: &BivariateSeries) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for q in 0..=lhs.order().min(rhs.order()) {
        for z in 0..=q {
            let (a, b) = (lhs.get(z, q), rhs.get(z, q));
            if a != b {
                out.push(Discrepancy { location: format!("z^{z} q^{q}"), expected: a.to_string(), actual: b.to_string() });
            }
        }
    }
    out
}

/// Exact comparison of two series over the whole triangle.
pub fn check_series_identity(lhs: &BivariateSeries, rhs: &BivariateSeries) -> Result<VerificationReport, VerifyError> {
    if lhs.order() != rhs.order() {
        return Err(VerifyError::OrderMismatch(lhs.order(), rhs.order()));
    }
    let started = Instant::now();
    let mut report = VerificationReport::new("series_identity", true, format!("order {}", lhs.order()));
    report.extend("at", series_diffs(lhs, rhs));
    Ok(report.finish(started))
}

/// Compares a family's generating function against the exhaustive count, cell by cell.
pub fn check_family_against_oracle(tag: FamilyTag, n: usize, oracle_limit: usize) -> VerificationReport {
    let started = Instant::now();
    let mut report = VerificationReport::new("family_oracle", true, format!("{tag}, sizes <= {n}"));
    match count_family_with_limit(tag, n, oracle_limit) {
        Ok(table) => {
            for (key, size, expected, actual) in table.diff_series(&tag.series(n)) {
                report.push(format!("{tag} ({key}, {size})"), expected, actual);
            }
        }
        Err(e) => report.push(tag.to_string(), "oracle count", e.to_string()),
    }
    report.finish(started)
}

/// The registered checks, one per identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    Cor6,
    CorThm3,
    Formula2,
    Prop1,
    Prop2,
    Sec4EvenM,
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    Unigen2,
}

impl CheckId {
    /// Every check, sorted by name.
    pub const ALL: [CheckId; 12] = [
        CheckId::Cor6,
        CheckId::CorThm3,
        CheckId::Formula2,
        CheckId::Prop1,
        CheckId::Prop2,
        CheckId::Sec4EvenM,
        CheckId::Thm1,
        CheckId::Thm2,
        CheckId::Thm3,
        CheckId::Thm4,
        CheckId::Thm5,
        CheckId::Unigen2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Cor6 => "cor6",
            CheckId::CorThm3 => "cor_thm3",
            CheckId::Formula2 => "formula2",
            CheckId::Prop1 => "prop1",
            CheckId::Prop2 => "prop2",
            CheckId::Sec4EvenM => "sec4_even_m",
            CheckId::Thm1 => "thm1",
            CheckId::Thm2 => "thm2",
            CheckId::Thm3 => "thm3",
            CheckId::Thm4 => "thm4",
            CheckId::Thm5 => "thm5",
            CheckId::Unigen2 => "unigen2",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, CheckId::Cor6 | CheckId::Sec4EvenM | CheckId::Thm5 | CheckId::Unigen2)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| VerifyError::UnknownCheck(s.to_string()))
    }
}

/// Sizes, orders and seeds for the suite; `None` picks each check's default.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    /// Series order for the exact series identities.
    pub order: Option<usize>,
    /// Largest size for the oracle counts.
    pub nmax: Option<usize>,
    pub oracle_limit: usize,
    pub seed: u64,
    /// Number of random tables in `thm5`.
    pub tables: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { order: None, nmax: None, oracle_limit: DEFAULT_ORACLE_LIMIT, seed: DEFAULT_SEED, tables: 100 }
    }
}

pub fn run_theorem_suite(id: CheckId, params: &SuiteParams) -> VerificationReport {
    let started = Instant::now();
    let mut report = match id {
        CheckId::Prop1 => prop1(params),
        CheckId::Prop2 => prop2(params),
        CheckId::Formula2 => formula2(params),
        CheckId::Thm1 => thm1(params),
        CheckId::Thm2 => thm2(params),
        CheckId::Thm3 => thm3(params),
        CheckId::CorThm3 => cor_thm3(params),
        CheckId::Thm4 => thm4(params),
        CheckId::Sec4EvenM => sec4_even_m(),
        CheckId::Thm5 => thm5(params),
        CheckId::Cor6 => cor6(),
        CheckId::Unigen2 => unigen2(),
    };
    report.check_id = id.name().to_string();
    report.exact = id.is_exact();
    report.finish(started)
}

/// Runs every registered check, sorted by check id.
pub fn run_all(params: &SuiteParams) -> Vec<VerificationReport> {
    CheckId::ALL.iter().map(|&id| run_theorem_suite(id, params)).collect()
}

fn big(v: usize) -> BigInt {
    BigInt::from(v)
}

/// Compositions into parts at most `bound`, counted by length and size with
/// the recurrence on the last part.
fn bounded_compositions_dp(bound: usize, order: usize) -> Vec<Vec<BigInt>> {
    let mut c = vec![vec![BigInt::from(0); order + 1]; order + 1];
    c[0][0] = BigInt::from(1);
    for size in 1..=order {
        for len in 1..=size {
            let mut acc = BigInt::from(0);
            for part in 1..=bound.min(size) {
                acc += &c[size - part][len - 1];
            }
            c[size][len] = acc;
        }
    }
    c
}

fn table_to_series(table: &[Vec<BigInt>], order: usize) -> BivariateSeries {
    let terms = (0..=order).flat_map(|q| (0..=q).map(move |z| (z, q, table[q][z].clone())));
    BivariateSeries::from_terms(order, terms).expect("triangular table")
}

/// Series of all compositions of size `<= order` and largest part `<= bound`
/// read off by enumeration.
fn enumerated_compositions(bound: usize, order: usize) -> BivariateSeries {
    let terms = (0..=order).flat_map(|q| {
        compositions_of(q)
            .filter(move |c| c.largest() as usize <= bound)
            .map(move |c| (c.len(), q, big(1)))
    });
    BivariateSeries::from_terms(order, terms).expect("lengths never exceed sizes")
}

fn lengths() -> impl Iterator<Item = PochLength> {
    (1..=6).map(PochLength::Finite).chain(std::iter::once(PochLength::Infinite))
}

fn length_label(n: PochLength) -> String {
    match n {
        PochLength::Finite(n) => n.to_string(),
        PochLength::Infinite => "inf".into(),
    }
}

fn prop1(params: &SuiteParams) -> VerificationReport {
    let order = params.order.unwrap_or(25);
    let small = order.min(12);
    let mut report = VerificationReport::new(
        "prop1",
        true,
        format!("1/{{zq;q}}_n for n in 1..6 and inf: recurrence to order {order}, enumeration to order {small}"),
    );
    for n in lengths() {
        let gf = composition_bounded_gf(n, order);
        let bound = n.effective(order);
        let label = length_label(n);
        report.extend(&format!("n={label} recurrence"), series_diffs(&table_to_series(&bounded_compositions_dp(bound, order), order), &gf));
        report.extend(&format!("n={label} enumeration"), series_diffs(&enumerated_compositions(bound, small), &gf.truncate(small)));
        // The same series through general inversion of 1 - z sum_{s<=n} q^s.
        let generic = poch_sum(n, order).invert().expect("unit constant term");
        report.extend(&format!("n={label} inversion"), series_diffs(&generic, &gf));
    }
    report
}

fn prop2(params: &SuiteParams) -> VerificationReport {
    let order = params.order.unwrap_or(25);
    let mut report = VerificationReport::new(
        "prop2",
        true,
        format!("1 + sum z q^n/{{zq;q}}_n against first-part counts to order {order}"),
    );
    // A first part n that is a largest part, followed by a composition into parts <= n.
    let mut table = vec![vec![BigInt::from(0); order + 1]; order + 1];
    table[0][0] = BigInt::from(1);
    for first in 1..=order {
        let rest = bounded_compositions_dp(first, order - first);
        for size in first..=order {
            for len in 1..=size - first + 1 {
                table[size][len] += &rest[size - first][len - 1];
            }
        }
    }
    report.extend("at", series_diffs(&table_to_series(&table, order), &composition_firstmax_gf(order)));
    report
}

fn formula2(params: &SuiteParams) -> VerificationReport {
    let order = params.order.unwrap_or(30);
    let mut report = VerificationReport::new(
        "formula2",
        true,
        format!("1 + sum z q^n/(zq;q)_n = 1/(zq;q)_inf, and 1/(zq;q)_n for n <= 6, to order {order}"),
    );
    let product = partition_gf(order);
    report.extend("by largest part", series_diffs(&product, &partition_by_largest_part_gf(order)));
    for n in lengths() {
        let bound = n.effective(order);
        // Partitions into parts <= bound: add one allowed part size at a time.
        let mut table = vec![vec![BigInt::from(0); order + 1]; order + 1];
        table[0][0] = BigInt::from(1);
        for part in 1..=bound {
            for size in part..=order {
                for len in 1..=size {
                    let prev = table[size - part][len - 1].clone();
                    table[size][len] += prev;
                }
            }
        }
        let mut gf = BivariateSeries::one(order);
        divide_by_poch_product(&mut gf, n, Sign::Plus);
        report.extend(&format!("parts <= {}", length_label(n)), series_diffs(&table_to_series(&table, order), &gf));
    }
    report
}

fn oracle_families(report: &mut VerificationReport, tags: &[FamilyTag], n: usize, limit: usize) {
    for &tag in tags {
        let sub = check_family_against_oracle(tag, n, limit);
        for d in sub.discrepancies {
            report.push(d.location, d.expected, d.actual);
        }
    }
}

fn thm1(params: &SuiteParams) -> VerificationReport {
    let n = params.nmax.unwrap_or(14);
    let mut report = VerificationReport::new("thm1", true, format!("M_k for k <= 4 and M against the classifier, sizes <= {n}"));
    let mut tags: Vec<FamilyTag> = (1..=4).map(FamilyTag::Multimodal).collect();
    tags.push(FamilyTag::MultimodalAll);
    oracle_families(&mut report, &tags, n, params.oracle_limit);
    report
}

fn thm2(params: &SuiteParams) -> VerificationReport {
    let n = params.nmax.unwrap_or(14);
    let mut report = VerificationReport::new(
        "thm2",
        true,
        format!("M**, M* and their k <= 4 parts against the classifier, sizes <= {n}"),
    );
    let mut tags = vec![FamilyTag::StrongMultimodal(None), FamilyTag::SemistrongMultimodal(None)];
    for k in 1..=4 {
        tags.push(FamilyTag::StrongMultimodal(Some(k)));
        tags.push(FamilyTag::SemistrongMultimodal(Some(k)));
    }
    oracle_families(&mut report, &tags, n, params.oracle_limit);
    report
}

fn thm3(params: &SuiteParams) -> VerificationReport {
    let order = params.order.unwrap_or(30);
    let mut report = VerificationReport::new(
        "thm3",
        true,
        format!("telescoping products for n in 1..10 and inf, order {order}"),
    );
    let ns = (1..=10).map(PochLength::Finite).chain(std::iter::once(PochLength::Infinite));
    for n in ns {
        let symbol = poch_sum(n, order);
        let label = length_label(n);
        report.extend(&format!("forward n={label}"), series_diffs(&symbol, &telescoping_rhs(n, Telescoping::Forward, order)));
        let inverse = symbol.invert().expect("unit constant term");
        report.extend(&format!("inverse n={label}"), series_diffs(&inverse, &telescoping_rhs(n, Telescoping::Inverse, order)));
    }
    report
}

fn cor_thm3(params: &SuiteParams) -> VerificationReport {
    let order = params.order.unwrap_or(25);
    let mut report = VerificationReport::new(
        "cor_thm3",
        true,
        format!("three partition-indexed sums for {{zq;q}}_inf^(+-1), order {order}"),
    );
    let symbol = poch_sum(PochLength::Infinite, order);
    let inverse = symbol.invert().expect("unit constant term");
    for (which, target) in [
        (CorollarySum::DistinctShiftedDown, &symbol),
        (CorollarySum::DistinctSameIndex, &inverse),
        (CorollarySum::AllShiftedDown, &inverse),
    ] {
        report.extend(&format!("{which:?}"), series_diffs(target, &corollary_partition_sums(which, order)));
    }
    report
}

fn thm4(params: &SuiteParams) -> VerificationReport {
    let nmax = params.nmax.unwrap_or(20);
    let mut report = VerificationReport::new(
        "thm4",
        true,
        format!("m*(N) = m#(N) for 1 <= N <= {nmax}, right-side threshold floor((n-1)/2)"),
    );
    for n in 1..=nmax {
        let left = count_theorem4_left_with_limit(n, params.oracle_limit);
        let right = count_theorem4_right_with_limit(n, HalfBound::FloorHalfBelowPeak, params.oracle_limit);
        match (left, right) {
            (Ok(l), Ok(r)) if l == r => {}
            (Ok(l), Ok(r)) => report.push(format!("N={n}"), l.to_string(), r.to_string()),
            (Err(e), _) | (_, Err(e)) => report.push(format!("N={n}"), "oracle count", e.to_string()),
        }
    }
    report
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12e}{:+.12e}i", z.re, z.im)
}

fn fmt_err(e: &RootError) -> String {
    e.to_string()
}

fn sec4_even_m() -> VerificationReport {
    let mut report = VerificationReport::new(
        "sec4_even_m",
        false,
        "M_k**(1;zeta) and M_k*(1;zeta) finite sums against radial probes, m in {2,4,6}, k in {1,2,3}, gcd(j,m)=1, tol 1e-6; tail factors below 1e-12",
    );
    let one = Complex64::new(1.0, 0.0);
    for m in [2u32, 4, 6] {
        for j in primitive_residues(m) {
            let target = RootTarget::new(m, j).expect("valid target");
            match tail_factor_max(&target, 3 * m as usize) {
                Ok(v) if v < 1e-12 => {}
                Ok(v) => report.push(format!("m={m} j={j} tail"), "< 1e-12", format!("{v:e}")),
                Err(e) => report.push(format!("m={m} j={j} tail"), "tail factors", fmt_err(&e)),
            }
            for k in 1..=3u32 {
                for (kind, label) in [(MultimodalKind::Strong, "strong"), (MultimodalKind::Semistrong, "semistrong")] {
                    let location = format!("{label} m={m} j={j} k={k}");
                    let finite = match kind {
                        MultimodalKind::Semistrong => finite_eval_semistrong(k, &target),
                        _ => finite_eval_strong(k, &target),
                    };
                    let finite = match finite {
                        Ok(v) => v,
                        Err(e) => {
                            report.push(location, "finite evaluation", fmt_err(&e));
                            continue;
                        }
                    };
                    match radial_limit(&MultimodalSeries { kind, k, z: one }, &target) {
                        Ok(est) if (est.value - finite).norm() <= 1e-6 => {}
                        Ok(est) => report.push(location, fmt_c(finite), fmt_c(est.value)),
                        Err(e) => report.push(location, fmt_c(finite), fmt_err(&e)),
                    }
                }
            }
        }
    }
    report
}

fn random_table(rng: &mut ChaCha8Rng, m: usize, radius: (f64, f64)) -> PeriodicTable {
    let values = (0..m)
        .map(|_| {
            let rho = rng.random_range(radius.0..radius.1);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(rho, angle)
        })
        .collect();
    PeriodicTable::new(values).expect("m >= 2")
}

fn random_g(rng: &mut ChaCha8Rng, m: usize) -> PeriodicTable {
    let values = (0..m)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    PeriodicTable::new(values).expect("m >= 2")
}

fn abs_sum(phi: &PeriodicTable, g: &PeriodicTable, n: usize) -> f64 {
    let mut f = Complex64::new(1.0, 0.0);
    let mut acc = 0.0;
    for i in 1..=n {
        f *= phi.at(i);
        acc += (f * g.at(i)).norm();
    }
    acc
}

fn thm5(params: &SuiteParams) -> VerificationReport {
    let mut report = VerificationReport::new(
        "thm5",
        false,
        format!(
            "{} seeded tables (seed {:#x}), m in 2..6, j <= 10, all r: closed form rel tol 1e-9; F_g(inf) vs F_g(50m) tol 1e-7",
            params.tables, params.seed
        ),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut convergent = 0usize;
    for t in 0..params.tables {
        let m = 2 + t % 5;
        let radius = if t % 2 == 0 { (0.1, 0.7) } else { (1.0, 1.4) };
        let phi = random_table(&mut rng, m, radius);
        let g = random_g(&mut rng, m);
        let unit = PeriodicTable::constant(Complex64::new(1.0, 0.0), m).expect("m >= 2");
        for j in 0..=10u32 {
            for r in 0..m {
                let n = m * j as usize + r;
                let location = format!("table {t} m={m} j={j} r={r}");
                let scale = abs_sum(&phi, &g, n).max(f64::MIN_POSITIVE);
                match (fg_closed(&phi, &g, j, r), fg_direct(&phi, &g, n)) {
                    (Ok(closed), Ok(direct)) if (closed - direct).norm() <= 1e-9 * scale => {}
                    (Ok(closed), Ok(direct)) => report.push(location.clone(), fmt_c(direct), fmt_c(closed)),
                    (Err(e), _) | (_, Err(e)) => report.push(location.clone(), "closed form", fmt_err(&e)),
                }
                let unit_scale = abs_sum(&phi, &unit, n).max(f64::MIN_POSITIVE);
                match (fg_closed(&phi, &unit, j, r), f_sum_closed(&phi, j, r)) {
                    (Ok(a), Ok(b)) if (a - b).norm() <= 1e-9 * unit_scale => {}
                    (Ok(a), Ok(b)) => report.push(format!("{location} g=1"), fmt_c(b), fmt_c(a)),
                    (Err(e), _) | (_, Err(e)) => report.push(format!("{location} g=1"), "closed form", fmt_err(&e)),
                }
            }
        }
        let fm = f_product(&phi, m);
        match fg_infinite(&phi, &g) {
            Ok(inf) => {
                convergent += 1;
                let direct = fg_direct(&phi, &g, 50 * m).expect("same period");
                if (inf - direct).norm() > 1e-7 {
                    report.push(format!("table {t} m={m} infinite"), fmt_c(direct), fmt_c(inf));
                }
            }
            Err(RootError::DivergentGeometric(_)) if fm.norm() >= 1.0 => {}
            Err(e) => report.push(format!("table {t} m={m} infinite"), "limit", fmt_err(&e)),
        }
    }
    report.note(format!("{convergent} of {} tables have |f(m)| < 1", params.tables));
    report
}

/// Grid for the finite formula of `M_k(z; zeta)`.
pub const COR6_THETAS: [f64; 4] = [0.4, 0.7, 0.9, 1.3];
pub const COR6_MS: [u32; 3] = [2, 3, 4];
pub const COR6_KS: [u32; 3] = [1, 2, 3];

fn cor6() -> VerificationReport {
    let mut report = VerificationReport::new(
        "cor6",
        false,
        "M_k(z;zeta) finite formula against radial probes, z = e^(i pi theta), theta in {0.4,0.7,0.9,1.3}, m in {2,3,4}, k in {1,2,3}, gcd(j,m)=1, tol 1e-5",
    );
    let mut compared = 0usize;
    for theta in COR6_THETAS {
        let z = Complex64::from_polar(1.0, theta * std::f64::consts::PI);
        for m in COR6_MS {
            for j in primitive_residues(m) {
                let target = RootTarget::new(m, j).expect("valid target");
                for k in COR6_KS {
                    let location = format!("theta={theta} m={m} j={j} k={k}");
                    let finite = match mk_at_root_corollary(k, z, &target) {
                        Ok(v) => v,
                        Err(e @ (RootError::ZConditionViolated(_) | RootError::GuardFailed)) => {
                            report.note(format!("{location}: excluded, {e}"));
                            continue;
                        }
                        Err(e) => {
                            report.push(location, "finite formula", fmt_err(&e));
                            continue;
                        }
                    };
                    if !finite.is_finite() {
                        report.push(location, "finite value", fmt_c(finite));
                        continue;
                    }
                    match radial_limit(&MultimodalSeries { kind: MultimodalKind::Plain, k, z }, &target) {
                        Ok(est) => {
                            compared += 1;
                            if (est.value - finite).norm() > 1e-5 {
                                report.push(location, fmt_c(finite), fmt_c(est.value));
                            }
                        }
                        Err(e @ (RootError::Nonconvergent { .. } | RootError::ExtrapolationUnstable { .. })) => {
                            report.note(format!("{location}: skipped, probe: {e}"));
                        }
                        Err(e) => report.push(location, fmt_c(finite), fmt_err(&e)),
                    }
                }
            }
        }
    }
    report.note(format!("{compared} cases compared against the probe"));
    report
}

/// Orders checked for the truncated rank series at `z = -1`.
pub const UNIGEN2_MS: [u32; 6] = [1, 2, 3, 4, 6, 8];

fn unigen2() -> VerificationReport {
    let mut report = VerificationReport::new(
        "unigen2",
        false,
        "U(-1;zeta) finite sum against the radial probe, m in {1,2,3,4,6,8}, gcd(j,m)=1, tol 1e-6",
    );
    let minus_one = Complex64::new(-1.0, 0.0);
    match u_at_root(2, 1) {
        Ok(v) if (v - 3.0).norm() <= 1e-12 => {}
        Ok(v) => report.push("m=2 j=1 hand value", "3", fmt_c(v)),
        Err(e) => report.push("m=2 j=1 hand value", "3", fmt_err(&e)),
    }
    for m in UNIGEN2_MS {
        for j in primitive_residues(m) {
            let location = format!("m={m} j={j}");
            let target = RootTarget::new(m, j).expect("valid target");
            let finite = u_at_root(m, j).expect("valid target");
            match radial_limit(&RankSeries { z: minus_one }, &target) {
                Ok(est) if (est.value - finite).norm() <= 1e-6 => {}
                Ok(est) => report.push(location, fmt_c(finite), fmt_c(est.value)),
                Err(e) => report.push(location, fmt_c(finite), fmt_err(&e)),
            }
        }
    }
    report
}
