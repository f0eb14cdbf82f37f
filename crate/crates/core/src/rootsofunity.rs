//! Numerics at roots of unity: the finite evaluations, a radial probe for
//! the infinite series, the `P_{z,n}` root guard, and the periodic
//! summatory function of a periodic product.
//!
//! Everything here is double precision. A radial limit is estimated by
//! summing the series at `q = (1 - t) zeta` for a decreasing list of `t`
//! and extrapolating the values to `t = 0` with Neville's scheme.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::symbols::{poch_product_c, poch_sum_c, PochLength};

/// Per-`t` term cap of the radial probe.
pub const TERM_CAP: usize = 1_000_000;
/// Number of points used by the extrapolation.
pub const EXTRAPOLATION_POINTS: usize = 5;
const SETTLE_RUN: usize = 64;
const SETTLE_REL: f64 = 1e-15;
const TAIL_BOUND: f64 = 1e-2;
const UNSTABLE_REL: f64 = 1e-4;
const SYMBOL_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("invalid root target: {0}")]
    InvalidTarget(String),
    #[error("the finite evaluation needs an even order, got m = {0}")]
    EvenOrderRequired(u32),
    #[error("composition symbol vanishes at n = {0}")]
    CompositionSymbolZero(usize),
    #[error("series did not settle at t = {t} after {terms} terms")]
    Nonconvergent { t: f64, terms: usize },
    #[error("extrapolation unstable: estimate {value:?}, error estimate {error_estimate:e}")]
    ExtrapolationUnstable { value: [f64; 2], error_estimate: f64 },
    #[error("root extraction failed for a degree {0} polynomial")]
    RootfinderFailure(usize),
    #[error("periodic tables have different periods {0} and {1}")]
    PeriodMismatch(usize, usize),
    #[error("residue {r} is not below the period {m}")]
    ResidueOutOfRange { r: usize, m: usize },
    #[error("|f(m)| = {0} is not below 1")]
    DivergentGeometric(f64),
    #[error("z condition violated: {0}")]
    ZConditionViolated(String),
    #[error("a root of P_(z,n) lies on the radial path")]
    GuardFailed,
    #[error("|f(m)| = {actual} differs from |1 - z^m|^-2 = {expected}")]
    PeriodicityMismatch { actual: f64, expected: f64 },
}

pub mod roots {
    //! Polynomial roots from the eigenvalues of the companion matrix.

    use nalgebra::{DMatrix, Schur};
    use num_complex::Complex64;

    use super::RootError;

    /// Horner evaluation; `coeffs` run from the constant term upwards.
    pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
        coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// All complex roots, with multiplicity, of the polynomial whose
    /// coefficients run from the constant term upwards.
    ///
    /// Each root is checked against a backward-error bound; a failed Schur
    /// iteration or a root that does not pass gives `RootfinderFailure`.
    pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
        let Some(top) = coeffs.iter().rposition(|c| c.norm() > 0.0) else {
            return Err(RootError::RootfinderFailure(0));
        };
        let c = &coeffs[..=top];
        let d = top;
        if d == 0 {
            return Ok(Vec::new());
        }
        let lead = c[d];
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..d {
            m[(i, d - 1)] = -c[i] / lead;
        }
        let roots: Vec<Complex64> = Schur::try_new(m, 1e-15, 10_000)
            .and_then(|s| s.eigenvalues())
            .ok_or(RootError::RootfinderFailure(d))?
            .iter()
            .copied()
            .collect();
        for &x in &roots {
            let scale: f64 = c.iter().rev().fold(0.0, |acc, a| acc * x.norm() + a.norm());
            let residual = eval(c, x).norm();
            if residual.is_nan() || residual > 1e-9 * scale {
                return Err(RootError::RootfinderFailure(d));
            }
        }
        Ok(roots)
    }
}

pub fn default_path() -> Vec<f64> {
    (0..=12).map(|s| 0.1 * 0.5f64.powi(s)).collect()
}

/// A root of unity `exp(2 pi i j / m)` with the radial path and guard settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RootTarget {
    pub m: u32,
    pub j: i64,
    pub zeta: Complex64,
    pub path_ts: Vec<f64>,
    pub guard_nmax: usize,
    pub guard_eps: f64,
}

impl RootTarget {
    pub fn new(m: u32, j: i64) -> Result<Self, RootError> {
        Self::with_path(m, j, default_path())
    }

    pub fn with_path(m: u32, j: i64, path_ts: Vec<f64>) -> Result<Self, RootError> {
        if m == 0 {
            return Err(RootError::InvalidTarget("m must be at least 1".into()));
        }
        if path_ts.is_empty() || path_ts.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(RootError::InvalidTarget("path offsets must lie in (0, 1)".into()));
        }
        if path_ts.windows(2).any(|w| w[0] <= w[1]) {
            return Err(RootError::InvalidTarget("path offsets must strictly decrease".into()));
        }
        // Reduce j first so that large j do not lose the angle.
        let r = j.rem_euclid(m as i64) as f64;
        let zeta = Complex64::from_polar(1.0, 2.0 * PI * r / m as f64);
        Ok(RootTarget { m, j, zeta, path_ts, guard_nmax: 30, guard_eps: 1e-4 })
    }

    pub fn is_one(&self) -> bool {
        self.j.rem_euclid(self.m as i64) == 0
    }
}

/// `j` in `1..m` with `gcd(j, m) = 1`; `[0]` for `m = 1`.
pub fn primitive_residues(m: u32) -> Vec<i64> {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&j| gcd(j, m) == 1).map(i64::from).collect()
}

/// `P_{z,n}(x) = z x^(n+1) - (z + 1) x + 1`, low coefficients first.
pub fn pzn_coeffs(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n + 2];
    c[0] = Complex64::new(1.0, 0.0);
    c[1] = -(z + 1.0);
    c[n + 1] += z;
    c
}

/// Distance from `x` to the segment `{(1 - t) zeta : 0 <= t <= t_max}`.
fn segment_distance(x: Complex64, zeta: Complex64, t_max: f64) -> f64 {
    let s = (x * zeta.conj()).re.clamp(1.0 - t_max, 1.0);
    (x - zeta * s).norm()
}

/// True iff no root of `P_{z,n}`, `1 <= n <= guard_nmax`, lies within
/// `guard_eps` of the radial segment. Always false at `zeta = 1`, where
/// `x = 1` is a root of every `P_{z,n}`.
pub fn guard_pzn(z: Complex64, target: &RootTarget) -> Result<bool, RootError> {
    if target.guard_nmax == 0 {
        return Err(RootError::InvalidTarget("guard_nmax must be at least 1".into()));
    }
    if target.is_one() {
        return Ok(false);
    }
    let t_max = target.path_ts[0];
    for n in 1..=target.guard_nmax {
        let roots = roots::polynomial_roots(&pzn_coeffs(z, n))?;
        if roots.iter().any(|&x| segment_distance(x, target.zeta, t_max) < target.guard_eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn even_half(target: &RootTarget) -> Result<usize, RootError> {
    if !target.m.is_multiple_of(2) {
        return Err(RootError::EvenOrderRequired(target.m));
    }
    Ok(target.m as usize / 2)
}

/// `{zeta;zeta}_{n-1}`, i.e. `{zq;q}_{n-1}` at `z = 1`, `q = zeta`.
fn shifted_symbol(zeta: Complex64, n: usize) -> Complex64 {
    poch_sum_c(zeta, zeta, PochLength::Finite(n - 1)).expect("finite length")
}

fn finite_eval(k: u32, target: &RootTarget, semistrong: bool) -> Result<Complex64, RootError> {
    assert!(k >= 1, "peak multiplicity must be positive");
    let half = even_half(target)?;
    let zeta = target.zeta;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=half {
        let symbol = shifted_symbol(zeta, n);
        if k >= 2 && symbol.norm() < SYMBOL_ZERO {
            return Err(RootError::CompositionSymbolZero(n));
        }
        let distinct = poch_product_c(-zeta, zeta, n - 1);
        let side = if semistrong { distinct / poch_product_c(zeta, zeta, n - 1) } else { distinct * distinct };
        acc += zeta.powu(k * n as u32) * side / symbol.powu(k - 1);
    }
    Ok(acc)
}

/// `sum_{n=1}^{m/2} zeta^(kn) (-zeta;zeta)_{n-1}^2 / {zeta;zeta}_{n-1}^(k-1)`.
pub fn finite_eval_strong(k: u32, target: &RootTarget) -> Result<Complex64, RootError> {
    finite_eval(k, target, false)
}

/// `sum_{n=1}^{m/2} zeta^(kn) (-zeta;zeta)_{n-1} / ({zeta;zeta}_{n-1}^(k-1) (zeta;zeta)_{n-1})`.
pub fn finite_eval_semistrong(k: u32, target: &RootTarget) -> Result<Complex64, RootError> {
    finite_eval(k, target, true)
}

/// Largest `|(-zeta;zeta)_{n-1}|` over `m/2 < n <= n_max`; these factors
/// kill every later summand of the finite evaluations.
pub fn tail_factor_max(target: &RootTarget, n_max: usize) -> Result<f64, RootError> {
    let half = even_half(target)?;
    Ok((half + 1..=n_max)
        .map(|n| poch_product_c(-target.zeta, target.zeta, n - 1).norm())
        .fold(0.0, f64::max))
}

/// A series that can be summed numerically at a point `q` inside the disk.
pub trait RadialSeries {
    /// The terms of the series at `q`, in summation order.
    fn terms(&self, q: Complex64) -> Box<dyn Iterator<Item = Complex64> + '_>;

    /// The `z` whose `P_{z,n}` roots must avoid the path, if any.
    fn guard_z(&self) -> Option<Complex64> {
        None
    }
}

/// A series given by a closure from `q` to its term sequence.
pub struct FnSeries<F>(pub F);

impl<F, I> RadialSeries for FnSeries<F>
where
    F: Fn(Complex64) -> I,
    I: Iterator<Item = Complex64> + 'static,
{
    fn terms(&self, q: Complex64) -> Box<dyn Iterator<Item = Complex64> + '_> {
        Box::new((self.0)(q))
    }
}

/// The constant series with single term `c`.
pub struct Constant(pub Complex64);

impl RadialSeries for Constant {
    fn terms(&self, _q: Complex64) -> Box<dyn Iterator<Item = Complex64> + '_> {
        Box::new(std::iter::once(self.0))
    }
}

/// `U(z;q) = sum_n q^n (-q/z;q)_{n-1} (-zq;q)_{n-1}`.
pub struct RankSeries {
    pub z: Complex64,
}

impl RadialSeries for RankSeries {
    fn terms(&self, q: Complex64) -> Box<dyn Iterator<Item = Complex64> + '_> {
        let z = self.z;
        let mut term = q;
        let mut qn = q;
        Box::new(std::iter::from_fn(move || {
            let out = term;
            term *= q * (1.0 + qn / z) * (1.0 + z * qn);
            qn *= q;
            Some(out)
        }))
    }
}

/// Which side factors a multimodal summand carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultimodalKind {
    /// `M_k`: `1 / (zq;q)_{n-1}^2`.
    Plain,
    /// `M_k**`: `(-zq;q)_{n-1}^2`.
    Strong,
    /// `M_k*`: `(-zq;q)_{n-1} / (zq;q)_{n-1}`.
    Semistrong,
}

/// `sum_n z^k q^(kn) side_n / {zq;q}_{n-1}^(k-1)`, generated by term ratios
/// so that overflowing Pochhammer products never meet.
pub struct MultimodalSeries {
    pub kind: MultimodalKind,
    pub k: u32,
    pub z: Complex64,
}

impl RadialSeries for MultimodalSeries {
    fn terms(&self, q: Complex64) -> Box<dyn Iterator<Item = Complex64> + '_> {
        let (z, k, kind) = (self.z, self.k as i32, self.kind);
        let qk = q.powi(k);
        let mut term = z.powi(k) * qk;
        let mut qn = q;
        let mut symbol = Complex64::new(1.0, 0.0);
        Box::new(std::iter::from_fn(move || {
            let out = term;
            let next_symbol = symbol - z * qn;
            let side = match kind {
                MultimodalKind::Plain => 1.0 / ((1.0 - z * qn) * (1.0 - z * qn)),
                MultimodalKind::Strong => (1.0 + z * qn) * (1.0 + z * qn),
                MultimodalKind::Semistrong => (1.0 + z * qn) / (1.0 - z * qn),
            };
            term *= qk * side * (symbol / next_symbol).powi(k - 1);
            symbol = next_symbol;
            qn *= q;
            Some(out)
        }))
    }

    fn guard_z(&self) -> Option<Complex64> {
        (self.k >= 2).then_some(self.z)
    }
}

/// The numeric sum of a series at one point together with the terms used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSum {
    pub value: Complex64,
    pub terms: usize,
}

/// Sums `series` at `q` until the terms settle.
///
/// The sum stops once 64 consecutive terms are below `1e-15` of the partial
/// sum and either a term is exactly zero or `|q|^n / (1 - |q|)` is below
/// `1e-2`, so later terms cannot grow back through their products.
pub fn sum_at(series: &dyn RadialSeries, q: Complex64, t: f64) -> Result<PointSum, RootError> {
    let r = q.norm();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut run = 0usize;
    let mut rn = 1.0f64;
    for (i, term) in series.terms(q).enumerate() {
        if i >= TERM_CAP {
            return Err(RootError::Nonconvergent { t, terms: i });
        }
        if !term.is_finite() {
            return Err(RootError::Nonconvergent { t, terms: i });
        }
        partial += term;
        rn *= r;
        if term.norm() <= SETTLE_REL * partial.norm() {
            run += 1;
        } else {
            run = 0;
        }
        let tail_small = term == Complex64::new(0.0, 0.0) || rn / (1.0 - r) <= TAIL_BOUND;
        if run >= SETTLE_RUN && tail_small {
            return Ok(PointSum { value: partial, terms: i + 1 });
        }
    }
    if partial.is_finite() {
        Ok(PointSum { value: partial, terms: 0 })
    } else {
        Err(RootError::Nonconvergent { t, terms: 0 })
    }
}

/// Value at 0 of the interpolating polynomial through `(ts[i], vs[i])`.
pub fn neville_at_zero(ts: &[f64], vs: &[Complex64]) -> Complex64 {
    assert_eq!(ts.len(), vs.len());
    let mut p = vs.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (a, b) = (ts[i], ts[i + level]);
            p[i] = (p[i + 1] * a - p[i] * b) / (a - b);
        }
    }
    p[0]
}

/// Extrapolated radial limit with per-point diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialEstimate {
    pub value: Complex64,
    pub per_t: Vec<(f64, Complex64)>,
    pub error_estimate: f64,
    /// False only when the series needed the guard and it failed; set true
    /// when no guard was needed.
    pub guard: bool,
    pub target: (u32, i64),
}

#[derive(Serialize)]
struct Diagnostics {
    target: TargetDoc,
    per_t: Vec<[f64; 3]>,
    extrapolated: [f64; 2],
    error_estimate: f64,
    guard: bool,
}

#[derive(Serialize)]
struct TargetDoc {
    m: u32,
    j: i64,
}

impl RadialEstimate {
    pub fn to_json(&self) -> String {
        let doc = Diagnostics {
            target: TargetDoc { m: self.target.0, j: self.target.1 },
            per_t: self.per_t.iter().map(|&(t, v)| [t, v.re, v.im]).collect(),
            extrapolated: [self.value.re, self.value.im],
            error_estimate: self.error_estimate,
            guard: self.guard,
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }
}

/// Probes `series` along `q = (1 - t) zeta` and extrapolates to `t = 0`.
///
/// Uses the last five path points; the error estimate is the change when the
/// five-point window moves one step back along the path.
pub fn radial_limit(series: &dyn RadialSeries, target: &RootTarget) -> Result<RadialEstimate, RootError> {
    let guard = match series.guard_z() {
        Some(z) => guard_pzn(z, target)?,
        None => true,
    };
    if !guard {
        return Err(RootError::GuardFailed);
    }
    let mut per_t = Vec::with_capacity(target.path_ts.len());
    for &t in &target.path_ts {
        let q = target.zeta * (1.0 - t);
        per_t.push((t, sum_at(series, q, t)?.value));
    }
    let (ts, vs): (Vec<f64>, Vec<Complex64>) = per_t.iter().copied().unzip();
    let n = ts.len();
    let width = EXTRAPOLATION_POINTS.min(n);
    let value = neville_at_zero(&ts[n - width..], &vs[n - width..]);
    let error_estimate = if n > width {
        (value - neville_at_zero(&ts[n - width - 1..n - 1], &vs[n - width - 1..n - 1])).norm()
    } else {
        (value - vs[n - 1]).norm()
    };
    if !value.is_finite() || error_estimate.is_nan() || error_estimate > UNSTABLE_REL * value.norm().max(1.0) {
        return Err(RootError::ExtrapolationUnstable { value: [value.re, value.im], error_estimate });
    }
    Ok(RadialEstimate { value, per_t, error_estimate, guard, target: (target.m, target.j) })
}

/// `U(-1; zeta) = sum_{n=0}^{m-1} zeta^(n+1) (zeta;zeta)_n^2`.
pub fn u_at_root(m: u32, j: i64) -> Result<Complex64, RootError> {
    let target = RootTarget::new(m, j)?;
    let zeta = target.zeta;
    Ok((0..m as usize)
        .map(|n| {
            let p = poch_product_c(zeta, zeta, n);
            zeta.powu(n as u32 + 1) * p * p
        })
        .sum())
}

/// A function on the positive integers with period `m >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicTable {
    values: Vec<Complex64>,
}

impl PeriodicTable {
    /// `values[r - 1]` is the value at `r` for `r = 1..=m`.
    pub fn new(values: Vec<Complex64>) -> Result<Self, RootError> {
        if values.len() < 2 {
            return Err(RootError::InvalidTarget("a periodic table needs period at least 2".into()));
        }
        Ok(PeriodicTable { values })
    }

    pub fn constant(c: Complex64, m: usize) -> Result<Self, RootError> {
        Self::new(vec![c; m])
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at `n >= 1`.
    pub fn at(&self, n: usize) -> Complex64 {
        assert!(n >= 1, "periodic tables are indexed from 1");
        self.values[(n - 1) % self.values.len()]
    }
}

fn same_period(phi: &PeriodicTable, g: &PeriodicTable) -> Result<usize, RootError> {
    if phi.m() != g.m() {
        return Err(RootError::PeriodMismatch(phi.m(), g.m()));
    }
    Ok(phi.m())
}

/// `f(n) = prod_{i<=n} phi(i)`.
pub fn f_product(phi: &PeriodicTable, n: usize) -> Complex64 {
    (1..=n).map(|i| phi.at(i)).product()
}

/// `F_g(n) = sum_{j<=n} f(j) g(j)` term by term.
pub fn fg_direct(phi: &PeriodicTable, g: &PeriodicTable, n: usize) -> Result<Complex64, RootError> {
    same_period(phi, g)?;
    let mut f = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 1..=n {
        f *= phi.at(i);
        acc += f * g.at(i);
    }
    Ok(acc)
}

/// `F_g(mj + r)` by the geometric-series formula; `f(m) = 1` uses `j F_g(m) + F_g(r)`.
pub fn fg_closed(phi: &PeriodicTable, g: &PeriodicTable, j: u32, r: usize) -> Result<Complex64, RootError> {
    let m = same_period(phi, g)?;
    if r >= m {
        return Err(RootError::ResidueOutOfRange { r, m });
    }
    let fm = f_product(phi, m);
    let f_full = fg_direct(phi, g, m)?;
    let f_rest = fg_direct(phi, g, r)?;
    let fmj = fm.powu(j);
    let one = Complex64::new(1.0, 0.0);
    let geometric = if (one - fm).norm() < 1e-14 { Complex64::new(j as f64, 0.0) } else { (one - fmj) / (one - fm) };
    Ok(geometric * f_full + fmj * f_rest)
}

/// `F_g(inf) = F_g(m) / (1 - f(m))` for `|f(m)| < 1`.
pub fn fg_infinite(phi: &PeriodicTable, g: &PeriodicTable) -> Result<Complex64, RootError> {
    let m = same_period(phi, g)?;
    let fm = f_product(phi, m);
    if fm.norm() >= 1.0 {
        return Err(RootError::DivergentGeometric(fm.norm()));
    }
    Ok(fg_direct(phi, g, m)? / (1.0 - fm))
}

/// The `g = 1` case written out on its own: `sum_{i<=mj+r} f(i)`.
pub fn f_sum_closed(phi: &PeriodicTable, j: u32, r: usize) -> Result<Complex64, RootError> {
    let m = phi.m();
    if r >= m {
        return Err(RootError::ResidueOutOfRange { r, m });
    }
    let partial = |n: usize| (1..=n).map(|i| f_product(phi, i)).sum::<Complex64>();
    let fm = f_product(phi, m);
    let block = partial(m);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for _ in 0..j {
        acc += power * block;
        power *= fm;
    }
    Ok(acc + power * partial(r))
}

/// The finite formula for `M_k(z; zeta)`:
/// `(z zeta)^k + z^(k-m) (z^m - 1)^2 / (z^m - 2) * sum_{n=1}^m zeta^(k(n+1)) / ({z zeta;zeta}_n^(k-1) (z zeta;zeta)_n^2)`.
///
/// Requires `m > 1`, `|z| = 1`, `z != +-1` and `|z^m - 1| > 1`, checks that
/// `|f(m)| = |1 - z^m|^-2` (which fails when `zeta` is not primitive), and
/// for `k >= 2` that the guard passes.
pub fn mk_at_root_corollary(k: u32, z: Complex64, target: &RootTarget) -> Result<Complex64, RootError> {
    assert!(k >= 1, "peak multiplicity must be positive");
    let m = target.m;
    if m < 2 {
        return Err(RootError::ZConditionViolated("m must exceed 1".into()));
    }
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(RootError::ZConditionViolated(format!("|z| = {} is not 1", z.norm())));
    }
    if (z - 1.0).norm() < 1e-12 || (z + 1.0).norm() < 1e-12 {
        return Err(RootError::ZConditionViolated("z must not be 1 or -1".into()));
    }
    let zm = z.powu(m);
    let gap = (zm - 1.0).norm();
    if gap <= 1.0 {
        return Err(RootError::ZConditionViolated(format!("|z^m - 1| = {gap} is not above 1")));
    }
    let zeta = target.zeta;
    let x = z * zeta;
    let full = poch_product_c(x, zeta, m as usize);
    let fm = zeta.powu(k * m) / (full * full);
    let expected = gap.powi(-2);
    if (fm.norm() - expected).abs() > 1e-9 * expected {
        return Err(RootError::PeriodicityMismatch { actual: fm.norm(), expected });
    }
    if k >= 2 && !guard_pzn(z, target)? {
        return Err(RootError::GuardFailed);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=m as usize {
        let symbol = poch_sum_c(x, zeta, PochLength::Finite(n)).expect("finite length");
        let p = poch_product_c(x, zeta, n);
        sum += zeta.powu(k * (n as u32 + 1)) / (symbol.powu(k - 1) * p * p);
    }
    Ok(x.powu(k) + z.powi(k as i32 - m as i32) * (zm - 1.0) * (zm - 1.0) / (zm - 2.0) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::poch_sum_direct_c;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn polynomial_roots_basic() {
        // (x - 1)(x - 2)(x + i)
        let roots = roots::polynomial_roots(&[c(0.0, 2.0), c(2.0, -3.0), c(-3.0, 1.0), c(1.0, 0.0)]).unwrap();
        for want in [c(1.0, 0.0), c(2.0, 0.0), c(0.0, -1.0)] {
            assert!(roots.iter().any(|&r| close(r, want, 1e-10)), "{want} missing from {roots:?}");
        }
        assert_eq!(roots::polynomial_roots(&[c(3.0, 0.0), c(0.0, 0.0)]).unwrap(), vec![]);
        assert!(roots::polynomial_roots(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn pzn_roots_include_one() {
        let z = Complex64::from_polar(1.0, 0.9 * PI);
        for n in [1usize, 5, 30] {
            let coeffs = pzn_coeffs(z, n);
            let roots = roots::polynomial_roots(&coeffs).unwrap();
            assert_eq!(roots.len(), n + 1);
            assert!(roots.iter().any(|&r| close(r, c(1.0, 0.0), 1e-8)));
            assert!(roots.iter().all(|&r| roots::eval(&coeffs, r).norm() < 1e-8));
        }
    }

    #[test]
    fn target_defaults() {
        let t = RootTarget::new(4, 5).unwrap();
        assert!(close(t.zeta, c(0.0, 1.0), 1e-15));
        assert_eq!(t.path_ts.len(), 13);
        assert_eq!((t.guard_nmax, t.guard_eps), (30, 1e-4));
        assert!(RootTarget::new(0, 1).is_err());
        assert!(RootTarget::with_path(3, 1, vec![0.1, 0.2]).is_err());
        assert_eq!(primitive_residues(6), vec![1, 5]);
        assert_eq!(primitive_residues(1), vec![0]);
    }

    #[test]
    fn guard_examples() {
        let one = RootTarget::new(1, 0).unwrap();
        assert!(!guard_pzn(c(0.5, 0.0), &one).unwrap());
        let target = RootTarget::new(4, 1).unwrap();
        let g = guard_pzn(c(0.5, 0.0), &RootTarget { guard_eps: 1e-3, ..target.clone() }).unwrap();
        let g2 = guard_pzn(c(0.5, 0.0), &RootTarget { guard_eps: 1e-3, guard_nmax: 60, ..target.clone() }).unwrap();
        assert_eq!(g, g2);
        // Choose z so that x0 = 0.99 i is a root of P_{z,3}: z = (x0 - 1) / (x0^4 - x0).
        let x0 = c(0.0, 0.99);
        let z = (x0 - 1.0) / (x0.powu(4) - x0);
        assert!(poch_sum_direct_c(z * x0, x0, 3).norm() < 1e-12);
        assert!(!guard_pzn(z, &target).unwrap());
    }

    #[test]
    fn finite_eval_examples() {
        let minus_one = RootTarget::new(2, 1).unwrap();
        assert!(close(finite_eval_strong(1, &minus_one).unwrap(), c(-1.0, 0.0), 1e-15));
        assert_eq!(finite_eval_strong(1, &RootTarget::new(3, 1).unwrap()), Err(RootError::EvenOrderRequired(3)));
        // m = 4, j = 1, k = 1: zeta + zeta^2 (1 + zeta)^2 = i - (1 + i)^2 = -i.
        let four = RootTarget::new(4, 1).unwrap();
        assert!(close(finite_eval_strong(1, &four).unwrap(), c(0.0, -1.0), 1e-14));
        // Semistrong: zeta + zeta^2 (1 + zeta) / (1 - zeta) = i - i = 0.
        let i = c(0.0, 1.0);
        let direct = i + i * i * (1.0 + i) / (1.0 - i);
        assert!(close(finite_eval_semistrong(1, &four).unwrap(), direct, 1e-14));
    }

    #[test]
    fn finite_eval_tail_vanishes() {
        for m in [2u32, 4, 6, 8] {
            for j in primitive_residues(m) {
                let t = RootTarget::new(m, j).unwrap();
                assert!(tail_factor_max(&t, 3 * m as usize).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn neville_recovers_polynomials() {
        let ts = [0.4, 0.2, 0.1, 0.05];
        let vs: Vec<Complex64> = ts.iter().map(|&t| c(2.0 - t + 3.0 * t * t * t, t)).collect();
        assert!(close(neville_at_zero(&ts, &vs), c(2.0, 0.0), 1e-12));
    }

    #[test]
    fn radial_constant() {
        let target = RootTarget::new(5, 2).unwrap();
        let est = radial_limit(&Constant(c(1.0, 0.0)), &target).unwrap();
        assert!(close(est.value, c(1.0, 0.0), 1e-15));
        assert!(est.guard);
        let json = est.to_json();
        assert!(json.starts_with(r#"{"target":{"m":5,"j":2},"per_t":[[0.1,1.0,0.0],"#), "{json}");
    }

    #[test]
    fn radial_closure_series() {
        // Geometric series sum q^n at a point where it converges: the limit is
        // 1/(1 - zeta) for zeta != 1.
        let s = FnSeries(|q: Complex64| {
            let mut p = Complex64::new(1.0, 0.0);
            std::iter::from_fn(move || {
                let out = p;
                p *= q;
                Some(out)
            })
        });
        // On the default path the smallest t needs more terms than the cap.
        let far = RootTarget::new(3, 1).unwrap();
        assert!(matches!(radial_limit(&s, &far), Err(RootError::Nonconvergent { .. })));
        let path: Vec<f64> = (0..=6).map(|i| 0.1 * 0.5f64.powi(i)).collect();
        let target = RootTarget::with_path(3, 1, path).unwrap();
        let est = radial_limit(&s, &target).unwrap();
        assert!(close(est.value, 1.0 / (1.0 - target.zeta), 1e-8), "{:?}", est.value);
    }

    #[test]
    fn u_at_root_examples() {
        assert!(close(u_at_root(1, 0).unwrap(), c(1.0, 0.0), 1e-15));
        assert!(close(u_at_root(2, 1).unwrap(), c(3.0, 0.0), 1e-14));
        let target = RootTarget::new(2, 1).unwrap();
        let est = radial_limit(&RankSeries { z: c(-1.0, 0.0) }, &target).unwrap();
        assert!(close(est.value, c(3.0, 0.0), 1e-6), "{:?}", est.value);
    }

    #[test]
    fn series_terms_match_direct_products() {
        let z = Complex64::from_polar(1.0, 0.7);
        let q = Complex64::from_polar(0.6, 1.1);
        for (kind, k) in [(MultimodalKind::Plain, 3), (MultimodalKind::Strong, 2), (MultimodalKind::Semistrong, 2)] {
            let s = MultimodalSeries { kind, k, z };
            for (i, term) in s.terms(q).take(12).enumerate() {
                let n = i + 1;
                let plus = poch_product_c(z * q, q, n - 1);
                let minus = poch_product_c(-z * q, q, n - 1);
                let side = match kind {
                    MultimodalKind::Plain => 1.0 / (plus * plus),
                    MultimodalKind::Strong => minus * minus,
                    MultimodalKind::Semistrong => minus / plus,
                };
                let symbol = poch_sum_direct_c(z * q, q, n - 1);
                let want = z.powu(k) * q.powu(k * n as u32) * side / symbol.powu(k - 1);
                assert!(close(term, want, 1e-12 * want.norm().max(1.0)), "{kind:?} n={n}");
            }
        }
        let rank = RankSeries { z };
        for (i, term) in rank.terms(q).take(12).enumerate() {
            let n = i + 1;
            let want = q.powu(n as u32) * poch_product_c(-q / z, q, n - 1) * poch_product_c(-z * q, q, n - 1);
            assert!(close(term, want, 1e-12));
        }
    }

    #[test]
    fn periodic_sum_examples() {
        let one = PeriodicTable::constant(c(1.0, 0.0), 2).unwrap();
        assert_eq!(fg_direct(&one, &one, 0).unwrap(), c(0.0, 0.0));
        assert!(close(fg_direct(&one, &one, 5).unwrap(), c(5.0, 0.0), 1e-15));
        assert!(close(fg_closed(&one, &one, 2, 1).unwrap(), c(5.0, 0.0), 1e-15));
        let half = PeriodicTable::constant(c(0.5, 0.0), 2).unwrap();
        assert!(close(fg_infinite(&half, &one).unwrap(), c(1.0, 0.0), 1e-15));
        assert!(close(fg_direct(&half, &one, 60).unwrap(), c(1.0, 0.0), 1e-15));
        assert!(matches!(fg_infinite(&one, &one), Err(RootError::DivergentGeometric(_))));
        let three = PeriodicTable::constant(c(1.0, 0.0), 3).unwrap();
        assert_eq!(fg_direct(&one, &three, 3), Err(RootError::PeriodMismatch(2, 3)));
        assert!(PeriodicTable::new(vec![c(1.0, 0.0)]).is_err());
        let phi = PeriodicTable::new(vec![c(0.3, 0.8), c(-1.1, 0.2), c(0.5, -0.5)]).unwrap();
        let g = PeriodicTable::new(vec![c(1.0, 2.0), c(0.0, -1.0), c(2.0, 0.5)]).unwrap();
        assert_eq!(fg_closed(&phi, &g, 0, 2).unwrap(), fg_direct(&phi, &g, 2).unwrap());
        assert!(close(fg_closed(&phi, &g, 1, 0).unwrap(), fg_direct(&phi, &g, 3).unwrap(), 1e-14));
        assert!(close(fg_closed(&phi, &g, 4, 1).unwrap(), fg_direct(&phi, &g, 13).unwrap(), 1e-10));
        assert!(close(fg_closed(&phi, &one_like(3), 5, 2).unwrap(), f_sum_closed(&phi, 5, 2).unwrap(), 1e-10));
    }

    fn one_like(m: usize) -> PeriodicTable {
        PeriodicTable::constant(c(1.0, 0.0), m).unwrap()
    }

    #[test]
    fn finite_formula_conditions() {
        let target = RootTarget::new(3, 1).unwrap();
        assert!(matches!(mk_at_root_corollary(1, c(1.0, 0.0), &target), Err(RootError::ZConditionViolated(_))));
        assert!(matches!(mk_at_root_corollary(1, c(-1.0, 0.0), &target), Err(RootError::ZConditionViolated(_))));
        assert!(matches!(mk_at_root_corollary(1, c(0.5, 0.0), &target), Err(RootError::ZConditionViolated(_))));
        let z = Complex64::from_polar(1.0, 0.7 * PI);
        assert!(matches!(mk_at_root_corollary(1, z, &target), Err(RootError::ZConditionViolated(_))));
        let z = Complex64::from_polar(1.0, 0.9 * PI);
        let non_primitive = RootTarget::new(4, 2).unwrap();
        let z4 = Complex64::from_polar(1.0, 0.3 * PI);
        assert!((z4.powu(4) - 1.0).norm() > 1.0);
        assert!(matches!(
            mk_at_root_corollary(1, z4, &non_primitive),
            Err(RootError::PeriodicityMismatch { .. })
        ));
        assert!(mk_at_root_corollary(1, z, &target).unwrap().is_finite());
    }

    #[test]
    fn finite_formula_matches_probe() {
        let z = Complex64::from_polar(1.0, 0.9 * PI);
        let target = RootTarget::new(3, 1).unwrap();
        let finite = mk_at_root_corollary(1, z, &target).unwrap();
        let est = radial_limit(&MultimodalSeries { kind: MultimodalKind::Plain, k: 1, z }, &target).unwrap();
        assert!(close(est.value, finite, 1e-5), "{} vs {}", est.value, finite);
    }
}
