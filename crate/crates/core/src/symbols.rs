//! The two Pochhammer-type building blocks.
//!
//! * the product symbol `(z;q)_n = prod_{k=0}^{n-1} (1 - z q^k)`, and
//! * the composition symbol `{z;q}_n = 1 - z (1 + q + ... + q^{n-1})`.
//!
//! In exact mode both are built with argument `±zq` as truncated
//! [`BivariateSeries`]; the infinite versions are finite once truncated, since
//! every factor or summand past `q^order` is invisible. In numeric mode they
//! are evaluated in `Complex64`.

use num_complex::Complex64;
use thiserror::Error;

use crate::series::BivariateSeries;

/// Below this distance from `q = 1` the composition symbol uses `1 - n z`.
pub const Q_NEAR_ONE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PochLength {
    Finite(usize),
    Infinite,
}

impl PochLength {
    /// Number of factors (or summands) that can influence a series truncated at `order`.
    pub fn effective(self, order: usize) -> usize {
        match self {
            PochLength::Finite(n) => n.min(order),
            PochLength::Infinite => order,
        }
    }
}

impl From<usize> for PochLength {
    fn from(n: usize) -> Self {
        PochLength::Finite(n)
    }
}

/// Sign of the argument: `Plus` gives `(zq;q)_n`, `Minus` gives `(-zq;q)_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Coefficient `c` in each factor `1 + c z q^i`.
    fn factor_coeff(self) -> i64 {
        match self {
            Sign::Plus => -1,
            Sign::Minus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PochKind {
    Product,
    Sum,
}

/// A symbol `(±zq;q)_n` or `{zq;q}_n` that can be expanded at any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PochSpec {
    pub length: PochLength,
    pub sign: Sign,
    pub kind: PochKind,
}

impl PochSpec {
    pub fn product(length: impl Into<PochLength>, sign: Sign) -> Self {
        Self { length: length.into(), sign, kind: PochKind::Product }
    }

    pub fn sum(length: impl Into<PochLength>) -> Self {
        Self { length: length.into(), sign: Sign::Plus, kind: PochKind::Sum }
    }

    pub fn series(&self, order: usize) -> BivariateSeries {
        match self.kind {
            PochKind::Product => poch_product(self.length, self.sign, order),
            PochKind::Sum => poch_sum(self.length, order),
        }
    }

    /// `1 / symbol`, computed by exact division rather than general inversion.
    pub fn inverse_series(&self, order: usize) -> BivariateSeries {
        let mut s = BivariateSeries::one(order);
        match self.kind {
            PochKind::Product => divide_by_poch_product(&mut s, self.length, self.sign),
            PochKind::Sum => divide_by_poch_sum(&mut s, self.length),
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SymbolError {
    #[error("{{z;q}}_inf is undefined at q = 1")]
    QAtOne,
    #[error("{{z;q}}_inf needs |q| < 1, got |q| = {0}")]
    OutsideUnitDisk(f64),
}

/// `(±zq;q)_n` truncated at `order`.
pub fn poch_product(n: impl Into<PochLength>, sign: Sign, order: usize) -> BivariateSeries {
    let mut s = BivariateSeries::one(order);
    let c = sign.factor_coeff();
    for i in 1..=n.into().effective(order) {
        s.mul_binomial(c, 1, i);
    }
    s
}

/// `{zq;q}_n = 1 - z(q + q^2 + ... + q^n)` truncated at `order`.
pub fn poch_sum(n: impl Into<PochLength>, order: usize) -> BivariateSeries {
    let n = n.into().effective(order);
    BivariateSeries::from_terms(
        order,
        std::iter::once((0, 0, 1.into())).chain((1..=n).map(|i| (1, i, (-1).into()))),
    )
    .expect("composition symbol is triangular")
}

/// Divides `s` in place by `(±zq;q)_n`.
pub fn divide_by_poch_product(s: &mut BivariateSeries, n: impl Into<PochLength>, sign: Sign) {
    let c = sign.factor_coeff();
    for i in 1..=n.into().effective(s.order()) {
        s.div_sparse_unit(&[(c, 1, i)]);
    }
}

/// Divides `s` in place by `{zq;q}_n`.
pub fn divide_by_poch_sum(s: &mut BivariateSeries, n: impl Into<PochLength>) {
    let n = n.into().effective(s.order());
    if n == 0 {
        return;
    }
    let divisor: Vec<(i64, usize, usize)> = (1..=n).map(|i| (-1, 1, i)).collect();
    s.div_sparse_unit(&divisor);
}

/// Multiplies `s` in place by `(±zq;q)_n`.
pub fn multiply_by_poch_product(s: &mut BivariateSeries, n: impl Into<PochLength>, sign: Sign) {
    let c = sign.factor_coeff();
    for i in 1..=n.into().effective(s.order()) {
        s.mul_binomial(c, 1, i);
    }
}

/// `(z;q)_n` evaluated directly as a product.
pub fn poch_product_c(z: Complex64, q: Complex64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        acc *= 1.0 - z * qk;
        qk *= q;
    }
    acc
}

/// `{z;q}_n` through its geometric-series closed form.
pub fn poch_sum_c(z: Complex64, q: Complex64, n: PochLength) -> Result<Complex64, SymbolError> {
    let one = Complex64::new(1.0, 0.0);
    let near_one = (one - q).norm() < Q_NEAR_ONE;
    match n {
        PochLength::Finite(0) => Ok(one),
        PochLength::Finite(n) if near_one => Ok(one - z * n as f64),
        PochLength::Finite(n) => Ok((one - q - z + z * q.powu(n as u32)) / (one - q)),
        PochLength::Infinite if near_one => Err(SymbolError::QAtOne),
        PochLength::Infinite if q.norm() >= 1.0 => Err(SymbolError::OutsideUnitDisk(q.norm())),
        PochLength::Infinite => Ok((one - q - z) / (one - q)),
    }
}

/// `{z;q}_n` by summing `1 - z sum_{k<n} q^k` term by term.
pub fn poch_sum_direct_c(z: Complex64, q: Complex64, n: usize) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        s += qk;
        qk *= q;
    }
    1.0 - z * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::partitions_of;
    use num_bigint::BigInt;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn series(order: usize, terms: &[(usize, usize, i64)]) -> BivariateSeries {
        BivariateSeries::from_terms(order, terms.iter().map(|&(z, q, c)| (z, q, BigInt::from(c))))
            .unwrap()
    }

    #[test]
    fn product_examples() {
        assert_eq!(poch_product(0, Sign::Plus, 6), BivariateSeries::one(6));
        assert_eq!(
            poch_product(2, Sign::Minus, 5),
            series(5, &[(0, 0, 1), (1, 1, 1), (1, 2, 1), (2, 3, 1)])
        );
        let partitions = poch_product(PochLength::Infinite, Sign::Plus, 10).invert().unwrap();
        assert_eq!(partitions.set_z_one().coeff(5).unwrap(), &BigInt::from(7));
    }

    #[test]
    fn sum_examples() {
        assert_eq!(poch_sum(0, 7), BivariateSeries::one(7));
        assert_eq!(poch_sum(2, 5), series(5, &[(0, 0, 1), (1, 1, -1), (1, 2, -1)]));
        let compositions = poch_sum(PochLength::Infinite, 8).invert().unwrap();
        assert_eq!(compositions.set_z_one().coeff(4).unwrap(), &BigInt::from(8));
    }

    #[test]
    fn inverse_series_matches_generic_inversion() {
        for n in [PochLength::Finite(0), PochLength::Finite(3), PochLength::Infinite] {
            for spec in [PochSpec::product(n, Sign::Plus), PochSpec::product(n, Sign::Minus), PochSpec::sum(n)] {
                assert_eq!(spec.inverse_series(12), spec.series(12).invert().unwrap(), "{spec:?}");
            }
        }
    }

    #[test]
    fn recurrence_exact() {
        for i in 1..=15 {
            let lhs = &poch_sum(i - 1, 15) - &BivariateSeries::monomial(1, 1, i, 15).unwrap();
            assert_eq!(lhs, poch_sum(i, 15));
        }
    }

    #[test]
    fn recurrence_numeric() {
        let z = c(0.3, -0.7);
        let q = c(0.4, 0.5);
        for i in 1..20usize {
            let lhs = poch_sum_c(z * q, q, PochLength::Finite(i - 1)).unwrap()
                - z * q.powu(i as u32);
            let rhs = poch_sum_c(z * q, q, PochLength::Finite(i)).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn distinct_parts_counts() {
        for n in 0..=12 {
            let gf = poch_product(n, Sign::Minus, 12);
            for size in 0..=12 {
                for len in 0..=size {
                    let count = partitions_of(size)
                        .filter(|p| p.is_distinct() && p.len() == len && p.largest() <= n as u32)
                        .count();
                    assert_eq!(gf.coeff(len, size).unwrap(), BigInt::from(count));
                }
            }
        }
    }

    #[test]
    fn product_c_examples() {
        let z = c(0.2, 0.9);
        assert_eq!(poch_product_c(z, c(0.5, 0.5), 0), c(1.0, 0.0));
        assert!((poch_product_c(c(-1.0, 0.0), c(-1.0, 0.0), 1) - c(2.0, 0.0)).norm() < 1e-15);
        let zeta = Complex64::from_polar(1.0, 2.0 * PI / 4.0);
        let x = c(0.3, 0.4);
        assert!((poch_product_c(x, zeta, 4) - (1.0 - x.powu(4))).norm() < 1e-12);
    }

    #[test]
    fn sum_c_examples() {
        let z = c(0.7, -0.2);
        assert!((poch_sum_c(z, c(1.0, 0.0), PochLength::Finite(6)).unwrap() - (1.0 - 6.0 * z)).norm() < 1e-15);
        assert_eq!(poch_sum_c(z, c(0.3, 0.1), PochLength::Finite(0)).unwrap(), c(1.0, 0.0));
        let closed = poch_sum_c(c(0.5, 0.0), c(0.3, 0.0), PochLength::Infinite).unwrap();
        let mut partial = c(0.0, 0.0);
        let mut qk = c(1.0, 0.0);
        while qk.norm() > 1e-18 {
            partial += qk;
            qk *= 0.3;
        }
        let direct = 1.0 - 0.5 * partial;
        assert!((closed - direct).norm() < 1e-12);
        assert!((closed - c(0.2 / 0.7, 0.0)).norm() < 1e-12);
        assert_eq!(poch_sum_c(z, c(1.0, 0.0), PochLength::Infinite), Err(SymbolError::QAtOne));
        assert!(poch_sum_c(z, c(1.5, 0.0), PochLength::Infinite).is_err());
    }

    #[test]
    fn sum_c_closed_form_matches_direct() {
        let z = c(-0.4, 1.1);
        for q in [c(0.5, 0.2), c(-0.9, 0.1), c(0.0, 1.0), c(1.3, -0.4)] {
            for n in 0..25 {
                let closed = poch_sum_c(z, q, PochLength::Finite(n)).unwrap();
                let direct = poch_sum_direct_c(z, q, n);
                assert!((closed - direct).norm() < 1e-12 * (1.0 + direct.norm()), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn sum_c_vanishes_at_polynomial_roots() {
        // {z;q}_n = 0 iff q is a root of z x^n - x + (1 - z), x = 1 excluded.
        let z = c(0.6, 0.3);
        for n in [2usize, 3, 5, 8] {
            let mut coeffs = vec![c(0.0, 0.0); n + 1];
            coeffs[0] = 1.0 - z;
            coeffs[1] += c(-1.0, 0.0);
            coeffs[n] += z;
            let roots = crate::rootsofunity::roots::polynomial_roots(&coeffs).unwrap();
            let mut checked = 0;
            for r in roots.into_iter().filter(|r| (r - 1.0).norm() > 1e-6) {
                assert!(poch_sum_c(z, r, PochLength::Finite(n)).unwrap().norm() < 1e-9);
                checked += 1;
            }
            assert_eq!(checked, n - 1);
        }
    }
}
