//! Exact truncated power series in two variables.
//!
//! `z` marks the number of parts and `q` marks the size of whatever the
//! series enumerates. Since every part is at least one, the exponent of `z`
//! never exceeds the exponent of `q`, and coefficients are kept in a dense
//! triangle `rows[q][z]` with `z <= q`. Coefficients are arbitrary-precision
//! integers; every denominator that shows up in this crate has constant term
//! one, so inverses never leave the integers.
//!
//! A series carries its truncation order `N`: coefficients of `q^e` with
//! `e > N` are unknown and never stored. Binary operations on series of
//! different orders truncate to the smaller order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has constant term {0}, expected 1")]
    NonUnitSeries(BigInt),
    #[error("q-exponent {requested} exceeds truncation order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("term z^{z_exp} q^{q_exp} lies outside the triangle |z_exp| <= q_exp")]
    NotTriangular { z_exp: i64, q_exp: usize },
    #[error("malformed series: {0}")]
    Malformed(String),
}

/// Triangular truncated series `sum c[z][q] z^z q^q` with `z <= q <= order`.
#[derive(Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    order: usize,
    rows: Vec<Vec<BigInt>>,
}

impl BivariateSeries {
    pub fn zero(order: usize) -> Self {
        let rows = (0..=order).map(|q| vec![BigInt::zero(); q + 1]).collect();
        Self { order, rows }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.rows[0][0] = BigInt::one();
        s
    }

    /// `coeff * z^z_exp * q^q_exp`, or zero if `q_exp` lies beyond `order`.
    pub fn monomial(
        coeff: impl Into<BigInt>,
        z_exp: usize,
        q_exp: usize,
        order: usize,
    ) -> Result<Self, SeriesError> {
        if z_exp > q_exp {
            return Err(SeriesError::NotTriangular { z_exp: z_exp as i64, q_exp });
        }
        let mut s = Self::zero(order);
        if q_exp <= order {
            s.rows[q_exp][z_exp] = coeff.into();
        }
        Ok(s)
    }

    /// Builds a series from `(z_exp, q_exp, coeff)` triples; repeated keys add up.
    pub fn from_terms<I>(order: usize, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut s = Self::zero(order);
        for (z, q, c) in terms {
            if z > q {
                return Err(SeriesError::NotTriangular { z_exp: z as i64, q_exp: q });
            }
            if q <= order {
                s.rows[q][z] += c;
            }
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, z_exp: usize, q_exp: usize) -> Result<BigInt, SeriesError> {
        if q_exp > self.order {
            return Err(SeriesError::OrderExceeded { requested: q_exp, order: self.order });
        }
        Ok(self.rows[q_exp].get(z_exp).cloned().unwrap_or_default())
    }

    pub(crate) fn get(&self, z_exp: usize, q_exp: usize) -> &BigInt {
        &self.rows[q_exp][z_exp]
    }

    /// Row of `q^q_exp` coefficients indexed by `z` exponent.
    pub fn row(&self, q_exp: usize) -> &[BigInt] {
        &self.rows[q_exp]
    }

    /// Nonzero terms sorted by `(q_exp, z_exp)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.rows.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(z, c)| (z, q, c))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms().next().is_none()
    }

    /// Every stored coefficient satisfies `z_exp <= q_exp`.
    pub fn is_triangular(&self) -> bool {
        self.rows.len() == self.order + 1
            && self.rows.iter().enumerate().all(|(q, row)| row.len() == q + 1)
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self { order, rows: self.rows[..=order].to_vec() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|x| x * c).collect())
            .collect();
        Self { order: self.order, rows }
    }

    /// Multiplies by `z^z_exp q^q_exp`; needs `z_exp <= q_exp` to stay triangular.
    pub fn shift(&self, z_exp: usize, q_exp: usize, order: usize) -> Result<Self, SeriesError> {
        if z_exp > q_exp {
            return Err(SeriesError::NotTriangular { z_exp: z_exp as i64, q_exp });
        }
        let order = order.min(self.order + q_exp);
        let mut out = Self::zero(order);
        for q in q_exp..=order {
            let src = &self.rows[q - q_exp];
            out.rows[q][z_exp..z_exp + src.len()].clone_from_slice(src);
        }
        Ok(out)
    }

    /// Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(order);
        for (q1, row1) in self.rows.iter().enumerate().take(order + 1) {
            for (z1, a) in row1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for q2 in 0..=order - q1 {
                    let target = &mut out.rows[q1 + q2];
                    for (z2, b) in other.rows[q2].iter().enumerate() {
                        if !b.is_zero() {
                            target[z1 + z2] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse of a series with constant term one.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let c0 = &self.rows[0][0];
        if !c0.is_one() {
            return Err(SeriesError::NonUnitSeries(c0.clone()));
        }
        let order = self.order;
        let mut out = Self::zero(order);
        out.rows[0][0] = BigInt::one();
        for q in 1..=order {
            for z in 0..=q {
                let mut acc = BigInt::zero();
                for q1 in 1..=q {
                    let q2 = q - q1;
                    for (z1, a) in self.rows[q1].iter().enumerate().take(z + 1) {
                        let z2 = z - z1;
                        if z2 <= q2 && !a.is_zero() {
                            acc += a * &out.rows[q2][z2];
                        }
                    }
                }
                out.rows[q][z] = -acc;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Self::one(self.order);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = Self::mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = Self::mul(&base, &base);
            }
        }
        result
    }

    /// In-place multiplication by `1 + c z^z_exp q^q_exp` with `1 <= q_exp`.
    pub fn mul_binomial(&mut self, c: i64, z_exp: usize, q_exp: usize) {
        assert!(q_exp >= 1 && z_exp <= q_exp, "binomial factor must be triangular and nonconstant");
        let c = BigInt::from(c);
        for q in (q_exp..=self.order).rev() {
            let (lo, hi) = self.rows.split_at_mut(q);
            let src = &lo[q - q_exp];
            let dst = &mut hi[0];
            for (z, a) in src.iter().enumerate() {
                if !a.is_zero() {
                    dst[z + z_exp] += &c * a;
                }
            }
        }
    }

    /// In-place division by `1 + sum_j c_j z^a_j q^b_j` with every `b_j >= 1`.
    pub fn div_sparse_unit(&mut self, divisor: &[(i64, usize, usize)]) {
        for &(_, a, b) in divisor {
            assert!(b >= 1 && a <= b, "divisor terms must be triangular and nonconstant");
        }
        let divisor: Vec<(BigInt, usize, usize)> =
            divisor.iter().map(|&(c, a, b)| (BigInt::from(c), a, b)).collect();
        for q in 1..=self.order {
            let (lo, hi) = self.rows.split_at_mut(q);
            let dst = &mut hi[0];
            for (c, a, b) in &divisor {
                if *b > q {
                    continue;
                }
                for (z, x) in lo[q - b].iter().enumerate() {
                    if !x.is_zero() {
                        dst[z + a] -= c * x;
                    }
                }
            }
        }
    }

    /// Substitutes `z = 1`.
    pub fn set_z_one(&self) -> UnivariateSeries {
        UnivariateSeries::new(self.rows.iter().map(|row| row.iter().sum()).collect())
    }

    pub fn to_json(&self) -> String {
        let doc = SeriesDoc {
            order: self.order,
            z_offset: None,
            terms: self.terms().map(|(z, q, c)| (z as i64, q, c.to_string())).collect(),
        };
        serde_json::to_string(&doc).expect("series serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, SeriesError> {
        let doc: SeriesDoc =
            serde_json::from_str(text).map_err(|e| SeriesError::Malformed(e.to_string()))?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for (z, q, c) in doc.terms {
            let z = usize::try_from(z)
                .map_err(|_| SeriesError::NotTriangular { z_exp: z, q_exp: q })?;
            let c = c.parse::<BigInt>().map_err(|e| SeriesError::Malformed(e.to_string()))?;
            terms.push((z, q, c));
        }
        Self::from_terms(doc.order, terms)
    }
}

impl fmt::Debug for BivariateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(q^{})", self.order + 1)
    }
}

impl fmt::Display for BivariateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms().map(|(z, q, c)| (z as i64, q, c)))
    }
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i64, usize, &'a BigInt)>,
) -> fmt::Result {
    let mut first = true;
    for (z, q, c) in terms {
        let neg = c.sign() == num_bigint::Sign::Minus;
        let mag = if neg { -c } else { c.clone() };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let bare = z == 0 && q == 0;
        if !mag.is_one() || bare {
            write!(f, "{mag}")?;
        }
        match z {
            0 => {}
            1 => write!(f, "z")?,
            _ => write!(f, "z^{z}")?,
        }
        match q {
            0 => {}
            1 => write!(f, "q")?,
            _ => write!(f, "q^{q}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

macro_rules! forward_binop {
    ($ty:ty, $tr:ident, $method:ident, $body:expr) => {
        impl $tr<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                $body(self, rhs)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                $body(&self, rhs)
            }
        }
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                $body(&self, &rhs)
            }
        }
    };
}

fn zip_rows(a: &[Vec<BigInt>], b: &[Vec<BigInt>], order: usize, neg: bool) -> Vec<Vec<BigInt>> {
    (0..=order)
        .map(|q| {
            a[q].iter()
                .zip(&b[q])
                .map(|(x, y)| if neg { x - y } else { x + y })
                .collect()
        })
        .collect()
}

fn add_bivariate(a: &BivariateSeries, b: &BivariateSeries) -> BivariateSeries {
    let order = a.order.min(b.order);
    BivariateSeries { order, rows: zip_rows(&a.rows, &b.rows, order, false) }
}

fn sub_bivariate(a: &BivariateSeries, b: &BivariateSeries) -> BivariateSeries {
    let order = a.order.min(b.order);
    BivariateSeries { order, rows: zip_rows(&a.rows, &b.rows, order, true) }
}

forward_binop!(BivariateSeries, Add, add, add_bivariate);
forward_binop!(BivariateSeries, Sub, sub, sub_bivariate);
forward_binop!(BivariateSeries, Mul, mul, |a: &BivariateSeries, b: &BivariateSeries| a.mul(b));

impl Neg for &BivariateSeries {
    type Output = BivariateSeries;
    fn neg(self) -> BivariateSeries {
        self.scale(&BigInt::from(-1))
    }
}

/// Truncated series in `q` alone, produced by [`BivariateSeries::set_z_one`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariateSeries {
    coeffs: Vec<BigInt>,
}

impl UnivariateSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series has at least the constant term");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, q_exp: usize) -> Result<&BigInt, SeriesError> {
        self.coeffs
            .get(q_exp)
            .ok_or(SeriesError::OrderExceeded { requested: q_exp, order: self.order() })
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![BigInt::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }
}

/// Truncated series in `q` with Laurent polynomial coefficients in `z`,
/// restricted to `|z_exp| <= q_exp`.
///
/// Each row `q` stores `2q + 1` coefficients for `z_exp = -q ..= q`, so the
/// minimum representable `z` exponent over the whole series is `-order`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    order: usize,
    rows: Vec<Vec<BigInt>>,
}

impl LaurentSeries {
    pub fn zero(order: usize) -> Self {
        let rows = (0..=order).map(|q| vec![BigInt::zero(); 2 * q + 1]).collect();
        Self { order, rows }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.rows[0][0] = BigInt::one();
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Smallest `z` exponent the storage can hold.
    pub fn z_offset(&self) -> i64 {
        -(self.order as i64)
    }

    fn slot(z_exp: i64, q_exp: usize) -> Option<usize> {
        let idx = z_exp + q_exp as i64;
        (0..=2 * q_exp as i64).contains(&idx).then_some(idx as usize)
    }

    pub fn coeff(&self, z_exp: i64, q_exp: usize) -> Result<BigInt, SeriesError> {
        if q_exp > self.order {
            return Err(SeriesError::OrderExceeded { requested: q_exp, order: self.order });
        }
        Ok(Self::slot(z_exp, q_exp).map(|i| self.rows[q_exp][i].clone()).unwrap_or_default())
    }

    pub fn from_terms<I>(order: usize, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (i64, usize, BigInt)>,
    {
        let mut s = Self::zero(order);
        for (z, q, c) in terms {
            let slot = Self::slot(z, q).ok_or(SeriesError::NotTriangular { z_exp: z, q_exp: q })?;
            if q <= order {
                s.rows[q][slot] += c;
            }
        }
        Ok(s)
    }

    /// Nonzero terms sorted by `(q_exp, z_exp)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, usize, &BigInt)> + '_ {
        self.rows.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(i, c)| (i as i64 - q as i64, q, c))
        })
    }

    pub fn is_triangular(&self) -> bool {
        self.rows.len() == self.order + 1
            && self.rows.iter().enumerate().all(|(q, row)| row.len() == 2 * q + 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        Self { order, rows: zip_rows(&self.rows, &other.rows, order, false) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(order);
        for q1 in 0..=order {
            for (i1, a) in self.rows[q1].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for q2 in 0..=order - q1 {
                    let target = &mut out.rows[q1 + q2];
                    for (i2, b) in other.rows[q2].iter().enumerate() {
                        if !b.is_zero() {
                            // (i1 - q1) + (i2 - q2) + (q1 + q2) = i1 + i2
                            target[i1 + i2] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// In-place multiplication by `1 + c z^z_exp q^q_exp`.
    pub fn mul_binomial(&mut self, c: i64, z_exp: i64, q_exp: usize) {
        assert!(q_exp >= 1 && z_exp.unsigned_abs() as usize <= q_exp);
        let c = BigInt::from(c);
        for q in (q_exp..=self.order).rev() {
            let (lo, hi) = self.rows.split_at_mut(q);
            let src = &lo[q - q_exp];
            let dst = &mut hi[0];
            let base = q_exp as i64 + z_exp;
            for (i, a) in src.iter().enumerate() {
                if !a.is_zero() {
                    dst[(i as i64 + base) as usize] += &c * a;
                }
            }
        }
    }

    /// Multiplies by `z^z_exp q^q_exp`.
    pub fn shift(&self, z_exp: i64, q_exp: usize, order: usize) -> Result<Self, SeriesError> {
        if z_exp.unsigned_abs() as usize > q_exp {
            return Err(SeriesError::NotTriangular { z_exp, q_exp });
        }
        let order = order.min(self.order + q_exp);
        let mut out = Self::zero(order);
        for q in q_exp..=order {
            let base = (q_exp as i64 + z_exp) as usize;
            let src = &self.rows[q - q_exp];
            out.rows[q][base..base + src.len()].clone_from_slice(src);
        }
        Ok(out)
    }

    /// The substitution `z -> 1/z`.
    pub fn reflect(&self) -> Self {
        let rows = self.rows.iter().map(|row| row.iter().rev().cloned().collect()).collect();
        Self { order: self.order, rows }
    }

    pub fn set_z_one(&self) -> UnivariateSeries {
        UnivariateSeries::new(self.rows.iter().map(|row| row.iter().sum()).collect())
    }

    pub fn to_json(&self) -> String {
        let doc = SeriesDoc {
            order: self.order,
            z_offset: Some(self.z_offset()),
            terms: self.terms().map(|(z, q, c)| (z, q, c.to_string())).collect(),
        };
        serde_json::to_string(&doc).expect("series serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, SeriesError> {
        let doc: SeriesDoc =
            serde_json::from_str(text).map_err(|e| SeriesError::Malformed(e.to_string()))?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for (z, q, c) in doc.terms {
            let c = c.parse::<BigInt>().map_err(|e| SeriesError::Malformed(e.to_string()))?;
            terms.push((z, q, c));
        }
        Self::from_terms(doc.order, terms)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(q^{})", self.order + 1)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms())
    }
}

/// Wire format shared by both series types. `z_offset` is only written for
/// Laurent series.
#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    order: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    z_offset: Option<i64>,
    terms: Vec<(i64, usize, String)>,
}
