//! Dense exact matrices and the power-product constructions V(n,d),
//! V̂(n,d) and A_k(a,b).
//!
//! Entries are arbitrary-precision integers from the start: diagonal
//! entries of V(n,d) reach d^d, which overflows 64 bits already at
//! d = 16, and determinants overflow far earlier. There is no floating
//! point anywhere in this module. Storage is dense; the block structure
//! of V is exploited structurally (see `structure`), not representationally.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::compositions::{multinomial, ExponentSet, OrderTag};
use crate::error::{Error, Result};
use crate::numio;

/// Dense row-major matrix of arbitrary-precision integers. Matrices built
/// from an exponent set carry it along, so row/column identity survives
/// permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
    order_context: Option<ExponentSet>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
            order_context: None,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
            order_context: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
            order_context: None,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    /// The exponent set indexing this matrix, when it was built from one.
    pub fn order_context(&self) -> Option<&ExponentSet> {
        self.order_context.as_ref()
    }

    pub fn with_order_context(mut self, order: ExponentSet) -> Self {
        self.order_context = Some(order);
        self
    }

    pub fn transposed(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Submatrix on the given half-open row/column ranges.
    pub fn submatrix(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> IntMatrix {
        IntMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.at(rows.start + i, cols.start + j).clone()
        })
    }
}

/// Dense row-major matrix of exact rationals; used for inverses and
/// solve results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }
}

/// Raises an integer to a nonnegative power with the convention 0^0 = 1.
pub(crate) fn int_pow(base: &BigInt, exp: u32) -> BigInt {
    Pow::pow(base, u64::from(exp))
}

/// The scalar power-product of two exponent vectors:
/// `∏_k base_k ^ exp_k` with 0^0 = 1.
pub(crate) fn entry_power(base: &[u32], exp: &[u32]) -> BigInt {
    debug_assert_eq!(base.len(), exp.len());
    let mut prod = BigInt::one();
    for (&b, &e) in base.iter().zip(exp) {
        if e == 0 {
            continue; // x^0 = 1, including 0^0
        }
        if b == 0 {
            return BigInt::zero();
        }
        prod *= int_pow(&BigInt::from(b), e);
    }
    prod
}

/// Power-product of two matrices: matrix multiplication with the
/// entrywise multiply replaced by exponentiation and the sum by a
/// product, under the convention 0^0 = 1. The exponent matrix `b` must
/// have nonnegative entries.
pub fn power_product(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::dim(format!(
            "power_product of {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let m = a.cols();
    // exponents must be small nonnegative integers
    let mut exps = vec![0u32; b.rows() * b.cols()];
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            let e = b.at(i, j);
            if e.is_negative() {
                return Err(Error::NegativeExponent { row: i, col: j });
            }
            exps[i * b.cols() + j] = e
                .to_u32()
                .ok_or_else(|| Error::invalid(format!("exponent at ({i}, {j}) too large")))?;
        }
    }
    let mut out = IntMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut prod = BigInt::one();
            for k in 0..m {
                prod *= int_pow(a.at(i, k), exps[k * b.cols() + j]);
                if prod.is_zero() {
                    break;
                }
            }
            out.set(i, j, prod);
        }
    }
    Ok(out)
}

/// The square power-product matrix of an exponent set: entry (i, j) is
/// `(α^i)^(α^j) = ∏_k (α^i_k)^(α^j_k)` with 0^0 = 1.
pub fn power_product_matrix(set: &ExponentSet) -> IntMatrix {
    let s = set.len();
    let mut out = IntMatrix::zeros(s, s);
    for i in 0..s {
        let base = set.member(i).entries();
        for j in 0..s {
            out.set(i, j, entry_power(base, set.member(j).entries()));
        }
    }
    out.with_order_context(set.clone())
}

/// Builds V(n, d) over the given enumeration of B(n, d). The order must be
/// a complete enumeration; any permutation of it is accepted.
pub fn build_v(n: usize, d: u32, order: &ExponentSet) -> Result<IntMatrix> {
    order.check_enumerates_b(n, d)?;
    Ok(power_product_matrix(order))
}

/// Builds V̂(n, d): column j of V(n, d) scaled by the multinomial
/// coefficient of its indexing exponent.
pub fn build_vhat(n: usize, d: u32, order: &ExponentSet) -> Result<IntMatrix> {
    order.check_enumerates_b(n, d)?;
    let s = order.len();
    let scale: Vec<BigInt> = order
        .iter()
        .map(|alpha| multinomial(d, alpha).map(BigInt::from))
        .collect::<Result<Vec<_>>>()?;
    let mut out = power_product_matrix(order);
    for i in 0..s {
        for (j, m) in scale.iter().enumerate() {
            let v = out.at(i, j) * m;
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// The (k+1) x (k+1) matrix with 1-indexed (i, j) entry
/// `(a-i+1)^(k-j+1) · (b+i-1)^(j-1)`.
pub fn build_a(k: usize, a: i64, b: i64) -> IntMatrix {
    IntMatrix::from_fn(k + 1, k + 1, |i0, j0| {
        let (i, j) = (i0 as i64 + 1, j0 as i64 + 1);
        let left = int_pow(&BigInt::from(a - i + 1), (k as i64 - j + 1) as u32);
        let right = int_pow(&BigInt::from(b + i - 1), (j - 1) as u32);
        left * right
    })
}

/// JSON form of an exponent set: plain integer members plus the order tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSetJson {
    pub n: usize,
    pub d: u32,
    pub order: String,
    pub members: Vec<Vec<u32>>,
}

impl ExponentSetJson {
    pub fn from_set(set: &ExponentSet) -> Self {
        Self {
            n: set.n(),
            d: set.d(),
            order: set.order_tag().as_str().to_string(),
            members: set.iter().map(|m| m.entries().to_vec()).collect(),
        }
    }

    pub fn to_set(&self) -> Result<ExponentSet> {
        let members = self
            .members
            .iter()
            .map(|v| crate::compositions::Exponent::new(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        ExponentSet::from_members(
            self.n,
            self.d,
            members,
            OrderTag::from_str_tag(&self.order)?,
        )
    }
}

/// JSON form of an integer matrix. Entries are decimal strings so that no
/// consumer ever faces numeric overflow; round-trips are exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<ExponentSetJson>,
}

impl MatrixJson {
    pub fn from_matrix(m: &IntMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|e| e.to_string()).collect(),
            order: m.order_context().map(ExponentSetJson::from_set),
        }
    }

    pub fn to_matrix(&self) -> Result<IntMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|s| numio::int_from_str(s))
            .collect::<Result<Vec<_>>>()?;
        let mut m = IntMatrix::new(self.rows, self.cols, entries)?;
        if let Some(order) = &self.order {
            m = m.with_order_context(order.to_set()?);
        }
        Ok(m)
    }
}

/// Serializes a matrix to a JSON string.
pub fn matrix_to_json(m: &IntMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MatrixJson::from_matrix(m))?)
}

/// Parses a matrix from a JSON string.
pub fn matrix_from_json(s: &str) -> Result<IntMatrix> {
    let json: MatrixJson = serde_json::from_str(s)?;
    json.to_matrix()
}

/// CSV rendering: one row per line, decimal strings. Dimensions and order
/// metadata are not carried; use JSON when they matter.
pub fn matrix_to_csv(m: &IntMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|e| e.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parses a CSV matrix written by [`matrix_to_csv`].
pub fn matrix_from_csv(s: &str) -> Result<IntMatrix> {
    let mut entries = Vec::new();
    let mut rows = 0usize;
    let mut cols = None;
    for line in s.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<BigInt> = line
            .split(',')
            .map(numio::int_from_str)
            .collect::<Result<Vec<_>>>()?;
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(Error::parse(format!(
                    "row {rows} has {} fields, expected {c}",
                    fields.len()
                )))
            }
            _ => {}
        }
        entries.extend(fields);
        rows += 1;
    }
    IntMatrix::new(rows, cols.unwrap_or(0), entries)
}

/// The n x s integer matrix whose columns are the members of the set,
/// matching the column-vector presentation of B(n, d).
pub fn exponent_set_as_matrix(set: &ExponentSet) -> IntMatrix {
    IntMatrix::from_fn(set.n(), set.len(), |i, j| {
        BigInt::from(set.member(j).entries()[i])
    })
}
