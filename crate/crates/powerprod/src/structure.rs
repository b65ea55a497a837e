//! Support-based ordering and block structure of V(n,d), plus the
//! closed-form sparsity counts.
//!
//! Under the canonical block order (group members of B(n,d) by support
//! size, sort each group by the logically reverse lexicographic order)
//! V(n,d) becomes block lower triangular, and the diagonal blocks within
//! one support-size group are all equal to the power-product matrix of the
//! k-compositions of d.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::basis::solve_block_lower;
use crate::compositions::{
    binomial, count_weak_compositions, enumerate_b, enumerate_k_compositions, Exponent,
    ExponentSet, OrderTag,
};
use crate::error::{Error, Result};
use crate::matrix::{power_product_matrix, IntMatrix, RatMatrix};
use crate::numio;
use crate::report::SuiteReport;

/// Core comparison on equal-length slices. Support indicators are compared
/// first: at the first position where the indicators differ, the vector
/// with a nonzero entry there is smaller. With equal indicators, the
/// vector with the larger entry at the first differing position is
/// smaller. Total on any duplicate-free set of equal-length vectors.
fn lrlex_cmp_entries(a: &[u32], b: &[u32]) -> Ordering {
    for (&x, &y) in a.iter().zip(b) {
        let (lx, ly) = (x != 0, y != 0);
        if lx != ly {
            return if lx {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
    }
    for (&x, &y) in a.iter().zip(b) {
        if x != y {
            return if x > y {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
    }
    Ordering::Equal
}

/// Logically reverse lexicographic comparison of two exponent vectors.
pub fn lrlex_compare(a: &Exponent, b: &Exponent) -> Result<Ordering> {
    if a.n() != b.n() {
        return Err(Error::dim(format!(
            "lrlex_compare on lengths {} and {}",
            a.n(),
            b.n()
        )));
    }
    Ok(lrlex_cmp_entries(a.entries(), b.entries()))
}

/// Canonical block order: support size ascending, then lrlex inside each
/// support-size group. Members with the same support pattern end up
/// contiguous; that is asserted, not assumed, so an ordering bug fails
/// loudly.
pub fn canonical_block_order(b: &ExponentSet) -> Result<ExponentSet> {
    b.check_enumerates_b(b.n(), b.d())?;
    let mut members: Vec<Exponent> = b.members().to_vec();
    members.sort_by(|x, y| {
        x.support_size()
            .cmp(&y.support_size())
            .then_with(|| lrlex_cmp_entries(x.entries(), y.entries()))
    });

    // every support pattern must form a single contiguous run
    let mut finished: HashSet<Vec<bool>> = HashSet::new();
    let mut current: Option<Vec<bool>> = None;
    for m in &members {
        let pat = m.support_pattern();
        if current.as_ref() != Some(&pat) {
            if let Some(prev) = current.take() {
                finished.insert(prev);
            }
            if finished.contains(&pat) {
                return Err(Error::bug(format!(
                    "support pattern {pat:?} split across non-adjacent runs"
                )));
            }
            current = Some(pat);
        }
    }
    Ok(b.clone().with_order(members, OrderTag::CanonicalBlock))
}

/// One support-size group of the decomposition: the shared diagonal block
/// and how many times it repeats.
#[derive(Debug, Clone)]
pub struct BlockGroup {
    /// Support size k of every member in the group.
    pub support_size: usize,
    /// Number of identical diagonal blocks in the group: C(n, k).
    pub multiplicity: u64,
    /// The k-compositions of d indexing the block.
    pub compositions: ExponentSet,
    /// Power-product matrix of those k-compositions, side C(d-1, k-1).
    pub block: IntMatrix,
}

impl BlockGroup {
    pub fn side(&self) -> usize {
        self.block.rows()
    }
}

/// Block lower-triangular presentation of V(n,d): the permutation taking
/// the descending-lex enumeration to the canonical block order, and the
/// diagonal blocks with multiplicities.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    n: usize,
    d: u32,
    /// min(n, d): the number of distinct support sizes.
    pub p: usize,
    /// B(n,d) in canonical block order.
    pub canonical: ExponentSet,
    /// `canonical[t] = lex[permutation[t]]` where `lex` is `enumerate_b(n, d)`.
    pub permutation: Vec<usize>,
    pub groups: Vec<BlockGroup>,
}

impl BlockDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Sides of all diagonal blocks in order (each group's block repeated
    /// by its multiplicity).
    pub fn diagonal_sides(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for g in &self.groups {
            for _ in 0..g.multiplicity {
                out.push(g.side());
            }
        }
        out
    }

    /// (start, length) of each diagonal block along the canonical order.
    pub fn diagonal_ranges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for side in self.diagonal_sides() {
            out.push((start, side));
            start += side;
        }
        out
    }
}

/// Computes the canonical order, permutation and diagonal blocks without
/// materializing V(n,d). The diagonal blocks only depend on d and the
/// support size, so this stays cheap even when s_{n,d} is large.
pub fn block_layout(n: usize, d: u32) -> Result<BlockDecomposition> {
    let lex = enumerate_b(n, d)?;
    let canonical = canonical_block_order(&lex)?;
    let mut pos = std::collections::HashMap::with_capacity(lex.len());
    for (i, m) in lex.iter().enumerate() {
        pos.insert(m.entries(), i);
    }
    let permutation: Vec<usize> = canonical.iter().map(|m| pos[m.entries()]).collect();

    let p = n.min(d as usize);
    let mut groups = Vec::with_capacity(p);
    let mut covered = 0usize;
    for k in 1..=p {
        let compositions = enumerate_k_compositions(d, k)?;
        let block = power_product_matrix(&compositions);
        let multiplicity = binomial(n as u64, k as u64)
            .to_u64()
            .ok_or_else(|| Error::invalid(format!("C({n},{k}) exceeds u64")))?;
        covered += multiplicity as usize * block.rows();
        groups.push(BlockGroup {
            support_size: k,
            multiplicity,
            compositions,
            block,
        });
    }
    if covered != canonical.len() {
        return Err(Error::bug(format!(
            "blocks cover {covered} rows, expected {}",
            canonical.len()
        )));
    }
    Ok(BlockDecomposition {
        n,
        d,
        p,
        canonical,
        permutation,
        groups,
    })
}

/// Computes the decomposition and verifies it against the materialized
/// matrix: every entry strictly above the diagonal blocks is zero, and
/// every diagonal block equals its group's reference block entrywise.
pub fn block_decompose(n: usize, d: u32) -> Result<BlockDecomposition> {
    let layout = block_layout(n, d)?;
    let v = power_product_matrix(&layout.canonical);
    let ranges = layout.diagonal_ranges();

    // strict upper part vanishes at block granularity
    for (bi, &(ri, li)) in ranges.iter().enumerate() {
        for &(rj, lj) in ranges.iter().skip(bi + 1) {
            for i in ri..ri + li {
                for j in rj..rj + lj {
                    if !v.at(i, j).is_zero() {
                        return Err(Error::bug(format!(
                            "nonzero entry above the block diagonal at ({i}, {j}) for (n, d) = ({n}, {d})"
                        )));
                    }
                }
            }
        }
    }

    // each diagonal block matches the group's reference block
    let mut range_iter = ranges.iter();
    for g in &layout.groups {
        for _ in 0..g.multiplicity {
            let &(start, len) = range_iter.next().expect("ranges cover all groups");
            debug_assert_eq!(len, g.side());
            for i in 0..len {
                for j in 0..len {
                    if v.at(start + i, start + j) != g.block.at(i, j) {
                        return Err(Error::bug(format!(
                            "diagonal block at offset {start} disagrees with the \
                             {}-composition block at ({i}, {j}) for (n, d) = ({n}, {d})",
                            g.support_size
                        )));
                    }
                }
            }
        }
    }
    Ok(layout)
}

/// Closed-form nonzero count of V(n,d):
/// sum over k of C(n,k) · C(d-1,k-1) · C(d+k-1,d).
pub fn nnz_formula(n: usize, d: u32) -> Result<BigUint> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("nnz_formula needs n >= 1 and d >= 1"));
    }
    let (n64, d64) = (n as u64, u64::from(d));
    let mut total = BigUint::zero();
    for k in 1..=n64.min(d64) {
        total += binomial(n64, k) * binomial(d64 - 1, k - 1) * binomial(d64 + k - 1, d64);
    }
    Ok(total)
}

/// Exact sparsity of V(n,d): 1 - nnz / s_{n,d}^2.
pub fn sparsity(n: usize, d: u32) -> Result<BigRational> {
    let nnz = BigInt::from(nnz_formula(n, d)?);
    let s = BigInt::from(count_weak_compositions(n, d)?);
    Ok(BigRational::one() - BigRational::new(nnz, &s * &s))
}

/// Number of nonzero entries of a materialized matrix.
pub fn nnz_count(m: &IntMatrix) -> u64 {
    m.entries().iter().filter(|e| !e.is_zero()).count() as u64
}

/// Nonzero count of V(n,d) by evaluating every entry, streaming one row at
/// a time instead of materializing the matrix. Entries are bounded by d^d,
/// so the per-entry product runs in u128 for any desk-scale d.
pub fn nnz_count_v(n: usize, d: u32) -> Result<u64> {
    if d > 20 {
        return Err(Error::invalid(
            "nnz_count_v supports d <= 20 (entries bounded by d^d)",
        ));
    }
    let set = enumerate_b(n, d)?;
    let members: Vec<&[u32]> = set.iter().map(|m| m.entries()).collect();
    let mut count = 0u64;
    for base in &members {
        for exps in &members {
            let mut prod: u128 = 1;
            for (&b, &e) in base.iter().zip(exps.iter()) {
                if e == 0 {
                    continue; // x^0 = 1, including 0^0
                }
                if b == 0 {
                    prod = 0;
                    break;
                }
                for _ in 0..e {
                    prod *= u128::from(b);
                }
            }
            if prod != 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Result of checking that the inverse vanishes wherever V does.
#[derive(Debug, Clone)]
pub struct InversePatternReport {
    pub n: usize,
    pub d: u32,
    pub side: usize,
    pub holds: bool,
    /// Position (row, column) in the canonical order where V is zero but
    /// the inverse is not, when the containment fails.
    pub counterexample: Option<(usize, usize)>,
}

/// Inverts V(n,d) exactly over the rationals (block forward substitution
/// along the canonical order) and checks support(V^-1) ⊆ support(V).
pub fn inverse_pattern_check(n: usize, d: u32, size_cap: usize) -> Result<InversePatternReport> {
    let s_big = count_weak_compositions(n, d)?;
    let side = s_big
        .to_usize()
        .filter(|&s| s <= size_cap)
        .ok_or(Error::SizeCapExceeded {
            side: s_big.to_string(),
            cap: size_cap,
        })?;

    let layout = block_layout(n, d)?;
    let v = power_product_matrix(&layout.canonical);
    let ranges = layout.diagonal_ranges();

    let mut inverse = RatMatrix::zeros(side, side);
    let mut rhs = vec![BigRational::zero(); side];
    for j in 0..side {
        rhs[j] = BigRational::one();
        let col = solve_block_lower(&v, &ranges, &rhs)?;
        rhs[j] = BigRational::zero();
        for (i, value) in col.into_iter().enumerate() {
            inverse.set(i, j, value);
        }
    }

    for i in 0..side {
        for j in 0..side {
            if v.at(i, j).is_zero() && !inverse.at(i, j).is_zero() {
                return Ok(InversePatternReport {
                    n,
                    d,
                    side,
                    holds: false,
                    counterexample: Some((i, j)),
                });
            }
        }
    }
    Ok(InversePatternReport {
        n,
        d,
        side,
        holds: true,
        counterexample: None,
    })
}

/// One row of a sparsity table.
#[derive(Debug, Clone)]
pub struct SparsityRow {
    pub n: usize,
    pub d: u32,
    pub nnz: BigUint,
    pub s: BigUint,
    pub sparsity: BigRational,
}

/// JSON form of a sparsity row: counts as decimal strings, sparsity both
/// as an exact fraction and as a 6-place decimal.
#[derive(Debug, Clone, Serialize)]
pub struct SparsityRowJson {
    pub n: usize,
    pub d: u32,
    pub nnz: String,
    pub s: String,
    pub sparsity: String,
    pub sparsity_decimal: String,
}

impl From<&SparsityRow> for SparsityRowJson {
    fn from(r: &SparsityRow) -> Self {
        Self {
            n: r.n,
            d: r.d,
            nnz: r.nnz.to_string(),
            s: r.s.to_string(),
            sparsity: numio::rat_to_string(&r.sparsity),
            sparsity_decimal: numio::rat_to_decimal(&r.sparsity, 6),
        }
    }
}

pub fn sparsity_row(n: usize, d: u32) -> Result<SparsityRow> {
    Ok(SparsityRow {
        n,
        d,
        nnz: nnz_formula(n, d)?,
        s: count_weak_compositions(n, d)?,
        sparsity: sparsity(n, d)?,
    })
}

/// Grid of exact sparsities over inclusive ranges, row-major in (n, d).
pub fn sparsity_table(
    n_range: std::ops::RangeInclusive<usize>,
    d_range: std::ops::RangeInclusive<u32>,
) -> Result<Vec<SparsityRow>> {
    if n_range.is_empty() || d_range.is_empty() {
        return Err(Error::invalid("sparsity_table needs nonempty ranges"));
    }
    let mut rows = Vec::new();
    for n in n_range {
        for d in d_range.clone() {
            rows.push(sparsity_row(n, d)?);
        }
    }
    Ok(rows)
}

/// CSV rendering of a sparsity table with header
/// `n,d,nnz,s,sparsity,sparsity_exact`.
pub fn sparsity_table_csv(rows: &[SparsityRow]) -> String {
    let mut out = String::from("n,d,nnz,s,sparsity,sparsity_exact\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.d,
            r.nnz,
            r.s,
            numio::rat_to_decimal(&r.sparsity, 6),
            numio::rat_to_string(&r.sparsity),
        ));
    }
    out
}

/// Verified block decomposition over a sweep of (n, d).
pub fn sweep_blocks(n_max: usize, d_max: u32) -> SuiteReport {
    let mut checked = 0u64;
    for n in 1..=n_max {
        for d in 1..=d_max {
            match block_decompose(n, d) {
                Ok(_) => checked += 1,
                Err(e) => {
                    return SuiteReport::fail(
                        "blocks",
                        format!("n <= {n_max}, d <= {d_max}"),
                        checked,
                        format!("(n, d) = ({n}, {d}): {e}"),
                    )
                }
            }
        }
    }
    SuiteReport::pass("blocks", format!("n <= {n_max}, d <= {d_max}"), checked)
}

/// Closed-form nonzero count vs direct entry count over a sweep of (n, d).
pub fn sweep_sparsity(n_max: usize, d_max: u32) -> SuiteReport {
    let mut checked = 0u64;
    for n in 1..=n_max {
        for d in 1..=d_max {
            let outcome = nnz_formula(n, d).and_then(|formula| {
                let direct = nnz_count_v(n, d)?;
                if BigUint::from(direct) == formula {
                    Ok(())
                } else {
                    Err(Error::bug(format!(
                        "formula {formula} vs direct count {direct}"
                    )))
                }
            });
            match outcome {
                Ok(()) => checked += 1,
                Err(e) => {
                    return SuiteReport::fail(
                        "sparsity",
                        format!("n <= {n_max}, d <= {d_max}"),
                        checked,
                        format!("(n, d) = ({n}, {d}): {e}"),
                    )
                }
            }
        }
    }
    SuiteReport::pass("sparsity", format!("n <= {n_max}, d <= {d_max}"), checked)
}

/// Inverse support containment over a sweep of (n, d).
pub fn sweep_inverse_pattern(n_max: usize, d_max: u32, size_cap: usize) -> SuiteReport {
    let mut checked = 0u64;
    for n in 1..=n_max {
        for d in 1..=d_max {
            match inverse_pattern_check(n, d, size_cap) {
                Ok(rep) if rep.holds => checked += 1,
                Ok(rep) => {
                    return SuiteReport::fail(
                        "inverse-sparsity",
                        format!("n <= {n_max}, d <= {d_max}"),
                        checked,
                        format!(
                            "(n, d) = ({n}, {d}): inverse nonzero where V is zero at {:?}",
                            rep.counterexample
                        ),
                    )
                }
                Err(e) => {
                    return SuiteReport::fail(
                        "inverse-sparsity",
                        format!("n <= {n_max}, d <= {d_max}"),
                        checked,
                        format!("(n, d) = ({n}, {d}): {e}"),
                    )
                }
            }
        }
    }
    SuiteReport::pass(
        "inverse-sparsity",
        format!("n <= {n_max}, d <= {d_max}"),
        checked,
    )
}
