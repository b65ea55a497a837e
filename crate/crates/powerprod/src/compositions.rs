//! Weak compositions, strict k-compositions, and the exponent sets that
//! index every power-product matrix.
//!
//! Enumeration is iterative (successor stepping in descending
//! lexicographic order), not recursive, so sets with 10^5 members pose no
//! stack problems and every run produces the same order bit-for-bit.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A vector of `n` nonnegative integers with positive sum `d`: one way of
/// putting `d` balls into `n` bins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent {
    entries: Vec<u32>,
}

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid(
                "exponent vector must have at least one entry",
            ));
        }
        let degree: u64 = entries.iter().map(|&e| u64::from(e)).sum();
        if degree == 0 {
            return Err(Error::invalid("exponent vector must have positive degree"));
        }
        if degree > u64::from(u32::MAX) {
            return Err(Error::invalid("exponent degree overflows u32"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Number of bins.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Sum of the entries.
    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// Number of nonzero entries (the zero norm).
    pub fn support_size(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    /// 0/1 indicator of the nonzero positions.
    pub fn support_pattern(&self) -> Vec<bool> {
        self.entries.iter().map(|&e| e != 0).collect()
    }

    /// True when every entry is positive (a strict composition).
    pub fn is_strict(&self) -> bool {
        self.entries.iter().all(|&e| e > 0)
    }
}

/// How the members of an [`ExponentSet`] are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderTag {
    /// Caller-supplied order, taken as given.
    Input,
    /// Descending lexicographic order (largest first coordinate first).
    Lex,
    /// Grouped by support size, each group sorted by the logically reverse
    /// lexicographic order; see the `structure` module.
    CanonicalBlock,
}

impl OrderTag {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderTag::Input => "input",
            OrderTag::Lex => "lex",
            OrderTag::CanonicalBlock => "canonical-block",
        }
    }

    pub fn from_str_tag(s: &str) -> Result<Self> {
        match s {
            "input" => Ok(OrderTag::Input),
            "lex" => Ok(OrderTag::Lex),
            "canonical-block" => Ok(OrderTag::CanonicalBlock),
            other => Err(Error::parse(format!("unknown order tag {other:?}"))),
        }
    }
}

/// An ordered, duplicate-free collection of exponent vectors sharing the
/// same length `n` and degree `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentSet {
    n: usize,
    d: u32,
    members: Vec<Exponent>,
    order_tag: OrderTag,
}

impl ExponentSet {
    /// Validates shape (uniform length and degree) and distinctness.
    pub fn from_members(
        n: usize,
        d: u32,
        members: Vec<Exponent>,
        order_tag: OrderTag,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid("exponent set needs n >= 1 and d >= 1"));
        }
        let mut seen: HashSet<&[u32]> = HashSet::with_capacity(members.len());
        for m in &members {
            if m.n() != n {
                return Err(Error::dim(format!(
                    "member {:?} has length {}, expected {n}",
                    m.entries(),
                    m.n()
                )));
            }
            if m.degree() != d {
                return Err(Error::invalid(format!(
                    "member {:?} has degree {}, expected {d}",
                    m.entries(),
                    m.degree()
                )));
            }
            if !seen.insert(m.entries()) {
                return Err(Error::invalid(format!(
                    "duplicate member {:?}",
                    m.entries()
                )));
            }
        }
        Ok(Self {
            n,
            d,
            members,
            order_tag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn order_tag(&self) -> OrderTag {
        self.order_tag
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Exponent] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Exponent {
        &self.members[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Exponent> {
        self.members.iter()
    }

    /// Index of a member by its entries, or `None` if absent.
    pub fn position(&self, entries: &[u32]) -> Option<usize> {
        self.members.iter().position(|m| m.entries() == entries)
    }

    /// Checks that this set is a full enumeration of all weak compositions
    /// of `d` into `n` parts. Shape and distinctness are constructor
    /// invariants, so matching the counting formula settles completeness.
    pub fn check_enumerates_b(&self, n: usize, d: u32) -> Result<()> {
        if self.n != n || self.d != d {
            return Err(Error::invalid(format!(
                "set is over (n, d) = ({}, {}), expected ({n}, {d})",
                self.n, self.d
            )));
        }
        let expected = count_weak_compositions(n, d)?;
        if BigUint::from(self.len()) != expected {
            return Err(Error::invalid(format!(
                "set has {} members, a full enumeration of B({n},{d}) has {expected}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Same members under a different tag; used after sorting.
    pub(crate) fn with_order(self, members: Vec<Exponent>, order_tag: OrderTag) -> Self {
        Self {
            members,
            order_tag,
            ..self
        }
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        // exact at every step: i consecutive integers contain a multiple of i
        acc = acc * BigUint::from(n - k + i) / BigUint::from(i);
    }
    acc
}

/// Exact factorial.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// Number of weak compositions of `d` into `n` parts: C(d+n-1, d).
pub fn count_weak_compositions(n: usize, d: u32) -> Result<BigUint> {
    if n == 0 || d == 0 {
        return Err(Error::invalid(
            "count_weak_compositions needs n >= 1 and d >= 1",
        ));
    }
    Ok(binomial(u64::from(d) + n as u64 - 1, u64::from(d)))
}

/// All vectors in N^n with entry sum `total`, in descending lexicographic
/// order, produced by iterative successor stepping. `total = 0` yields the
/// single all-zero vector.
fn weak_composition_vectors(n: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    cur[0] = total;
    loop {
        out.push(cur.clone());
        // successor: decrement the rightmost movable entry, dump everything
        // to its right (plus one) into the next position
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] > 0) else {
            break;
        };
        cur[i] -= 1;
        let moved: u32 = cur[i + 1..].iter().sum::<u32>() + 1;
        cur[i + 1..].iter_mut().for_each(|e| *e = 0);
        cur[i + 1] = moved;
    }
    out
}

/// Enumerates B(n, d): every weak composition of `d` into `n` parts, in
/// descending lexicographic order.
pub fn enumerate_b(n: usize, d: u32) -> Result<ExponentSet> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("enumerate_b needs n >= 1 and d >= 1"));
    }
    let members = weak_composition_vectors(n, d)
        .into_iter()
        .map(Exponent::new)
        .collect::<Result<Vec<_>>>()?;
    let set = ExponentSet::from_members(n, d, members, OrderTag::Lex)?;
    set.check_enumerates_b(n, d)?;
    Ok(set)
}

/// Enumerates all strict k-compositions of `d` (vectors of `k` positive
/// integers summing to `d`), in descending lexicographic order. There are
/// C(d-1, k-1) of them.
pub fn enumerate_k_compositions(d: u32, k: usize) -> Result<ExponentSet> {
    if k == 0 {
        return Err(Error::invalid("enumerate_k_compositions needs k >= 1"));
    }
    if (k as u64) > u64::from(d) {
        return Err(Error::invalid(format!(
            "no composition of {d} into {k} positive parts"
        )));
    }
    // strict compositions of d into k parts = weak compositions of d-k,
    // shifted up by one in every coordinate; the shift preserves the order
    let members = weak_composition_vectors(k, d - k as u32)
        .into_iter()
        .map(|mut v| {
            v.iter_mut().for_each(|e| *e += 1);
            Exponent::new(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let set = ExponentSet::from_members(k, d, members, OrderTag::Lex)?;
    let expected = binomial(u64::from(d) - 1, k as u64 - 1);
    if BigUint::from(set.len()) != expected {
        return Err(Error::bug(format!(
            "enumerated {} {k}-compositions of {d}, expected {expected}",
            set.len()
        )));
    }
    Ok(set)
}

/// Exact multinomial coefficient d! / (α_1! α_2! ⋯ α_n!).
pub fn multinomial(d: u32, alpha: &Exponent) -> Result<BigUint> {
    if alpha.degree() != d {
        return Err(Error::invalid(format!(
            "multinomial requires |alpha| = d, got |{:?}| = {} with d = {d}",
            alpha.entries(),
            alpha.degree()
        )));
    }
    let mut acc = factorial(u64::from(d));
    for &e in alpha.entries() {
        acc /= factorial(u64::from(e));
    }
    Ok(acc)
}
