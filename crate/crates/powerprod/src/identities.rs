//! Brute-force verification of the combinatorial machinery behind the
//! nonsingularity results: the generating-function identity for signless
//! Stirling numbers, the rearrangement identity, weighted couple
//! enumeration, a sign-reversing involution, and the delta identity.
//!
//! Everything is evaluated in exact rational arithmetic over explicit
//! enumerations; nothing is sampled. The involution is implemented
//! literally, case by case, as constructed — when a case produces an
//! object outside the couple set, that is reported as a failure, not
//! silently patched.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::compositions::{binomial, enumerate_k_compositions, factorial};
use crate::error::{Error, Result};
use crate::matrix::int_pow;
use crate::report::SuiteReport;

/// Signless Stirling numbers of the first kind via the recurrence
/// c(m, k) = c(m-1, k-1) + (m-1)·c(m-1, k) with c(0, 0) = 1.
pub fn signless_stirling(m: usize, k: usize) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let mut row = vec![BigUint::zero(); m + 1];
    row[0] = BigUint::one();
    for i in 1..=m {
        for j in (1..=i.min(k.max(1))).rev() {
            let carry = row[j - 1].clone();
            row[j] = carry + BigUint::from(i as u64 - 1) * &row[j];
        }
        row[0] = &row[0] * BigUint::from(i as u64 - 1);
    }
    row[k].clone()
}

/// Positive-part compositions of `total` into `parts` parts, as plain
/// vectors. `parts = 0` yields one empty composition when `total = 0` and
/// none otherwise.
fn strict_compositions(total: u32, parts: usize) -> Result<Vec<Vec<u32>>> {
    if parts == 0 {
        return Ok(if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        });
    }
    if (parts as u64) > u64::from(total) {
        return Ok(Vec::new());
    }
    Ok(enumerate_k_compositions(total, parts)?
        .iter()
        .map(|e| e.entries().to_vec())
        .collect())
}

fn rational(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Checks the generating-function identity
/// `Σ_{k=0}^{m} Σ_{a⊨m, k positive parts} (-n)^k / (k!·a_1⋯a_k)
///  = (-1)^m · C(n, m)` for n > m ≥ 0.
pub fn verify_gf_identity(m: usize, n: u64) -> Result<bool> {
    if n <= m as u64 {
        return Err(Error::invalid(format!("needs n > m, got n = {n}, m = {m}")));
    }
    let mut lhs = BigRational::zero();
    for k in 0..=m {
        let minus_n_pow = int_pow(&BigInt::from(-(n as i64)), k as u32);
        for a in strict_compositions(m as u32, k)? {
            let mut den = BigInt::from(factorial(k as u64));
            for &ai in &a {
                den *= BigInt::from(ai);
            }
            lhs += rational(minus_n_pow.clone(), den);
        }
    }
    let mut rhs = BigRational::from_integer(BigInt::from(binomial(n, m as u64)));
    if m % 2 == 1 {
        rhs = -rhs;
    }
    Ok(lhs == rhs)
}

fn validate_b(n: usize, b: &[u32]) -> Result<usize> {
    let r = b.len();
    if r == 0 || r > n {
        return Err(Error::invalid(format!(
            "needs 1 <= r <= n, got r = {r}, n = {n}"
        )));
    }
    if b.contains(&0) {
        return Err(Error::invalid("entries of b must be positive".to_string()));
    }
    if b.iter().map(|&bi| u64::from(bi)).sum::<u64>() != n as u64 {
        return Err(Error::invalid(format!("entries of b must sum to n = {n}")));
    }
    Ok(r)
}

/// The weighted composition sum appearing on the left of both the
/// rearrangement and the delta identities:
/// `Σ_{k=r}^{n} Σ_{a⊨n,k} (-1)^{n-k} (n-k)! C(n-r,k-r) a_1^{b_1}⋯a_r^{b_r}
///  / (n! n^{n-k} a_1⋯a_k)`.
fn weighted_composition_sum(n: usize, b: &[u32]) -> Result<BigRational> {
    let r = validate_b(n, b)?;
    let n_fact = BigInt::from(factorial(n as u64));
    let n_int = BigInt::from(n as u64);
    let mut acc = BigRational::zero();
    for k in r..=n {
        let choose = BigInt::from(binomial((n - r) as u64, (k - r) as u64));
        if choose.is_zero() {
            continue;
        }
        let sign_neg = (n - k) % 2 == 1;
        let scale = BigInt::from(factorial((n - k) as u64)) * &choose;
        let pow_n = int_pow(&n_int, (n - k) as u32);
        for a in strict_compositions(n as u32, k)? {
            let mut num = scale.clone();
            for (i, &bi) in b.iter().enumerate() {
                num *= int_pow(&BigInt::from(a[i]), bi);
            }
            if sign_neg {
                num = -num;
            }
            let mut den = &n_fact * &pow_n;
            for &ai in &a {
                den *= BigInt::from(ai);
            }
            acc += rational(num, den);
        }
    }
    Ok(acc)
}

/// `Σ_{a⊨s into r positive parts} a_1^{b_1-1} ⋯ a_r^{b_r-1}`.
fn shifted_power_sum(s: usize, b: &[u32]) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for a in strict_compositions(s as u32, b.len())? {
        let mut term = BigInt::one();
        for (i, &bi) in b.iter().enumerate() {
            term *= int_pow(&BigInt::from(a[i]), bi - 1);
        }
        total += term;
    }
    Ok(total)
}

/// The alternating binomial sum `Σ_{s=r}^{n} (-1)^s C(n,s) ·
/// shifted_power_sum(s, b)`; couples are counted against this value.
pub fn alternating_couple_sum(n: usize, b: &[u32]) -> Result<BigInt> {
    let r = validate_b(n, b)?;
    let mut total = BigInt::zero();
    for s in r..=n {
        let mut term = BigInt::from(binomial(n as u64, s as u64)) * shifted_power_sum(s, b)?;
        if s % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    Ok(total)
}

/// Checks the rearrangement identity: the weighted composition sum equals
/// `(-1)^r (n-r)! / (n! n^{n-r})` times the alternating binomial sum.
pub fn verify_rearrangement(n: usize, b: &[u32]) -> Result<bool> {
    let r = validate_b(n, b)?;
    let lhs = weighted_composition_sum(n, b)?;
    let mut num = BigInt::from(factorial((n - r) as u64));
    if r % 2 == 1 {
        num = -num;
    }
    let den = BigInt::from(factorial(n as u64)) * int_pow(&BigInt::from(n as u64), (n - r) as u32);
    let rhs = rational(num, den) * BigRational::from_integer(alternating_couple_sum(n, b)?);
    Ok(lhs == rhs)
}

/// Checks the delta identity: the multinomial coefficient of b times the
/// weighted composition sum is 1 when r = n and 0 otherwise.
pub fn verify_delta_identity(n: usize, b: &[u32]) -> Result<bool> {
    let r = validate_b(n, b)?;
    let mut multinom = BigInt::from(factorial(n as u64));
    for &bi in b {
        multinom /= BigInt::from(factorial(u64::from(bi)));
    }
    let value = BigRational::from_integer(multinom) * weighted_composition_sum(n, b)?;
    let expect = if r == n {
        BigRational::one()
    } else {
        BigRational::zero()
    };
    Ok(value == expect)
}

/// A subset S of {1..n} with a placement vector θ ∈ S^n subject to the
/// prefix-sum constraints of a fixed composition b of n; weighted by
/// (-1)^|S|.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Couple {
    /// Sorted ascending, 1-based.
    pub subset: Vec<usize>,
    /// θ_1..θ_n, values drawn from `subset`.
    pub theta: Vec<usize>,
}

impl Couple {
    pub fn weight(&self) -> i64 {
        if self.subset.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

fn prefix_sums(b: &[u32]) -> Vec<usize> {
    let mut acc = 0usize;
    b.iter()
        .map(|&bi| {
            acc += bi as usize;
            acc
        })
        .collect()
}

/// The defining constraints: θ ∈ S^n, θ_n = max S, and at every prefix
/// sum c of b, θ_c ≥ θ_k for all k < c while θ_c < θ_k for all k > c.
pub fn couple_satisfies_constraints(n: usize, b: &[u32], c: &Couple) -> Result<bool> {
    validate_b(n, b)?;
    if c.subset.is_empty() || c.theta.len() != n {
        return Ok(false);
    }
    if c.subset.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(false);
    }
    if *c.subset.first().unwrap() < 1 || *c.subset.last().unwrap() > n {
        return Ok(false);
    }
    let in_subset: HashSet<usize> = c.subset.iter().copied().collect();
    if c.theta.iter().any(|t| !in_subset.contains(t)) {
        return Ok(false);
    }
    if c.theta[n - 1] != *c.subset.last().unwrap() {
        return Ok(false);
    }
    for cj in prefix_sums(b) {
        let pivot = c.theta[cj - 1];
        if c.theta[..cj - 1].iter().any(|&t| pivot < t) {
            return Ok(false);
        }
        if c.theta[cj..].iter().any(|&t| pivot >= t) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumerates every couple for the composition b (requires n > r so the
/// weighted sum is a genuine cancellation statement). Deterministic:
/// subsets ascend as bitmasks, placements ascend as odometers.
pub fn enumerate_couples(n: usize, b: &[u32]) -> Result<Vec<Couple>> {
    let r = validate_b(n, b)?;
    if r >= n {
        return Err(Error::invalid(format!("needs n > r, got n = {n}, r = {r}")));
    }
    if n > 20 {
        // 2^n subsets with up to n^n placements each; anything near this
        // bound is intractable to enumerate anyway
        return Err(Error::invalid("couple enumeration supports n <= 20"));
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let subset: Vec<usize> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| i + 1)
            .collect();
        let max = *subset.last().unwrap();
        let mut digits = vec![0usize; n];
        'theta: loop {
            // θ_n = max S prunes the bulk immediately
            if subset[digits[n - 1]] == max {
                let theta: Vec<usize> = digits.iter().map(|&i| subset[i]).collect();
                let couple = Couple {
                    subset: subset.clone(),
                    theta,
                };
                if couple_satisfies_constraints(n, b, &couple)? {
                    out.push(couple);
                }
            }
            for i in (0..n).rev() {
                digits[i] += 1;
                if digits[i] < subset.len() {
                    continue 'theta;
                }
                digits[i] = 0;
            }
            break;
        }
    }
    Ok(out)
}

/// Sum of couple weights; equals [`alternating_couple_sum`] and vanishes
/// whenever n > r.
pub fn couple_weighted_sum(n: usize, b: &[u32]) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for c in enumerate_couples(n, b)? {
        total += BigInt::from(c.weight());
    }
    Ok(total)
}

/// Per-subset cardinality check: the couples over a fixed subset S are
/// counted by `Σ_{a⊨|S| into r parts} a_1^{b_1-1}⋯a_r^{b_r-1}`.
pub fn couple_cardinality_check(n: usize, b: &[u32]) -> Result<bool> {
    let couples = enumerate_couples(n, b)?;
    let mut by_subset: std::collections::HashMap<Vec<usize>, BigInt> =
        std::collections::HashMap::new();
    for c in &couples {
        *by_subset.entry(c.subset.clone()).or_default() += 1;
    }
    for mask in 1u32..(1u32 << n) {
        let subset: Vec<usize> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| i + 1)
            .collect();
        let expect = shifted_power_sum(subset.len(), b)?;
        let got = by_subset.remove(&subset).unwrap_or_default();
        if got != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The image of one couple under the involution, with the branch taken.
#[derive(Debug, Clone)]
struct PhiStep {
    image: Couple,
    branch: &'static str,
}

/// The involution exactly as its case analysis is stated. `Err` carries a
/// reason when a branch's own applicability assumptions fail.
fn phi(n: usize, couple: &Couple) -> std::result::Result<PhiStep, String> {
    let s_set: HashSet<usize> = couple.subset.iter().copied().collect();
    let max_s = *couple.subset.last().unwrap();
    let placed: HashSet<usize> = couple.theta.iter().copied().collect();

    // U: members of S never placed; V: non-members below max S
    let u_set: Vec<usize> = couple
        .subset
        .iter()
        .copied()
        .filter(|v| !placed.contains(v))
        .collect();
    let v_set: Vec<usize> = (1..max_s).filter(|w| !s_set.contains(w)).collect();

    if let Some(&u) = u_set.iter().chain(v_set.iter()).max() {
        return if s_set.contains(&u) {
            let subset = couple.subset.iter().copied().filter(|&x| x != u).collect();
            Ok(PhiStep {
                image: Couple {
                    subset,
                    theta: couple.theta.clone(),
                },
                branch: "drop-unplaced",
            })
        } else {
            let mut subset = couple.subset.clone();
            subset.push(u);
            subset.sort_unstable();
            Ok(PhiStep {
                image: Couple {
                    subset,
                    theta: couple.theta.clone(),
                },
                branch: "insert-gap",
            })
        };
    }

    // now S must be an initial segment {1..|S|} fully used by θ
    if couple.subset != (1..=couple.subset.len()).collect::<Vec<_>>() {
        return Err("empty U ∪ V but S is not an initial segment".to_string());
    }

    // values placed at least twice
    let mut counts = vec![0usize; n + 1];
    for &t in &couple.theta {
        counts[t] += 1;
    }
    let repeated_max = (1..=n).rev().find(|&v| counts[v] >= 2);

    match repeated_max {
        Some(w) if w == max_s => {
            if max_s + 1 > n {
                return Err(format!(
                    "repeated maximum w = {w} equals max S = n, cannot grow the subset"
                ));
            }
            let mut subset = couple.subset.clone();
            subset.push(max_s + 1);
            let mut theta = couple.theta.clone();
            theta[n - 1] += 1;
            Ok(PhiStep {
                image: Couple { subset, theta },
                branch: "grow-top",
            })
        }
        Some(_) => {
            let subset = couple.subset[..couple.subset.len() - 1].to_vec();
            let mut theta = couple.theta.clone();
            if theta[n - 1] == 1 {
                return Err("cannot decrement θ_n below 1".to_string());
            }
            theta[n - 1] -= 1;
            Ok(PhiStep {
                image: Couple { subset, theta },
                branch: "shrink-top",
            })
        }
        None => {
            if couple.subset.len() != n {
                return Err(format!(
                    "no repeated value but |S| = {} < n = {n}",
                    couple.subset.len()
                ));
            }
            let subset = couple.subset[..n - 1].to_vec();
            let mut theta = couple.theta.clone();
            theta[n - 1] -= 1;
            Ok(PhiStep {
                image: Couple { subset, theta },
                branch: "collapse-full",
            })
        }
    }
}

/// Why and where the involution check stopped.
#[derive(Debug, Clone)]
pub struct InvolutionFailure {
    pub couple: Couple,
    pub branch: Option<String>,
    pub image: Option<Couple>,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct InvolutionReport {
    pub n: usize,
    pub b: Vec<u32>,
    pub couples: usize,
    pub ok: bool,
    pub failure: Option<InvolutionFailure>,
}

/// Applies the involution to every couple and checks, per couple: the
/// image satisfies the couple constraints, the weight flips (the subset
/// size changes by one), the map is fixed-point free, and applying it
/// twice returns the original. Stops at the first failure.
pub fn involution_check(n: usize, b: &[u32]) -> Result<InvolutionReport> {
    let couples = enumerate_couples(n, b)?;
    let report_fail =
        |couple: &Couple, branch: Option<String>, image: Option<Couple>, reason: String| {
            InvolutionReport {
                n,
                b: b.to_vec(),
                couples: couples.len(),
                ok: false,
                failure: Some(InvolutionFailure {
                    couple: couple.clone(),
                    branch,
                    image,
                    reason,
                }),
            }
        };

    if couples.len() % 2 == 1 {
        // a sign-reversing involution cannot exist on an odd-size set
        return Ok(report_fail(
            &couples[0],
            None,
            None,
            format!("couple set has odd cardinality {}", couples.len()),
        ));
    }

    for couple in &couples {
        let step = match phi(n, couple) {
            Ok(s) => s,
            Err(reason) => return Ok(report_fail(couple, None, None, reason)),
        };
        let branch = Some(step.branch.to_string());
        if !couple_satisfies_constraints(n, b, &step.image)? {
            return Ok(report_fail(
                couple,
                branch,
                Some(step.image),
                "image violates the couple constraints".to_string(),
            ));
        }
        let diff = step.image.subset.len() as i64 - couple.subset.len() as i64;
        if diff.abs() != 1 {
            return Ok(report_fail(
                couple,
                branch,
                Some(step.image),
                "image weight does not flip".to_string(),
            ));
        }
        if &step.image == couple {
            return Ok(report_fail(couple, branch, None, "fixed point".to_string()));
        }
        match phi(n, &step.image) {
            Ok(back) if &back.image == couple => {}
            Ok(back) => {
                return Ok(report_fail(
                    couple,
                    branch,
                    Some(back.image),
                    "applying the map twice does not return the original".to_string(),
                ))
            }
            Err(reason) => {
                return Ok(report_fail(
                    couple,
                    branch,
                    Some(step.image),
                    format!("second application failed: {reason}"),
                ))
            }
        }
    }
    Ok(InvolutionReport {
        n,
        b: b.to_vec(),
        couples: couples.len(),
        ok: true,
        failure: None,
    })
}

fn all_b_vectors(n: usize, r: usize) -> Result<Vec<Vec<u32>>> {
    strict_compositions(n as u32, r)
}

/// Generating-function identity over 0 ≤ m ≤ m_max, m < n ≤ n_max.
pub fn sweep_gf(m_max: usize, n_max: u64) -> SuiteReport {
    let params = format!("m <= {m_max}, n <= {n_max}");
    let mut checked = 0u64;
    for m in 0..=m_max {
        for n in (m as u64 + 1)..=n_max {
            match verify_gf_identity(m, n) {
                Ok(true) => checked += 1,
                Ok(false) => {
                    return SuiteReport::fail(
                        "gf-identity",
                        params,
                        checked,
                        format!("(m, n) = ({m}, {n}): sides differ"),
                    )
                }
                Err(e) => {
                    return SuiteReport::fail(
                        "gf-identity",
                        params,
                        checked,
                        format!("(m, n) = ({m}, {n}): {e}"),
                    )
                }
            }
        }
    }
    SuiteReport::pass("gf-identity", params, checked)
}

/// Rearrangement identity over every b with 1 ≤ r ≤ n ≤ n_max.
pub fn sweep_rearrangement(n_max: usize) -> SuiteReport {
    let params = format!("n <= {n_max}, all (r, b)");
    let mut checked = 0u64;
    for n in 1..=n_max {
        for r in 1..=n {
            let bs = match all_b_vectors(n, r) {
                Ok(v) => v,
                Err(e) => {
                    return SuiteReport::fail("rearrangement", params, checked, e.to_string())
                }
            };
            for b in bs {
                match verify_rearrangement(n, &b) {
                    Ok(true) => checked += 1,
                    Ok(false) => {
                        return SuiteReport::fail(
                            "rearrangement",
                            params,
                            checked,
                            format!("n = {n}, b = {b:?}: sides differ"),
                        )
                    }
                    Err(e) => {
                        return SuiteReport::fail(
                            "rearrangement",
                            params,
                            checked,
                            format!("n = {n}, b = {b:?}: {e}"),
                        )
                    }
                }
            }
        }
    }
    SuiteReport::pass("rearrangement", params, checked)
}

/// Delta identity over every b with 1 ≤ r ≤ n ≤ n_max.
pub fn sweep_delta(n_max: usize) -> SuiteReport {
    let params = format!("n <= {n_max}, all (r, b)");
    let mut checked = 0u64;
    for n in 1..=n_max {
        for r in 1..=n {
            let bs = match all_b_vectors(n, r) {
                Ok(v) => v,
                Err(e) => return SuiteReport::fail("delta", params, checked, e.to_string()),
            };
            for b in bs {
                match verify_delta_identity(n, &b) {
                    Ok(true) => checked += 1,
                    Ok(false) => {
                        return SuiteReport::fail(
                            "delta",
                            params,
                            checked,
                            format!("n = {n}, b = {b:?}: value is not delta"),
                        )
                    }
                    Err(e) => {
                        return SuiteReport::fail(
                            "delta",
                            params,
                            checked,
                            format!("n = {n}, b = {b:?}: {e}"),
                        )
                    }
                }
            }
        }
    }
    SuiteReport::pass("delta", params, checked)
}

/// Couple bookkeeping over every b with 1 ≤ r < n ≤ n_max: the weighted
/// sum matches the alternating binomial sum, vanishes, and the per-subset
/// cardinalities match the composition counts.
pub fn sweep_couples(n_max: usize) -> SuiteReport {
    let params = format!("n <= {n_max}, all (r, b) with r < n");
    let mut checked = 0u64;
    for n in 2..=n_max {
        for r in 1..n {
            let bs = match all_b_vectors(n, r) {
                Ok(v) => v,
                Err(e) => return SuiteReport::fail("couples", params, checked, e.to_string()),
            };
            for b in bs {
                let outcome = (|| -> Result<Option<String>> {
                    let weighted = couple_weighted_sum(n, &b)?;
                    let alternating = alternating_couple_sum(n, &b)?;
                    if weighted != alternating {
                        return Ok(Some(format!(
                            "weighted sum {weighted} vs alternating sum {alternating}"
                        )));
                    }
                    if !weighted.is_zero() {
                        return Ok(Some(format!("weighted sum {weighted} does not vanish")));
                    }
                    if !couple_cardinality_check(n, &b)? {
                        return Ok(Some("per-subset cardinality mismatch".to_string()));
                    }
                    Ok(None)
                })();
                match outcome {
                    Ok(None) => checked += 1,
                    Ok(Some(msg)) => {
                        return SuiteReport::fail(
                            "couples",
                            params,
                            checked,
                            format!("n = {n}, b = {b:?}: {msg}"),
                        )
                    }
                    Err(e) => {
                        return SuiteReport::fail(
                            "couples",
                            params,
                            checked,
                            format!("n = {n}, b = {b:?}: {e}"),
                        )
                    }
                }
            }
        }
    }
    SuiteReport::pass("couples", params, checked)
}

/// The literal involution over every b with 1 ≤ r < n ≤ n_max.
pub fn sweep_involution(n_max: usize) -> SuiteReport {
    let params = format!("n <= {n_max}, all (r, b) with r < n");
    let mut checked = 0u64;
    for n in 2..=n_max {
        for r in 1..n {
            let bs = match all_b_vectors(n, r) {
                Ok(v) => v,
                Err(e) => return SuiteReport::fail("involution", params, checked, e.to_string()),
            };
            for b in bs {
                match involution_check(n, &b) {
                    Ok(rep) if rep.ok => checked += 1,
                    Ok(rep) => {
                        let f = rep.failure.expect("failed report carries a failure");
                        return SuiteReport::fail(
                            "involution",
                            params,
                            checked,
                            format!(
                                "n = {n}, b = {b:?}: couple (S = {:?}, θ = {:?}), branch {:?} -> {:?}: {}",
                                f.couple.subset,
                                f.couple.theta,
                                f.branch,
                                f.image.as_ref().map(|c| (c.subset.clone(), c.theta.clone())),
                                f.reason
                            ),
                        );
                    }
                    Err(e) => {
                        return SuiteReport::fail(
                            "involution",
                            params,
                            checked,
                            format!("n = {n}, b = {b:?}: {e}"),
                        )
                    }
                }
            }
        }
    }
    SuiteReport::pass("involution", params, checked)
}
