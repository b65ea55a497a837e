//! Exact determinants of V(n,d): fraction-free elimination, the
//! block-product route, closed forms for det A_k(a,b) and det V(2,d),
//! prime factorization, and the prime-exponent polynomial explorer.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::compositions::{binomial, enumerate_k_compositions, factorial};
use crate::error::{Error, Result};
use crate::matrix::{int_pow, power_product_matrix, IntMatrix};
use crate::numio;
use crate::report::SuiteReport;
use crate::structure::block_layout;

/// Divides exactly, checking that no remainder is lost.
fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    debug_assert!(!den.is_zero());
    let (q, r) = num.div_rem(den);
    debug_assert!(r.is_zero(), "inexact division in fraction-free elimination");
    q
}

/// Exact determinant by fraction-free (Bareiss) elimination with row
/// pivoting. Every intermediate value is a minor of the input, so nothing
/// ever leaves the integers. Zero is returned for singular input.
pub fn det_bareiss(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut negated = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        let Some(pivot) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Ok(BigInt::zero());
        };
        if pivot != k {
            a.swap(pivot, k);
            negated = !negated;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            let lead = std::mem::replace(&mut row[k], BigInt::zero());
            for j in k + 1..n {
                let num = &pivot_row[k] * &row[j] - &lead * &pivot_row[j];
                row[j] = exact_div(num, &prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = std::mem::take(&mut a[n - 1][n - 1]);
    Ok(if negated { -det } else { det })
}

/// A nonzero integer together with its (possibly partial) prime
/// factorization: `value = sign · cofactor · ∏ p^e`. The cofactor is 1
/// exactly when the factorization is complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    sign: i8,
    factors: BTreeMap<BigUint, u64>,
    cofactor: BigUint,
    value: BigInt,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self {
            sign: 1,
            factors: BTreeMap::new(),
            cofactor: BigUint::one(),
            value: BigInt::one(),
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn factors(&self) -> &BTreeMap<BigUint, u64> {
        &self.factors
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    pub fn exponent_of(&self, p: &BigUint) -> u64 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    /// Multiplies `other^e` into this factorization. Exponents are kept
    /// in u64; overflow aborts loudly instead of wrapping.
    pub fn mul_pow(&mut self, other: &FactoredInteger, e: u64) {
        if e == 0 {
            return;
        }
        for (p, &k) in &other.factors {
            let add = k.checked_mul(e).expect("prime exponent exceeds u64");
            let slot = self.factors.entry(p.clone()).or_insert(0);
            *slot = slot.checked_add(add).expect("prime exponent exceeds u64");
        }
        if !other.cofactor.is_one() {
            self.cofactor *= Pow::pow(&other.cofactor, e);
        }
        if other.sign < 0 && e % 2 == 1 {
            self.sign = -self.sign;
        }
        self.value *= Pow::pow(other.value(), e);
    }

    /// `(prime, exponent)` pairs as decimal strings, ascending by prime.
    pub fn prime_powers(&self) -> Vec<(String, String)> {
        self.factors
            .iter()
            .map(|(p, e)| (p.to_string(), e.to_string()))
            .collect()
    }

    #[cfg(test)]
    fn invariant_holds(&self) -> bool {
        let mut acc = BigInt::from(self.cofactor.clone());
        for (p, &e) in &self.factors {
            acc *= BigInt::from(Pow::pow(p, e));
        }
        if self.sign < 0 {
            acc = -acc;
        }
        acc == self.value
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| {
                if *e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect();
        if !self.cofactor.is_one() {
            parts.push(format!("[{}]", self.cofactor));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin with the first twelve prime bases: deterministic below
/// 3.3·10^24 (in particular for everything that fits in u64), and a
/// strong probable-prime test beyond.
fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_one = n - &one;
    let r = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> r;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..r {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho. Deterministic (the polynomial offset walks
/// 1, 2, 3, …), so repeated runs factor identically. Returns a proper
/// divisor or `None` once the iteration budget is spent.
fn pollard_brent(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return Some(two);
    }
    for c in 1u64.. {
        let c = BigUint::from(c);
        let step = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let (mut x, mut ys) = (y.clone(), y.clone());
        let mut g = BigUint::one();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    if *budget == 0 {
                        return None;
                    }
                    *budget -= 1;
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if g == *n {
            // backtrack one step at a time
            g = BigUint::one();
            while g.is_one() {
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
            }
        }
        if g != *n && !g.is_one() {
            return Some(g);
        }
        // cycle degenerated; retry with the next offset
    }
    unreachable!()
}

const TRIAL_DIVISION_BOUND: u64 = 100_000;
const DEFAULT_RHO_BUDGET: u64 = 2_000_000;

/// Complete prime factorization of a nonzero integer: trial division up to
/// 10^5, then Miller–Rabin plus Pollard rho splitting under an iteration
/// budget. When the budget runs out the result carries the unfactored
/// cofactor and reports itself incomplete rather than running unbounded.
pub fn factorize(v: &BigInt) -> Result<FactoredInteger> {
    factorize_with_budget(v, DEFAULT_RHO_BUDGET)
}

pub fn factorize_with_budget(v: &BigInt, mut budget: u64) -> Result<FactoredInteger> {
    if v.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    let sign: i8 = if v.is_negative() { -1 } else { 1 };
    let mut m = v.magnitude().clone();
    let mut factors: BTreeMap<BigUint, u64> = BTreeMap::new();

    let push = |p: BigUint, e: u64, factors: &mut BTreeMap<BigUint, u64>| {
        *factors.entry(p).or_insert(0) += e;
    };

    // trial division
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_BOUND {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0u64;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            push(pb, e, &mut factors);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }

    // split what remains
    let mut cofactor = BigUint::one();
    let mut pending = Vec::new();
    if !m.is_one() {
        pending.push(m);
    }
    while let Some(q) = pending.pop() {
        if q.is_one() {
            continue;
        }
        if is_probable_prime(&q) {
            push(q, 1, &mut factors);
            continue;
        }
        match pollard_brent(&q, &mut budget) {
            Some(div) => {
                pending.push(&q / &div);
                pending.push(div);
            }
            None => cofactor *= q,
        }
    }

    Ok(FactoredInteger {
        sign,
        factors,
        cofactor,
        value: v.clone(),
    })
}

/// Determinants of the diagonal blocks of V(·, d): for each k the
/// power-product matrix of the k-compositions of d. These depend on d
/// only; a zero block determinant is reported as a construction bug.
pub fn block_determinants(d: u32) -> Result<Vec<(usize, BigInt)>> {
    if d == 0 {
        return Err(Error::invalid("block_determinants needs d >= 1"));
    }
    let mut out = Vec::with_capacity(d as usize);
    for k in 1..=d as usize {
        let comps = enumerate_k_compositions(d, k)?;
        let det = det_bareiss(&power_product_matrix(&comps))?;
        if det.is_zero() {
            return Err(Error::bug(format!(
                "zero determinant for the {k}-composition block of d = {d}"
            )));
        }
        out.push((k, det));
    }
    Ok(out)
}

/// Exact determinant of V(n,d) through the block route:
/// det V(n,d) = ∏_k (det block_k)^C(n,k), returned fully factored.
pub fn det_v(n: usize, d: u32) -> Result<FactoredInteger> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("det_v needs n >= 1 and d >= 1"));
    }
    let mut total = FactoredInteger::one();
    for k in 1..=n.min(d as usize) {
        let comps = enumerate_k_compositions(d, k)?;
        let det = det_bareiss(&power_product_matrix(&comps))?;
        if det.is_zero() {
            return Err(Error::bug(format!(
                "zero determinant for the {k}-composition block of (n, d) = ({n}, {d})"
            )));
        }
        let factored = factorize(&det)?;
        let mult = binomial(n as u64, k as u64)
            .to_u64()
            .ok_or_else(|| Error::invalid(format!("C({n},{k}) exceeds u64")))?;
        total.mul_pow(&factored, mult);
    }
    Ok(total)
}

/// Closed form det A_k(a,b) = (a+b)^(k(k+1)/2) · ∏_{h=1}^k h!.
pub fn det_a_closed(k: usize, a: i64, b: i64) -> BigInt {
    let k = k as u64;
    let tri = (k * (k + 1) / 2) as u32;
    let mut det = int_pow(&BigInt::from(a + b), tri);
    for h in 1..=k {
        det *= BigInt::from(factorial(h));
    }
    det
}

/// Closed form det V(2,d) = d^(d(d+1)/2) · ∏_{h=1}^d h!.
pub fn det_v2_closed(d: u32) -> BigInt {
    let d64 = u64::from(d);
    let tri = (d64 * (d64 + 1) / 2) as u32;
    let mut det = int_pow(&BigInt::from(d), tri);
    for h in 1..=d64 {
        det *= BigInt::from(factorial(h));
    }
    det
}

/// Univariate polynomial with exact rational coefficients, ascending by
/// degree with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &BigInt) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * BigRational::from_integer(x.clone()) + c;
        }
        acc
    }

    pub fn add_scaled(&self, other: &RatPoly, scale: &BigRational) -> RatPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c * scale;
        }
        RatPoly::from_coeffs(out)
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::from_coeffs(out)
    }

    /// The binomial coefficient C(x, k) as a polynomial in x:
    /// x(x-1)⋯(x-k+1) / k!.
    pub fn binomial_poly(k: u64) -> RatPoly {
        let mut acc = RatPoly::from_coeffs(vec![BigRational::one()]);
        for j in 0..k {
            let linear = RatPoly::from_coeffs(vec![
                BigRational::from_integer(BigInt::from(-(j as i64))),
                BigRational::one(),
            ]);
            acc = acc.mul(&linear);
        }
        let inv_kfact = BigRational::new(BigInt::one(), BigInt::from(factorial(k)));
        acc.mul(&RatPoly::from_coeffs(vec![inv_kfact]))
    }

    /// Coefficients as exact fraction strings, ascending by degree.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(numio::rat_to_string).collect()
    }

    /// Human-readable rendering like `(1/6)·n^4 + (1/3)·n^3 - (7/3)·n`.
    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = numio::rat_to_string(&c.abs());
            let term = match i {
                0 => format!("({mag})"),
                1 => format!("({mag})*{var}"),
                _ => format!("({mag})*{var}^{i}"),
            };
            parts.push((c.is_negative(), term));
        }
        let mut out = String::new();
        for (idx, (neg, term)) in parts.into_iter().enumerate() {
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

/// Primes up to `bound`, by trial division (the bound is tiny here).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    'next: for c in 2..=bound {
        for &p in &out {
            if p * p > c {
                break;
            }
            if c % p == 0 {
                continue 'next;
            }
        }
        out.push(c);
    }
    out
}

/// Fits the polynomial of degree < `points.len()` through the given
/// (n, exponent) samples by the method of undetermined coefficients: an
/// exact Vandermonde solve for the monomial coefficients.
fn interpolate_exponents(points: &[(usize, u64)]) -> Result<RatPoly> {
    let m = points.len();
    let vandermonde = IntMatrix::from_fn(m, m, |i, j| {
        int_pow(&BigInt::from(points[i].0 as u64), j as u32)
    });
    let rhs: Vec<BigRational> = points
        .iter()
        .map(|&(_, e)| BigRational::from_integer(BigInt::from(e)))
        .collect();
    let coeffs = crate::basis::solve_exact(&vandermonde, &rhs)?;
    Ok(RatPoly::from_coeffs(coeffs))
}

/// Factored determinant of V(n,d) for one n of the sweep.
#[derive(Debug, Clone)]
pub struct ConjectureDeterminant {
    pub n: usize,
    pub factored: FactoredInteger,
    pub offending_primes: Vec<BigUint>,
    pub sign_positive: bool,
    pub within_prime_bound: bool,
}

/// Exponent polynomial f_p with the prime it belongs to. The polynomial
/// is derived exactly from block-determinant valuations; fitting the same
/// polynomial through the observed exponents at n = 1..d by undetermined
/// coefficients is the secondary route, recorded per prime.
#[derive(Debug, Clone)]
pub struct ExponentPolynomial {
    pub prime: u64,
    pub poly: RatPoly,
    /// Whether the interpolation route reproduced `poly` exactly.
    pub interpolation_consistent: bool,
}

/// Independent re-factorization check at one value of n.
#[derive(Debug, Clone)]
pub struct ConjectureCrossCheck {
    pub n: usize,
    pub consistent: bool,
    pub detail: Option<String>,
}

/// Everything `conjecture_explore` learns about det V(·, d).
#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub d: u32,
    pub n_max: usize,
    pub blocks: Vec<(usize, FactoredInteger)>,
    pub polynomials: Vec<ExponentPolynomial>,
    pub determinants: Vec<ConjectureDeterminant>,
    pub cross_checks: Vec<ConjectureCrossCheck>,
    pub integer_valued: bool,
    pub conjecture_holds: bool,
}

/// Explores the prime structure of det V(n,d) for n up to `n_max`:
///
/// * factors every determinant through the block route and flags any
///   prime factor exceeding d (a counterexample to the conjectured form);
/// * derives, for each prime p ≤ d, the exponent polynomial
///   f_p(n) = Σ_k v_p(det block_k) · C(n,k), a polynomial of degree at
///   most d-1 because the d-composition block is the 1x1 identity;
/// * cross-validates f_p at n = d+1 and d+2 by re-factoring the full
///   determinant value from scratch.
pub fn conjecture_explore(d: u32, n_max: usize) -> Result<ConjectureReport> {
    if d < 2 {
        return Err(Error::invalid("conjecture_explore needs d >= 2"));
    }
    if n_max < d as usize + 2 {
        return Err(Error::invalid(format!(
            "conjecture_explore needs n_max >= d + 2 = {}",
            d + 2
        )));
    }

    let mut blocks = Vec::new();
    for (k, det) in block_determinants(d)? {
        let factored = factorize(&det)?;
        if !factored.is_complete() {
            return Err(Error::IncompleteFactorization(
                factored.cofactor().to_string(),
            ));
        }
        blocks.push((k, factored));
    }

    let d_big = BigUint::from(d);
    let mut determinants = Vec::new();
    for n in 1..=n_max {
        let mut factored = FactoredInteger::one();
        for (k, block) in &blocks {
            if *k > n {
                break;
            }
            let mult = binomial(n as u64, *k as u64)
                .to_u64()
                .ok_or_else(|| Error::invalid(format!("C({n},{k}) exceeds u64")))?;
            factored.mul_pow(block, mult);
        }
        let offending: Vec<BigUint> = factored
            .factors()
            .keys()
            .filter(|p| **p > d_big)
            .cloned()
            .collect();
        let sign_positive = factored.sign() > 0;
        let within = offending.is_empty() && sign_positive && factored.is_complete();
        determinants.push(ConjectureDeterminant {
            n,
            factored,
            offending_primes: offending,
            sign_positive,
            within_prime_bound: within,
        });
    }

    let primes = primes_up_to(u64::from(d));
    let mut polynomials = Vec::new();
    for &p in &primes {
        let pb = BigUint::from(p);
        let mut poly = RatPoly::zero();
        for (k, factored) in &blocks {
            let v = factored.exponent_of(&pb);
            if v > 0 {
                let weight = BigRational::from_integer(BigInt::from(v));
                poly = poly.add_scaled(&RatPoly::binomial_poly(*k as u64), &weight);
            }
        }
        if poly.degree().is_some_and(|deg| deg > d as usize - 1) {
            return Err(Error::bug(format!(
                "exponent polynomial for prime {p} has degree {:?} > d - 1",
                poly.degree()
            )));
        }
        // secondary route: undetermined coefficients through the d
        // observed exponents pin the same degree <= d-1 polynomial
        let samples: Vec<(usize, u64)> = (1..=d as usize)
            .map(|n| (n, determinants[n - 1].factored.exponent_of(&pb)))
            .collect();
        let interpolated = interpolate_exponents(&samples)?;
        polynomials.push(ExponentPolynomial {
            prime: p,
            interpolation_consistent: interpolated == poly,
            poly,
        });
    }

    // the polynomials must produce nonnegative integers at every n swept
    let mut integer_valued = true;
    for ep in &polynomials {
        for n in 1..=n_max {
            let val = ep.poly.eval(&BigInt::from(n));
            if !val.is_integer() || val.is_negative() {
                integer_valued = false;
            }
        }
    }

    // independent route: multiply the block determinants out and factor
    // the resulting value from scratch
    let mut cross_checks = Vec::new();
    for n in [d as usize + 1, d as usize + 2] {
        let entry = &determinants[n - 1];
        let refactored = factorize(entry.factored.value())?;
        let mut detail = None;
        let mut consistent = refactored.is_complete() && refactored.sign() == entry.factored.sign();
        if consistent {
            for ep in &polynomials {
                let expect = ep.poly.eval(&BigInt::from(n));
                let actual = refactored.exponent_of(&BigUint::from(ep.prime));
                if expect != BigRational::from_integer(BigInt::from(actual)) {
                    consistent = false;
                    detail = Some(format!(
                        "prime {}: polynomial gives {}, factorization gives {actual}",
                        ep.prime,
                        numio::rat_to_string(&expect)
                    ));
                    break;
                }
            }
            if consistent && refactored.factors() != entry.factored.factors() {
                consistent = false;
                detail = Some("block-route and direct factorizations disagree".to_string());
            }
        } else {
            detail = Some("direct factorization incomplete or sign mismatch".to_string());
        }
        cross_checks.push(ConjectureCrossCheck {
            n,
            consistent,
            detail,
        });
    }

    let conjecture_holds = integer_valued
        && determinants.iter().all(|e| e.within_prime_bound)
        && cross_checks.iter().all(|c| c.consistent)
        && polynomials.iter().all(|ep| ep.interpolation_consistent);

    Ok(ConjectureReport {
        d,
        n_max,
        blocks,
        polynomials,
        determinants,
        cross_checks,
        integer_valued,
        conjecture_holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FactoredIntegerJson {
    pub value: String,
    pub sign: i8,
    pub factors: Vec<PrimePowerJson>,
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimePowerJson {
    pub prime: String,
    pub exponent: String,
}

impl From<&FactoredInteger> for FactoredIntegerJson {
    fn from(f: &FactoredInteger) -> Self {
        Self {
            value: f.value().to_string(),
            sign: f.sign(),
            factors: f
                .prime_powers()
                .into_iter()
                .map(|(prime, exponent)| PrimePowerJson { prime, exponent })
                .collect(),
            complete: f.is_complete(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReportJson {
    pub d: u32,
    pub n_max: usize,
    pub block_determinants: Vec<BlockDetJson>,
    pub exponent_polynomials: Vec<ExponentPolynomialJson>,
    pub determinants: Vec<ConjectureDeterminantJson>,
    pub cross_checks: Vec<CrossCheckJson>,
    pub integer_valued: bool,
    pub conjecture_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockDetJson {
    pub k: usize,
    #[serde(flatten)]
    pub det: FactoredIntegerJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentPolynomialJson {
    pub prime: u64,
    /// Exact fraction strings, ascending by degree.
    pub coefficients: Vec<String>,
    pub display: String,
    pub interpolation_consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureDeterminantJson {
    pub n: usize,
    #[serde(flatten)]
    pub det: FactoredIntegerJson,
    pub within_prime_bound: bool,
    pub offending_primes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckJson {
    pub n: usize,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl From<&ConjectureReport> for ConjectureReportJson {
    fn from(r: &ConjectureReport) -> Self {
        Self {
            d: r.d,
            n_max: r.n_max,
            block_determinants: r
                .blocks
                .iter()
                .map(|(k, det)| BlockDetJson {
                    k: *k,
                    det: det.into(),
                })
                .collect(),
            exponent_polynomials: r
                .polynomials
                .iter()
                .map(|ep| ExponentPolynomialJson {
                    prime: ep.prime,
                    coefficients: ep.poly.coeff_strings(),
                    display: ep.poly.display("n"),
                    interpolation_consistent: ep.interpolation_consistent,
                })
                .collect(),
            determinants: r
                .determinants
                .iter()
                .map(|e| ConjectureDeterminantJson {
                    n: e.n,
                    det: (&e.factored).into(),
                    within_prime_bound: e.within_prime_bound,
                    offending_primes: e.offending_primes.iter().map(|p| p.to_string()).collect(),
                })
                .collect(),
            cross_checks: r
                .cross_checks
                .iter()
                .map(|c| CrossCheckJson {
                    n: c.n,
                    consistent: c.consistent,
                    detail: c.detail.clone(),
                })
                .collect(),
            integer_valued: r.integer_valued,
            conjecture_holds: r.conjecture_holds,
        }
    }
}

/// det V(n,d) ≠ 0 over a sweep of (n, d).
pub fn sweep_nonsingularity(n_max: usize, d_max: u32) -> SuiteReport {
    let mut checked = 0u64;
    for n in 1..=n_max {
        for d in 1..=d_max {
            match det_v(n, d) {
                Ok(f) if !f.value().is_zero() => checked += 1,
                Ok(_) => {
                    return SuiteReport::fail(
                        "nonsingularity",
                        format!("n <= {n_max}, d <= {d_max}"),
                        checked,
                        format!("det V({n},{d}) = 0"),
                    )
                }
                Err(e) => {
                    return SuiteReport::fail(
                        "nonsingularity",
                        format!("n <= {n_max}, d <= {d_max}"),
                        checked,
                        format!("(n, d) = ({n}, {d}): {e}"),
                    )
                }
            }
        }
    }
    SuiteReport::pass(
        "nonsingularity",
        format!("n <= {n_max}, d <= {d_max}"),
        checked,
    )
}

/// Block-product determinant vs full fraction-free determinant on the
/// canonically ordered matrix, over a sweep of (n, d). Exact equality.
pub fn sweep_det_oracle(n_max: usize, d_max: u32) -> SuiteReport {
    let mut checked = 0u64;
    for n in 1..=n_max {
        for d in 1..=d_max {
            let outcome = (|| -> Result<()> {
                let via_blocks = det_v(n, d)?;
                let layout = block_layout(n, d)?;
                let full = det_bareiss(&power_product_matrix(&layout.canonical))?;
                if via_blocks.value() == &full {
                    Ok(())
                } else {
                    Err(Error::bug(format!(
                        "blocks give {}, elimination gives {full}",
                        via_blocks.value()
                    )))
                }
            })();
            match outcome {
                Ok(()) => checked += 1,
                Err(e) => {
                    return SuiteReport::fail(
                        "det-oracle",
                        format!("n <= {n_max}, d <= {d_max}"),
                        checked,
                        format!("(n, d) = ({n}, {d}): {e}"),
                    )
                }
            }
        }
    }
    SuiteReport::pass("det-oracle", format!("n <= {n_max}, d <= {d_max}"), checked)
}

/// Closed form for det A_k(a,b) vs direct elimination over a grid,
/// including the degenerate rows where a - i vanishes.
pub fn sweep_det_a_closed(
    k_max: usize,
    a_range: std::ops::RangeInclusive<i64>,
    b_range: std::ops::RangeInclusive<i64>,
) -> SuiteReport {
    let params = format!("k <= {k_max}, a in {a_range:?}, b in {b_range:?}");
    let mut checked = 0u64;
    for k in 0..=k_max {
        for a in a_range.clone() {
            for b in b_range.clone() {
                let direct = match det_bareiss(&crate::matrix::build_a(k, a, b)) {
                    Ok(v) => v,
                    Err(e) => {
                        return SuiteReport::fail(
                            "det-a-closed",
                            params.clone(),
                            checked,
                            format!("(k, a, b) = ({k}, {a}, {b}): {e}"),
                        )
                    }
                };
                let closed = det_a_closed(k, a, b);
                if direct != closed {
                    return SuiteReport::fail(
                        "det-a-closed",
                        params.clone(),
                        checked,
                        format!("(k, a, b) = ({k}, {a}, {b}): direct {direct} vs closed {closed}"),
                    );
                }
                checked += 1;
            }
        }
    }
    SuiteReport::pass("det-a-closed", params, checked)
}

/// Closed form for det V(2,d) vs the block route, d up to `d_max`.
pub fn sweep_det_v2(d_max: u32) -> SuiteReport {
    let mut checked = 0u64;
    for d in 1..=d_max {
        let outcome = det_v(2, d).map(|f| (f.value().clone(), det_v2_closed(d)));
        match outcome {
            Ok((via_blocks, closed)) if via_blocks == closed => checked += 1,
            Ok((via_blocks, closed)) => {
                return SuiteReport::fail(
                    "det-v2-closed",
                    format!("d <= {d_max}"),
                    checked,
                    format!("d = {d}: blocks {via_blocks} vs closed {closed}"),
                )
            }
            Err(e) => {
                return SuiteReport::fail(
                    "det-v2-closed",
                    format!("d <= {d_max}"),
                    checked,
                    format!("d = {d}: {e}"),
                )
            }
        }
    }
    SuiteReport::pass("det-v2-closed", format!("d <= {d_max}"), checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compositions::enumerate_b;
    use crate::matrix::build_a;
    use proptest::prelude::*;

    fn ints(vs: &[i64]) -> Vec<BigInt> {
        vs.iter().map(|&v| BigInt::from(v)).collect()
    }

    fn mat(rows: usize, cols: usize, vs: &[i64]) -> IntMatrix {
        IntMatrix::new(rows, cols, ints(vs)).unwrap()
    }

    /// Cofactor-expansion determinant, the independent oracle for Bareiss.
    fn det_laplace(m: &IntMatrix) -> BigInt {
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m.at(0, 0).clone();
        }
        let mut det = BigInt::zero();
        for j in 0..n {
            if m.at(0, j).is_zero() {
                continue;
            }
            let minor = IntMatrix::from_fn(n - 1, n - 1, |r, c| {
                m.at(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let term = m.at(0, j) * det_laplace(&minor);
            if j % 2 == 0 {
                det += term;
            } else {
                det -= term;
            }
        }
        det
    }

    #[test]
    fn bareiss_examples() {
        assert_eq!(det_bareiss(&IntMatrix::identity(5)).unwrap(), BigInt::one());
        // cofactor expansion by hand: 4·(1·4 - 1·0) = 16
        let m = mat(3, 3, &[4, 0, 0, 1, 1, 1, 0, 0, 4]);
        assert_eq!(det_bareiss(&m).unwrap(), BigInt::from(16));
        let v32 = power_product_matrix(&enumerate_b(3, 2).unwrap());
        assert_eq!(det_bareiss(&v32).unwrap(), BigInt::from(64));
        // singular
        let m = mat(2, 2, &[1, 2, 2, 4]);
        assert_eq!(det_bareiss(&m).unwrap(), BigInt::zero());
        // needs a row swap
        let m = mat(2, 2, &[0, 1, 1, 0]);
        assert_eq!(det_bareiss(&m).unwrap(), BigInt::from(-1));
        assert!(det_bareiss(&IntMatrix::zeros(2, 3)).is_err());
    }

    proptest! {
        #[test]
        fn bareiss_matches_laplace(
            n in 1usize..5,
            vals in proptest::collection::vec(-9i64..10, 16),
        ) {
            let m = IntMatrix::from_fn(n, n, |i, j| BigInt::from(vals[i * 4 + j]));
            prop_assert_eq!(det_bareiss(&m).unwrap(), det_laplace(&m));
        }
    }

    #[test]
    fn det_v_examples() {
        let f = det_v(3, 2).unwrap();
        assert_eq!(f.value(), &BigInt::from(64));
        assert_eq!(f.exponent_of(&BigUint::from(2u32)), 6);
        assert!(f.is_complete());

        for n in 1..=6 {
            assert_eq!(det_v(n, 1).unwrap().value(), &BigInt::one());
        }

        // 5^15 · 1!2!3!4!5! = 2^8 · 3^3 · 5^16
        let f = det_v(2, 5).unwrap();
        assert_eq!(f.exponent_of(&BigUint::from(2u32)), 8);
        assert_eq!(f.exponent_of(&BigUint::from(3u32)), 3);
        assert_eq!(f.exponent_of(&BigUint::from(5u32)), 16);
        assert_eq!(f.factors().len(), 3);
        assert!(det_v(0, 1).is_err());
    }

    #[test]
    fn det_a_closed_examples() {
        for (a, b) in [(3i64, 2i64), (-1, 4), (0, 0), (2, -2)] {
            assert_eq!(det_a_closed(1, a, b), BigInt::from(a + b));
            assert_eq!(det_a_closed(0, a, b), BigInt::one());
        }
        // 6^6 · 1!·2!·3! = 559872
        assert_eq!(det_a_closed(3, 4, 2), BigInt::from(559872));
        assert_eq!(
            det_bareiss(&build_a(3, 4, 2)).unwrap(),
            BigInt::from(559872)
        );
    }

    #[test]
    fn det_a_degenerate_rows() {
        // a - i = 0 for some row, covering the zero-entry degeneracy
        for k in 1..=4usize {
            for a in 0..=k as i64 {
                let direct = det_bareiss(&build_a(k, a, 1)).unwrap();
                assert_eq!(direct, det_a_closed(k, a, 1), "k={k} a={a}");
            }
        }
    }

    #[test]
    fn det_v2_closed_examples() {
        assert_eq!(det_v2_closed(1), BigInt::one());
        assert_eq!(det_v2_closed(2), BigInt::from(16));
        let expect = int_pow(&BigInt::from(5), 15) * BigInt::from(34560);
        assert_eq!(det_v2_closed(5), expect);
        for d in 1..=8 {
            assert_eq!(det_v(2, d).unwrap().value(), &det_v2_closed(d), "d={d}");
        }
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(&BigInt::from(64)).unwrap();
        assert_eq!(f.prime_powers(), vec![("2".into(), "6".into())]);
        assert!(f.invariant_holds());

        let f = factorize(&BigInt::from(34560)).unwrap();
        assert_eq!(
            f.prime_powers(),
            vec![
                ("2".into(), "8".into()),
                ("3".into(), "3".into()),
                ("5".into(), "1".into())
            ]
        );

        // det V(2,4) = 4^10 · 1!2!3!4! = 2^25 · 3^2
        let f = factorize(&det_v2_closed(4)).unwrap();
        assert_eq!(
            f.prime_powers(),
            vec![("2".into(), "25".into()), ("3".into(), "2".into())]
        );

        let f = factorize(&BigInt::from(-12)).unwrap();
        assert_eq!(f.sign(), -1);
        assert_eq!(f.to_string(), "-2^2*3");
        assert!(f.invariant_holds());

        let f = factorize(&BigInt::one()).unwrap();
        assert!(f.factors().is_empty());
        assert!(f.is_complete());

        assert!(factorize(&BigInt::zero()).is_err());
    }

    #[test]
    fn factorize_splits_beyond_trial_division() {
        // both primes exceed the trial-division bound
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(1_000_033u64);
        let f = factorize(&(&p * &q)).unwrap();
        assert!(f.is_complete());
        assert_eq!(
            f.prime_powers(),
            vec![
                ("1000003".into(), "1".into()),
                ("1000033".into(), "1".into())
            ]
        );
        assert!(f.invariant_holds());
    }

    #[test]
    fn factorize_reports_incomplete_under_tiny_budget() {
        let p = BigInt::from(2_147_483_647u64); // 2^31 - 1, prime
        let q = BigInt::from(2_147_483_629u64); // prime
        let f = factorize_with_budget(&(&p * &q), 0).unwrap();
        assert!(!f.is_complete());
        assert!(f.invariant_holds());
        assert_eq!(
            f.cofactor(),
            &(BigUint::from(2_147_483_647u64) * BigUint::from(2_147_483_629u64))
        );
    }

    #[test]
    fn probable_prime_basics() {
        for p in [2u64, 3, 97, 1_000_003] {
            assert!(is_probable_prime(&BigUint::from(p)), "{p}");
        }
        for c in [1u64, 4, 100, 1_000_005] {
            assert!(!is_probable_prime(&BigUint::from(c)), "{c}");
        }
        // strong pseudoprime to base 2, composite: 3215031751 = 151·751·28351
        assert!(!is_probable_prime(&BigUint::from(3_215_031_751u64)));
    }

    #[test]
    fn rat_poly_basics() {
        // C(n, 2) = n(n-1)/2
        let p = RatPoly::binomial_poly(2);
        assert_eq!(
            p.coeffs(),
            &[
                BigRational::zero(),
                BigRational::new(BigInt::from(-1), BigInt::from(2)),
                BigRational::new(BigInt::from(1), BigInt::from(2)),
            ]
        );
        for n in 0..=8i64 {
            for k in 0..=5u64 {
                let val = RatPoly::binomial_poly(k).eval(&BigInt::from(n));
                assert_eq!(
                    val,
                    BigRational::from_integer(BigInt::from(binomial(n as u64, k))),
                    "C({n},{k})"
                );
            }
        }
        assert_eq!(RatPoly::binomial_poly(0).coeffs(), &[BigRational::one()]);
    }

    #[test]
    fn conjecture_small_degree() {
        let rep = conjecture_explore(2, 5).unwrap();
        assert!(rep.conjecture_holds);
        assert!(rep.polynomials.iter().all(|ep| ep.interpolation_consistent));
        // det V(n,2) = 4^C(n,1) · 1^C(n,2), so f_2(n) = 2n
        let f2 = &rep.polynomials[0];
        assert_eq!(f2.prime, 2);
        assert_eq!(
            f2.poly.coeffs(),
            &[
                BigRational::zero(),
                BigRational::from_integer(BigInt::from(2))
            ]
        );
        assert_eq!(f2.poly.degree(), Some(1));
    }

    #[test]
    fn conjecture_d5_matches_v25_factorization() {
        let rep = conjecture_explore(5, 7).unwrap();
        assert!(rep.conjecture_holds);
        // the undetermined-coefficients fit agrees with the block route
        assert!(rep.polynomials.iter().all(|ep| ep.interpolation_consistent));
        let n2 = BigInt::from(2);
        let by_prime: std::collections::HashMap<u64, &RatPoly> = rep
            .polynomials
            .iter()
            .map(|ep| (ep.prime, &ep.poly))
            .collect();
        // evaluations at n = 2 must match det V(2,5) = 2^8 · 3^3 · 5^16
        let expect = [(2u64, 8i64), (3, 3), (5, 16)];
        for (p, e) in expect {
            assert_eq!(
                by_prime[&p].eval(&n2),
                BigRational::from_integer(BigInt::from(e)),
                "f_{p}(2)"
            );
        }
    }

    #[test]
    fn conjecture_rejects_bad_arguments() {
        assert!(conjecture_explore(1, 10).is_err());
        assert!(conjecture_explore(5, 6).is_err());
    }

    #[test]
    fn sweeps_pass_at_small_sizes() {
        assert!(sweep_nonsingularity(4, 4).passed);
        assert!(sweep_det_oracle(3, 3).passed);
        assert!(sweep_det_a_closed(3, -2..=3, -2..=3).passed);
        assert!(sweep_det_v2(6).passed);
    }
}
