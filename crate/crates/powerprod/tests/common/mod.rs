//! Brute-force oracles shared by the integration suites. Everything here
//! recomputes results from first principles (repeated symbolic
//! multiplication, exhaustive enumeration) so the library has something
//! independent to be checked against.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Monomial = Vec<u32>;

/// Product of two sparse integer polynomials.
pub fn poly_mul(
    a: &HashMap<Monomial, BigInt>,
    b: &HashMap<Monomial, BigInt>,
) -> HashMap<Monomial, BigInt> {
    let mut out: HashMap<Monomial, BigInt> = HashMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let entry = out.entry(m).or_insert_with(BigInt::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Expands `(Σ_i alpha_i x_i)^d` by multiplying the linear form out d
/// times; no binomial or multinomial shortcuts anywhere.
pub fn expand_linear_form_power(alpha: &[u32], d: u32) -> HashMap<Monomial, BigInt> {
    let mut linear: HashMap<Monomial, BigInt> = HashMap::new();
    for (i, &a) in alpha.iter().enumerate() {
        if a != 0 {
            let mut m = vec![0u32; alpha.len()];
            m[i] = 1;
            linear.insert(m, BigInt::from(a));
        }
    }
    let mut acc = HashMap::from([(vec![0u32; alpha.len()], BigInt::one())]);
    for _ in 0..d {
        acc = poly_mul(&acc, &linear);
    }
    acc
}

/// Weighted sum `Σ_j y_j · expansion_j` over rational weights, as a
/// monomial → coefficient map with zeros dropped.
pub fn weighted_expansion(
    weights: &[BigRational],
    expansions: &[HashMap<Monomial, BigInt>],
) -> HashMap<Monomial, BigRational> {
    let mut out: HashMap<Monomial, BigRational> = HashMap::new();
    for (y, expansion) in weights.iter().zip(expansions) {
        if y.is_zero() {
            continue;
        }
        for (m, c) in expansion {
            let entry = out.entry(m.clone()).or_insert_with(BigRational::zero);
            *entry += BigRational::from_integer(c.clone()) * y;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}
