//! Exact conversion of homogeneous polynomials between the monomial basis
//! `{x^α}` and the basis of d-th powers of linear forms `{⟨α,x⟩^d}`, both
//! indexed by the canonical block order of B(n,d).
//!
//! The change-of-basis matrix is V̂(n,d); a monomial coefficient vector c
//! and a linear-power coefficient vector y represent the same polynomial
//! exactly when `V̂ᵀ·y = c`. Solves ride the block triangular structure:
//! only the small diagonal blocks are ever eliminated, and the inverse
//! never fills in outside the support of V̂.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compositions::{factorial, multinomial, Exponent, ExponentSet};
use crate::error::{Error, Result};
use crate::matrix::{build_vhat, entry_power, int_pow, IntMatrix};
use crate::numio;
use crate::report::SuiteReport;
use crate::structure::block_layout;

/// Which basis a coefficient vector is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// Coefficients of the monomials x^α.
    Monomial,
    /// Coefficients of the powers ⟨α, x⟩^d.
    LinearPower,
}

impl BasisTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisTag::Monomial => "monomial",
            BasisTag::LinearPower => "linear-power",
        }
    }

    pub fn from_str_tag(s: &str) -> Result<Self> {
        match s {
            "monomial" => Ok(BasisTag::Monomial),
            "linear-power" => Ok(BasisTag::LinearPower),
            other => Err(Error::parse(format!("unknown basis {other:?}"))),
        }
    }
}

/// A homogeneous polynomial as an exact rational coefficient vector,
/// indexed by the canonical block order of B(n,d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCoeffs {
    n: usize,
    d: u32,
    basis: BasisTag,
    coeffs: Vec<BigRational>,
}

impl PolyCoeffs {
    pub fn new(n: usize, d: u32, basis: BasisTag, coeffs: Vec<BigRational>) -> Result<Self> {
        let expected = crate::compositions::count_weak_compositions(n, d)?;
        if num_bigint::BigUint::from(coeffs.len()) != expected {
            return Err(Error::dim(format!(
                "coefficient vector has {} entries, B({n},{d}) has {expected}",
                coeffs.len()
            )));
        }
        Ok(Self {
            n,
            d,
            basis,
            coeffs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }
}

/// Exact solve of `M x = rhs` for square integer `M`: fraction-free
/// (Bareiss) forward elimination keeps everything integral, then a
/// rational back substitution recovers the solution. Fails on singular
/// input.
pub fn solve_exact(m: &IntMatrix, rhs: &[BigRational]) -> Result<Vec<BigRational>> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "solve on a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if rhs.len() != n {
        return Err(Error::dim(format!(
            "right-hand side has {} entries for a side-{n} system",
            rhs.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    // clear denominators so the elimination stays over the integers
    let mut scale = BigInt::one();
    for r in rhs {
        scale = scale.lcm(r.denom());
    }
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            let r = &rhs[i];
            row.push(r.numer() * (&scale / r.denom()));
            row
        })
        .collect();

    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Err(Error::SingularMatrix);
        };
        a.swap(pivot, k);
        if k + 1 == n {
            break;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            let lead = std::mem::replace(&mut row[k], BigInt::zero());
            for j in k + 1..=n {
                let num = &pivot_row[k] * &row[j] - &lead * &pivot_row[j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                row[j] = q;
            }
        }
        prev = a[k][k].clone();
    }

    // rational back substitution on the triangularized system
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            if !a[i][j].is_zero() && !x[j].is_zero() {
                acc -= BigRational::from_integer(a[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / BigRational::from_integer(a[i][i].clone());
    }
    let inv_scale = BigRational::new(BigInt::one(), scale);
    for xi in &mut x {
        *xi *= &inv_scale;
    }
    Ok(x)
}

fn check_ranges(m: &IntMatrix, ranges: &[(usize, usize)]) -> Result<()> {
    let mut expect = 0usize;
    for &(start, len) in ranges {
        if start != expect || len == 0 {
            return Err(Error::invalid(
                "diagonal ranges must tile the matrix contiguously",
            ));
        }
        expect = start + len;
    }
    if expect != m.rows() || !m.is_square() {
        return Err(Error::dim(
            "diagonal ranges do not cover the matrix".to_string(),
        ));
    }
    Ok(())
}

/// Solves `M x = rhs` where `M` is block lower triangular with the given
/// diagonal ranges: forward substitution across blocks, exact elimination
/// only inside each small diagonal block.
pub fn solve_block_lower(
    m: &IntMatrix,
    ranges: &[(usize, usize)],
    rhs: &[BigRational],
) -> Result<Vec<BigRational>> {
    check_ranges(m, ranges)?;
    if rhs.len() != m.rows() {
        return Err(Error::dim("right-hand side length mismatch".to_string()));
    }
    let mut x = vec![BigRational::zero(); m.rows()];
    for &(start, len) in ranges {
        let mut local = Vec::with_capacity(len);
        for i in 0..len {
            let row = start + i;
            let mut acc = rhs[row].clone();
            for (j, xj) in x.iter().enumerate().take(start) {
                let mij = m.at(row, j);
                if !mij.is_zero() && !xj.is_zero() {
                    acc -= BigRational::from_integer(mij.clone()) * xj;
                }
            }
            local.push(acc);
        }
        let block = m.submatrix(start..start + len, start..start + len);
        let sol = solve_exact(&block, &local)?;
        x[start..start + len].clone_from_slice(&sol);
    }
    Ok(x)
}

/// Solves `Mᵀ y = rhs` where `M` is block lower triangular: `Mᵀ` is block
/// upper triangular, so blocks are processed back to front.
pub fn solve_block_upper_transposed(
    m: &IntMatrix,
    ranges: &[(usize, usize)],
    rhs: &[BigRational],
) -> Result<Vec<BigRational>> {
    check_ranges(m, ranges)?;
    if rhs.len() != m.rows() {
        return Err(Error::dim("right-hand side length mismatch".to_string()));
    }
    let n = m.rows();
    let mut y = vec![BigRational::zero(); n];
    for &(start, len) in ranges.iter().rev() {
        let mut local = Vec::with_capacity(len);
        for i in 0..len {
            let col = start + i;
            let mut acc = rhs[col].clone();
            // (Mᵀ y)_col collects m[j][col]·y_j; rows j before this block
            // sit above the diagonal of M, hence vanish
            for (j, yj) in y.iter().enumerate().skip(start + len).take(n - start - len) {
                let mjc = m.at(j, col);
                if !mjc.is_zero() && !yj.is_zero() {
                    acc -= BigRational::from_integer(mjc.clone()) * yj;
                }
            }
            local.push(acc);
        }
        // transpose of the diagonal block
        let block_t = IntMatrix::from_fn(len, len, |i, j| m.at(start + j, start + i).clone());
        let sol = solve_exact(&block_t, &local)?;
        y[start..start + len].clone_from_slice(&sol);
    }
    Ok(y)
}

/// Conversion context for one (n, d): the canonical order, V̂ in that
/// order, and its diagonal block ranges. Build once, convert many times.
pub struct Conversion {
    n: usize,
    d: u32,
    canonical: ExponentSet,
    ranges: Vec<(usize, usize)>,
    vhat: IntMatrix,
    index: HashMap<Vec<u32>, usize>,
}

impl Conversion {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        let layout = block_layout(n, d)?;
        let vhat = build_vhat(n, d, &layout.canonical)?;
        let ranges = layout.diagonal_ranges();
        let index = layout
            .canonical
            .iter()
            .enumerate()
            .map(|(i, m)| (m.entries().to_vec(), i))
            .collect();
        Ok(Self {
            n,
            d,
            canonical: layout.canonical,
            ranges,
            vhat,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// B(n,d) in the canonical block order indexing every coefficient
    /// vector.
    pub fn canonical(&self) -> &ExponentSet {
        &self.canonical
    }

    pub fn vhat(&self) -> &IntMatrix {
        &self.vhat
    }

    pub fn index_of(&self, entries: &[u32]) -> Option<usize> {
        self.index.get(entries).copied()
    }

    /// Coefficient vector selecting a single basis element.
    pub fn indicator(&self, entries: &[u32], basis: BasisTag) -> Result<PolyCoeffs> {
        let idx = self.index_of(entries).ok_or_else(|| {
            Error::invalid(format!("{entries:?} is not in B({}, {})", self.n, self.d))
        })?;
        let mut coeffs = vec![BigRational::zero(); self.canonical.len()];
        coeffs[idx] = BigRational::one();
        PolyCoeffs::new(self.n, self.d, basis, coeffs)
    }

    fn check_poly(&self, p: &PolyCoeffs, basis: BasisTag) -> Result<()> {
        if p.n != self.n || p.d != self.d {
            return Err(Error::dim(format!(
                "polynomial over (n, d) = ({}, {}) fed to a ({}, {}) conversion",
                p.n, p.d, self.n, self.d
            )));
        }
        if p.basis != basis {
            return Err(Error::invalid(format!(
                "expected a {} coefficient vector, got {}",
                basis.as_str(),
                p.basis.as_str()
            )));
        }
        Ok(())
    }

    /// Monomial coefficients c → linear-power coefficients y with
    /// `V̂ᵀ y = c`; the represented polynomial is unchanged.
    pub fn to_linear_power(&self, p: &PolyCoeffs) -> Result<PolyCoeffs> {
        self.check_poly(p, BasisTag::Monomial)?;
        let y = solve_block_upper_transposed(&self.vhat, &self.ranges, &p.coeffs)?;
        PolyCoeffs::new(self.n, self.d, BasisTag::LinearPower, y)
    }

    /// Linear-power coefficients y → monomial coefficients c = V̂ᵀ y.
    pub fn from_linear_power(&self, y: &PolyCoeffs) -> Result<PolyCoeffs> {
        self.check_poly(y, BasisTag::LinearPower)?;
        let s = self.canonical.len();
        let mut c = vec![BigRational::zero(); s];
        for (j, yj) in y.coeffs.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            for (i, ci) in c.iter_mut().enumerate() {
                let vji = self.vhat.at(j, i);
                if !vji.is_zero() {
                    *ci += BigRational::from_integer(vji.clone()) * yj;
                }
            }
        }
        PolyCoeffs::new(self.n, self.d, BasisTag::Monomial, c)
    }
}

/// One-shot wrapper around [`Conversion::to_linear_power`].
pub fn to_linear_power(p: &PolyCoeffs) -> Result<PolyCoeffs> {
    Conversion::new(p.n, p.d)?.to_linear_power(p)
}

/// One-shot wrapper around [`Conversion::from_linear_power`].
pub fn from_linear_power(y: &PolyCoeffs) -> Result<PolyCoeffs> {
    Conversion::new(y.n, y.d)?.from_linear_power(y)
}

/// Closed-form linear-power representation of the product monomial
/// x_1 x_2 ⋯ x_n: the coefficient of ⟨α, x⟩^n is
/// `(-1)^(n-k) (n-k)! / (n! n^(n-k) ∏_{α_i≠0} α_i)` with k the support
/// size of α.
pub fn product_monomial_coeffs(n: usize) -> Result<PolyCoeffs> {
    if n == 0 {
        return Err(Error::invalid("product_monomial_coeffs needs n >= 1"));
    }
    let d = u32::try_from(n).map_err(|_| Error::invalid("n too large"))?;
    let layout = block_layout(n, d)?;
    let n_fact = BigInt::from(factorial(n as u64));
    let n_int = BigInt::from(n as u64);
    let coeffs = layout
        .canonical
        .iter()
        .map(|alpha| {
            let k = alpha.support_size();
            let m = (n - k) as u32;
            let mut num = BigInt::from(factorial(u64::from(m)));
            if m % 2 == 1 {
                num = -num;
            }
            let mut den = &n_fact * int_pow(&n_int, m);
            for &e in alpha.entries() {
                if e != 0 {
                    den *= BigInt::from(e);
                }
            }
            BigRational::new(num, den)
        })
        .collect();
    PolyCoeffs::new(n, d, BasisTag::LinearPower, coeffs)
}

/// Monomial expansion of ⟨α, x⟩^d with d = |α|: the coefficient of x^β is
/// the multinomial coefficient of β times α^β. This is exactly the α-row
/// of V̂(n,d).
pub fn monomial_expansion_of_power(alpha: &Exponent) -> Result<PolyCoeffs> {
    let n = alpha.n();
    let d = alpha.degree();
    let layout = block_layout(n, d)?;
    let coeffs = layout
        .canonical
        .iter()
        .map(|beta| {
            let scale = BigInt::from(multinomial(d, beta)?);
            Ok(BigRational::from_integer(
                scale * entry_power(alpha.entries(), beta.entries()),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    PolyCoeffs::new(n, d, BasisTag::Monomial, coeffs)
}

/// JSON term: an exponent vector with a nonzero exact coefficient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub exponent: Vec<u32>,
    pub coeff: String,
}

/// JSON form of a polynomial: unlisted exponents are zero; coefficients
/// are `p/q` strings; round-trips are exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub d: u32,
    pub basis: String,
    pub terms: Vec<PolyTermJson>,
}

pub fn poly_to_json(p: &PolyCoeffs) -> Result<PolyJson> {
    let conv = Conversion::new(p.n(), p.d())?;
    let terms = conv
        .canonical()
        .iter()
        .zip(p.coeffs())
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| PolyTermJson {
            exponent: e.entries().to_vec(),
            coeff: numio::rat_to_string(c),
        })
        .collect();
    Ok(PolyJson {
        n: p.n(),
        d: p.d(),
        basis: p.basis().as_str().to_string(),
        terms,
    })
}

pub fn poly_from_json(j: &PolyJson) -> Result<PolyCoeffs> {
    let basis = BasisTag::from_str_tag(&j.basis)?;
    let conv = Conversion::new(j.n, j.d)?;
    let mut coeffs = vec![BigRational::zero(); conv.canonical().len()];
    let mut seen = vec![false; coeffs.len()];
    for term in &j.terms {
        let idx = conv.index_of(&term.exponent).ok_or_else(|| {
            Error::invalid(format!("{:?} is not in B({}, {})", term.exponent, j.n, j.d))
        })?;
        if seen[idx] {
            return Err(Error::invalid(format!(
                "duplicate term {:?}",
                term.exponent
            )));
        }
        seen[idx] = true;
        coeffs[idx] = numio::rat_from_str(&term.coeff)?;
    }
    PolyCoeffs::new(j.n, j.d, basis, coeffs)
}

pub fn poly_to_json_string(p: &PolyCoeffs) -> Result<String> {
    Ok(serde_json::to_string_pretty(&poly_to_json(p)?)?)
}

pub fn poly_from_json_string(s: &str) -> Result<PolyCoeffs> {
    poly_from_json(&serde_json::from_str(s)?)
}

fn random_rational(rng: &mut impl Rng) -> BigRational {
    let numer = rng.gen_range(-99i64..=99);
    let denom = rng.gen_range(1i64..=12);
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Round-trip identity on random rational coefficient vectors, both
/// directions, plus an exact residual check of the defining system.
pub fn sweep_roundtrip(n_max: usize, d_max: u32, cases: usize, seed: u64) -> SuiteReport {
    let params = format!("n <= {n_max}, d <= {d_max}, {cases} cases each");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    for n in 1..=n_max {
        for d in 1..=d_max {
            let conv = match Conversion::new(n, d) {
                Ok(c) => c,
                Err(e) => {
                    return SuiteReport::fail(
                        "basis-roundtrip",
                        params.clone(),
                        checked,
                        e.to_string(),
                    )
                }
            };
            let s = conv.canonical().len();
            for case in 0..cases {
                let outcome = (|| -> Result<()> {
                    let coeffs: Vec<BigRational> =
                        (0..s).map(|_| random_rational(&mut rng)).collect();
                    let p = PolyCoeffs::new(n, d, BasisTag::Monomial, coeffs)?;
                    let y = conv.to_linear_power(&p)?;
                    // the solve really satisfies V̂ᵀ y = c
                    let back = conv.from_linear_power(&y)?;
                    if back != p {
                        return Err(Error::bug("monomial round trip broke".to_string()));
                    }
                    let coeffs: Vec<BigRational> =
                        (0..s).map(|_| random_rational(&mut rng)).collect();
                    let y = PolyCoeffs::new(n, d, BasisTag::LinearPower, coeffs)?;
                    let c = conv.from_linear_power(&y)?;
                    if conv.to_linear_power(&c)? != y {
                        return Err(Error::bug("linear-power round trip broke".to_string()));
                    }
                    Ok(())
                })();
                match outcome {
                    Ok(()) => checked += 1,
                    Err(e) => {
                        return SuiteReport::fail(
                            "basis-roundtrip",
                            params.clone(),
                            checked,
                            format!("(n, d) = ({n}, {d}), case {case}: {e}"),
                        )
                    }
                }
            }
        }
    }
    SuiteReport::pass("basis-roundtrip", params, checked)
}

/// The closed-form product-monomial coefficients against the generic
/// solver: both must produce the same vector because representations in a
/// basis are unique.
pub fn sweep_product_monomial(n_max: usize) -> SuiteReport {
    let params = format!("n <= {n_max}");
    let mut checked = 0u64;
    for n in 1..=n_max {
        let outcome = (|| -> Result<()> {
            let closed = product_monomial_coeffs(n)?;
            let conv = Conversion::new(n, n as u32)?;
            let ones = vec![1u32; n];
            let indicator = conv.indicator(&ones, BasisTag::Monomial)?;
            let solved = conv.to_linear_power(&indicator)?;
            if closed != solved {
                return Err(Error::bug(format!(
                    "closed form and solver disagree on the product monomial for n = {n}"
                )));
            }
            // and the closed form expands back to the single monomial
            if conv.from_linear_power(&closed)? != indicator {
                return Err(Error::bug(format!(
                    "product-monomial coefficients do not expand to x_1⋯x_{n}"
                )));
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => checked += 1,
            Err(e) => {
                return SuiteReport::fail(
                    "product-monomial",
                    params.clone(),
                    checked,
                    e.to_string(),
                )
            }
        }
    }
    SuiteReport::pass("product-monomial", params, checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compositions::enumerate_b;
    use crate::matrix::{build_v, power_product_matrix};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rats(vs: &[(i64, i64)]) -> Vec<BigRational> {
        vs.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn solve_identity() {
        let m = IntMatrix::identity(3);
        let rhs = rats(&[(1, 2), (-3, 4), (5, 1)]);
        assert_eq!(solve_exact(&m, &rhs).unwrap(), rhs);
    }

    #[test]
    fn solve_v32_unit_vector() {
        let order = enumerate_b(3, 2).unwrap();
        let v = build_v(3, 2, &order).unwrap();
        let mut rhs = vec![BigRational::zero(); 6];
        rhs[3] = BigRational::one();
        let x = solve_exact(&v, &rhs).unwrap();
        // residual must vanish exactly
        for (i, want) in rhs.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (j, xj) in x.iter().enumerate() {
                acc += BigRational::from_integer(v.at(i, j).clone()) * xj;
            }
            assert_eq!(&acc, want);
        }
    }

    #[test]
    fn solve_matches_adjugate_inverse_3x3() {
        let order = enumerate_b(2, 2).unwrap();
        let vhat = build_vhat(2, 2, &order).unwrap();
        let det = crate::determinant::det_bareiss(&vhat).unwrap();
        // adjugate of a 3x3 by explicit cofactors
        let c = |i: usize, j: usize| vhat.at(i, j).clone();
        let adj = |i: usize, j: usize| {
            let (a, b, cc, d) = match (j, i) {
                // minor rows/cols complementary to (j, i), signed
                (0, 0) => (c(1, 1), c(1, 2), c(2, 1), c(2, 2)),
                (0, 1) => (c(1, 2), c(1, 0), c(2, 2), c(2, 0)),
                (0, 2) => (c(1, 0), c(1, 1), c(2, 0), c(2, 1)),
                (1, 0) => (c(2, 1), c(2, 2), c(0, 1), c(0, 2)),
                (1, 1) => (c(2, 2), c(2, 0), c(0, 2), c(0, 0)),
                (1, 2) => (c(2, 0), c(2, 1), c(0, 0), c(0, 1)),
                (2, 0) => (c(0, 1), c(0, 2), c(1, 1), c(1, 2)),
                (2, 1) => (c(0, 2), c(0, 0), c(1, 2), c(1, 0)),
                (2, 2) => (c(0, 0), c(0, 1), c(1, 0), c(1, 1)),
                _ => unreachable!(),
            };
            a * d - b * cc
        };
        for col in 0..3 {
            let mut rhs = vec![BigRational::zero(); 3];
            rhs[col] = BigRational::one();
            let x = solve_exact(&vhat, &rhs).unwrap();
            for (row, got) in x.iter().enumerate() {
                let expect = BigRational::new(adj(row, col), det.clone());
                assert_eq!(got, &expect, "inverse entry ({row}, {col})");
            }
        }
    }

    #[test]
    fn solve_rejects_singular() {
        let m = IntMatrix::new(
            2,
            2,
            vec![
                BigInt::from(1),
                BigInt::from(2),
                BigInt::from(2),
                BigInt::from(4),
            ],
        )
        .unwrap();
        assert!(matches!(
            solve_exact(&m, &rats(&[(1, 1), (1, 1)])),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn block_solvers_match_generic_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4usize {
            for d in 1..=4u32 {
                let layout = block_layout(n, d).unwrap();
                let v = power_product_matrix(&layout.canonical);
                let ranges = layout.diagonal_ranges();
                let rhs: Vec<BigRational> =
                    (0..v.rows()).map(|_| random_rational(&mut rng)).collect();
                let fast = solve_block_lower(&v, &ranges, &rhs).unwrap();
                let slow = solve_exact(&v, &rhs).unwrap();
                assert_eq!(fast, slow, "lower ({n}, {d})");

                let fast_t = solve_block_upper_transposed(&v, &ranges, &rhs).unwrap();
                let slow_t = solve_exact(&v.transposed(), &rhs).unwrap();
                assert_eq!(fast_t, slow_t, "upper ({n}, {d})");
            }
        }
    }

    #[test]
    fn product_monomial_small_cases() {
        let p1 = product_monomial_coeffs(1).unwrap();
        assert_eq!(p1.coeffs(), &[BigRational::one()]);

        // canonical order of B(2,2) is (2,0), (0,2), (1,1)
        let p2 = product_monomial_coeffs(2).unwrap();
        assert_eq!(p2.coeffs(), &rats(&[(-1, 8), (-1, 8), (1, 2)])[..]);
    }

    #[test]
    fn x1x2_to_linear_power() {
        let conv = Conversion::new(2, 2).unwrap();
        let p = conv.indicator(&[1, 1], BasisTag::Monomial).unwrap();
        let y = conv.to_linear_power(&p).unwrap();
        assert_eq!(y.coeffs(), &rats(&[(-1, 8), (-1, 8), (1, 2)])[..]);
        assert_eq!(conv.from_linear_power(&y).unwrap(), p);
    }

    #[test]
    fn basis_element_round_trip() {
        let conv = Conversion::new(3, 2).unwrap();
        for alpha in conv.canonical().clone().iter() {
            let expansion = monomial_expansion_of_power(alpha).unwrap();
            let y = conv.to_linear_power(&expansion).unwrap();
            let indicator = conv
                .indicator(alpha.entries(), BasisTag::LinearPower)
                .unwrap();
            assert_eq!(y, indicator, "alpha = {:?}", alpha.entries());
        }
    }

    #[test]
    fn expansion_matches_vhat_rows() {
        for n in 1..=4usize {
            for d in 1..=4u32 {
                let conv = Conversion::new(n, d).unwrap();
                for (i, alpha) in conv.canonical().clone().iter().enumerate() {
                    let expansion = monomial_expansion_of_power(alpha).unwrap();
                    // row i of V̂ in the canonical order
                    for (j, c) in expansion.coeffs().iter().enumerate() {
                        assert_eq!(c, &BigRational::from_integer(conv.vhat().at(i, j).clone()));
                    }
                    // and from_linear_power of the matching indicator agrees
                    let e = conv
                        .indicator(alpha.entries(), BasisTag::LinearPower)
                        .unwrap();
                    assert_eq!(conv.from_linear_power(&e).unwrap(), expansion);
                }
            }
        }
    }

    #[test]
    fn expansion_simple_cases() {
        // (d,0,…,0) expands to d^d · x_1^d
        let alpha = Exponent::new(vec![3, 0, 0]).unwrap();
        let p = monomial_expansion_of_power(&alpha).unwrap();
        let conv = Conversion::new(3, 3).unwrap();
        let idx = conv.index_of(&[3, 0, 0]).unwrap();
        for (j, c) in p.coeffs().iter().enumerate() {
            if j == idx {
                assert_eq!(c, &BigRational::from_integer(BigInt::from(27)));
            } else {
                assert!(c.is_zero());
            }
        }

        // (1,1) with d = 2 expands to x_1^2 + 2 x_1 x_2 + x_2^2
        let alpha = Exponent::new(vec![1, 1]).unwrap();
        let p = monomial_expansion_of_power(&alpha).unwrap();
        let conv = Conversion::new(2, 2).unwrap();
        let coeff_of = |e: &[u32]| p.coeffs()[conv.index_of(e).unwrap()].clone();
        assert_eq!(coeff_of(&[2, 0]), BigRational::one());
        assert_eq!(coeff_of(&[0, 2]), BigRational::one());
        assert_eq!(
            coeff_of(&[1, 1]),
            BigRational::from_integer(BigInt::from(2))
        );
    }

    #[test]
    fn conversion_rejects_mismatched_input() {
        let conv = Conversion::new(2, 2).unwrap();
        let wrong_basis = conv.indicator(&[1, 1], BasisTag::LinearPower).unwrap();
        assert!(conv.to_linear_power(&wrong_basis).is_err());
        let other = Conversion::new(2, 3).unwrap();
        let p = other.indicator(&[1, 2], BasisTag::Monomial).unwrap();
        assert!(conv.to_linear_power(&p).is_err());
    }

    #[test]
    fn poly_json_round_trip() {
        let conv = Conversion::new(2, 2).unwrap();
        let p =
            PolyCoeffs::new(2, 2, BasisTag::Monomial, rats(&[(0, 1), (-3, 7), (22, 5)])).unwrap();
        let s = poly_to_json_string(&p).unwrap();
        let back = poly_from_json_string(&s).unwrap();
        assert_eq!(back, p);
        // zero coefficients are not listed
        let json = poly_to_json(&p).unwrap();
        assert_eq!(json.terms.len(), 2);
        drop(conv);
    }

    #[test]
    fn poly_json_rejects_bad_terms() {
        let bad = PolyJson {
            n: 2,
            d: 2,
            basis: "monomial".to_string(),
            terms: vec![PolyTermJson {
                exponent: vec![3, 0],
                coeff: "1".into(),
            }],
        };
        assert!(poly_from_json(&bad).is_err());

        let dup = PolyJson {
            n: 2,
            d: 2,
            basis: "monomial".to_string(),
            terms: vec![
                PolyTermJson {
                    exponent: vec![1, 1],
                    coeff: "1".into(),
                },
                PolyTermJson {
                    exponent: vec![1, 1],
                    coeff: "2".into(),
                },
            ],
        };
        assert!(poly_from_json(&dup).is_err());
    }

    #[test]
    fn vhat_determinant_relation() {
        // det V̂ = (∏ multinomial coefficients) · det V
        for n in 1..=4usize {
            for d in 1..=4u32 {
                let order = enumerate_b(n, d).unwrap();
                let v = build_v(n, d, &order).unwrap();
                let vhat = build_vhat(n, d, &order).unwrap();
                let mut scale = BigInt::one();
                for alpha in order.iter() {
                    scale *= BigInt::from(multinomial(d, alpha).unwrap());
                }
                assert_eq!(
                    crate::determinant::det_bareiss(&vhat).unwrap(),
                    scale * crate::determinant::det_bareiss(&v).unwrap(),
                    "({n}, {d})"
                );
            }
        }
    }

    #[test]
    fn sweeps_pass_at_small_sizes() {
        assert!(sweep_roundtrip(3, 3, 5, 42).passed);
        assert!(sweep_product_monomial(4).passed);
    }

    mod solve_properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// On arbitrary square integer systems the solver either
            /// reports singularity or returns a solution whose residual
            /// vanishes exactly.
            #[test]
            fn solve_exact_residual_vanishes(
                n in 1usize..5,
                entries in proptest::collection::vec(-9i64..10, 16),
                rhs_raw in proptest::collection::vec((-20i64..21, 1i64..8), 4),
            ) {
                let m = IntMatrix::from_fn(n, n, |i, j| BigInt::from(entries[i * 4 + j]));
                let rhs: Vec<BigRational> = rhs_raw[..n]
                    .iter()
                    .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
                    .collect();
                match solve_exact(&m, &rhs) {
                    Ok(x) => {
                        for (i, want) in rhs.iter().enumerate() {
                            let mut acc = BigRational::zero();
                            for (j, xj) in x.iter().enumerate() {
                                acc += BigRational::from_integer(m.at(i, j).clone()) * xj;
                            }
                            prop_assert_eq!(&acc, want);
                        }
                    }
                    Err(Error::SingularMatrix) => {
                        let det = crate::determinant::det_bareiss(&m).unwrap();
                        prop_assert!(det.is_zero());
                    }
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
        }
    }
}
