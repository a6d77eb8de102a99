//! Fair-coin binomial masses `b(m, j) = C(m, j) / 2^m` and upper tails
//! `B(m, k) = P(Bin(m, 1/2) > k)`, exactly as rationals or in log space.
//!
//! Log-space masses use the saddle-point form (Stirling remainder plus the
//! deviance term `bd0`), which keeps relative error near machine precision for
//! very large `m` where `ln C(m, j)` itself is huge. Tails are summed from the
//! end nearest the mode outward with compensated summation; a tail that
//! contains the mode is obtained by symmetry from the complementary tail.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    LogSpace,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Float(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => rational_to_f64(r),
            Probability::Float(x) => *x,
        }
    }
}

/// `b(m, j)`; `j` outside `0..=m` is an argument error.
pub fn binom_pmf(m: u64, j: i64, mode: Mode) -> Result<Probability> {
    if j < 0 || j as u64 > m {
        return Err(Error::Argument(format!("pmf index {j} outside 0..={m}")));
    }
    Ok(match mode {
        Mode::Exact => Probability::Exact(pmf_exact(m, j)),
        Mode::LogSpace => Probability::Float(pmf(m, j)),
    })
}

/// `B(m, k)` for `-1 <= k <= m`; `B(m, -1) = 1` and `B(m, m) = 0`.
pub fn binom_tail(m: u64, k: i64, mode: Mode) -> Result<Probability> {
    if k < -1 || k > m as i64 {
        return Err(Error::Argument(format!("tail index {k} outside -1..={m}")));
    }
    Ok(match mode {
        Mode::Exact => Probability::Exact(tail_exact(m, k)),
        Mode::LogSpace => Probability::Float(tail(m, k)),
    })
}

pub fn binomial_coefficient(m: u64, j: u64) -> BigUint {
    if j > m {
        return BigUint::zero();
    }
    let j = j.min(m - j);
    let mut c = BigUint::one();
    for i in 0..j {
        c = c * (m - i) / (i + 1);
    }
    c
}

fn dyadic(num: BigUint, log2_den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(BigUint::one() << log2_den))
}

/// Exact `b(m, j)`; zero outside `0..=m`.
pub fn pmf_exact(m: u64, j: i64) -> BigRational {
    if j < 0 || j as u64 > m {
        return BigRational::zero();
    }
    dyadic(binomial_coefficient(m, j as u64), m)
}

/// Exact `B(m, k)`, clamped: one for `k < 0`, zero for `k >= m`.
pub fn tail_exact(m: u64, k: i64) -> BigRational {
    if k < 0 {
        return BigRational::one();
    }
    let k = k as u64;
    if k >= m {
        return BigRational::zero();
    }
    let mut sum = BigUint::zero();
    let mut c = binomial_coefficient(m, k + 1);
    for j in k + 1..=m {
        sum += &c;
        c = c * (m - j) / (j + 1);
    }
    dyadic(sum, m)
}

/// One row of exact masses and tails for repeated lookups.
#[derive(Clone, Debug)]
pub struct ExactRow {
    m: u64,
    coeffs: Vec<BigUint>,
    // upper[i] = sum_{j >= i} C(m, j)
    upper: Vec<BigUint>,
}

impl ExactRow {
    pub fn new(m: u64) -> Self {
        let mut coeffs = Vec::with_capacity(m as usize + 1);
        let mut c = BigUint::one();
        for j in 0..=m {
            coeffs.push(c.clone());
            c = c * (m - j) / (j + 1);
        }
        let mut upper = vec![BigUint::zero(); m as usize + 2];
        for j in (0..=m as usize).rev() {
            upper[j] = &upper[j + 1] + &coeffs[j];
        }
        ExactRow { m, coeffs, upper }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn pmf(&self, j: i64) -> BigRational {
        if j < 0 || j as u64 > self.m {
            return BigRational::zero();
        }
        dyadic(self.coeffs[j as usize].clone(), self.m)
    }

    pub fn tail(&self, k: i64) -> BigRational {
        if k < 0 {
            return BigRational::one();
        }
        if k as u64 >= self.m {
            return BigRational::zero();
        }
        dyadic(self.upper[k as usize + 1].clone(), self.m)
    }

    /// `C(m, j)` as an integer, zero outside the row.
    pub fn coefficient(&self, j: i64) -> BigUint {
        if j < 0 || j as u64 > self.m {
            return BigUint::zero();
        }
        self.coeffs[j as usize].clone()
    }
}

/// `ln(n!) - ln(sqrt(2 pi n) (n/e)^n)` for integer `n >= 1`.
fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        let nf = n as f64;
        let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
        return ln_fact - (nf + 0.5) * nf.ln() + nf - 0.5 * LN_2PI;
    }
    let nf = n as f64;
    let nn = nf * nf;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
}

/// Deviance term `x ln(x / np) + np - x`, evaluated without cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1;
        loop {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
        }
    }
    x * (x / np).ln() + np - x
}

/// `ln b(m, j)`; `-inf` outside `0..=m`.
pub fn ln_pmf(m: u64, j: i64) -> f64 {
    if j < 0 || j as u64 > m {
        return f64::NEG_INFINITY;
    }
    let j = j as u64;
    if j == 0 || j == m {
        return -(m as f64) * LN_2;
    }
    let (mf, jf) = (m as f64, j as f64);
    let half = mf / 2.0;
    let lc = stirlerr(m) - stirlerr(j) - stirlerr(m - j) - bd0(jf, half) - bd0(mf - jf, half);
    let lf = LN_2PI + jf.ln() + (-jf / mf).ln_1p();
    lc - 0.5 * lf
}

pub fn pmf(m: u64, j: i64) -> f64 {
    ln_pmf(m, j).exp()
}

/// Neumaier compensated sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ln sum_{j >= first} exp(ln_term(j))` for terms that decrease in `j`
/// (from `first` up to `last`).
pub(crate) fn ln_sum_decreasing(first: i64, last: i64, ln_term: impl Fn(i64) -> f64) -> f64 {
    if first > last {
        return f64::NEG_INFINITY;
    }
    let anchor = ln_term(first);
    if anchor == f64::NEG_INFINITY {
        return anchor;
    }
    let mut acc = Compensated::default();
    for j in first..=last {
        let r = (ln_term(j) - anchor).exp();
        acc.add(r);
        if r < 1e-18 * acc.value() {
            break;
        }
    }
    anchor + acc.value().ln()
}

/// `ln B(m, k)`, clamped like [`tail_exact`].
pub fn ln_tail(m: u64, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    if k as u64 >= m {
        return f64::NEG_INFINITY;
    }
    let mi = m as i64;
    if 2 * (k + 1) >= mi {
        ln_sum_decreasing(k + 1, mi, |j| ln_pmf(m, j))
    } else {
        // P(X > k) = 1 - P(X <= k) = 1 - P(X >= m - k) = 1 - B(m, m - k - 1)
        let lower = ln_tail(m, mi - k - 1).exp();
        (-lower).ln_1p()
    }
}

pub fn tail(m: u64, k: i64) -> f64 {
    ln_tail(m, k).exp()
}

/// Natural log of a nonnegative big integer, accurate to about one ulp.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let shift = x.bits().saturating_sub(64);
    let top = (x >> shift).to_f64().expect("fits in f64");
    top.ln() + shift as f64 * LN_2
}

/// Natural log of a nonnegative rational.
pub fn ln_rational(r: &BigRational) -> f64 {
    let num = r.numer().to_biguint().expect("nonnegative");
    let den = r.denom().to_biguint().expect("positive");
    ln_biguint(&num) - ln_biguint(&den)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.numer() < &BigInt::zero() { -1.0 } else { 1.0 };
    sign * ln_rational(&r.abs()).exp()
}

/// Relative error between two probabilities given by their logs.
pub fn relative_error_ln(ln_a: f64, ln_b: f64) -> f64 {
    if ln_a == f64::NEG_INFINITY && ln_b == f64::NEG_INFINITY {
        return 0.0;
    }
    (ln_a - ln_b).exp_m1().abs()
}
