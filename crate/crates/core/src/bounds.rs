//! Thresholds for the maximum score and the probability bounds built on the
//! fair-binomial score distribution.
//!
//! Every player's score is `Bin(n-1, 1/2)`. With `L = ln(n-1)`,
//!
//! * `x = sqrt(2L - (1 + eps) ln L)` and `t = ceil((n-1)/2 + x sqrt((n-1)/4))`
//!   is a level the maximum score exceeds with probability tending to one;
//! * the variant with `-eps` and no ceiling, `t'`, is a level it rarely exceeds.
//!
//! `Y_t` counts players above `t` and `W_n` counts pairs of players tied at a
//! common score above `t`.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::binomial::{ln_pmf, ln_sum_decreasing, ln_tail, pmf, tail, ExactRow};
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.5;

/// `Plus` gives `t` (ceiled); `Minus` gives the real-valued `t'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsilonSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdParams {
    pub n: u64,
    pub epsilon: f64,
    pub sign: EpsilonSign,
}

impl ThresholdParams {
    pub fn new(n: u64, epsilon: f64, sign: EpsilonSign) -> Result<Self> {
        check_epsilon(epsilon)?;
        if n < 3 {
            return Err(Error::Domain(format!("ln ln(n - 1) is undefined for n = {n}")));
        }
        Ok(ThresholdParams { n, epsilon, sign })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Argument(format!("epsilon must lie strictly in (0, 1), got {epsilon}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    pub n: u64,
    /// Standardized level `x`.
    pub x: f64,
    /// `(n-1)/2 + x sqrt((n-1)/4)` before any rounding.
    pub value: f64,
}

impl Threshold {
    /// The integer threshold `t = ceil(value)`.
    pub fn ceil(&self) -> i64 {
        self.value.ceil() as i64
    }

    pub fn floor(&self) -> i64 {
        self.value.floor() as i64
    }

    /// `((t - (n-1)/2) / sqrt((n-1)/4))` for the ceiled `t`, with the bounds
    /// `x` and `x + 1/sqrt((n-1)/4)` it must lie between.
    pub fn sandwich(&self) -> (f64, f64, f64) {
        let m = (self.n - 1) as f64;
        let sd = (m / 4.0).sqrt();
        let mid = (self.ceil() as f64 - m / 2.0) / sd;
        (self.x, mid, self.x + 1.0 / sd)
    }
}

pub fn threshold(p: &ThresholdParams) -> Result<Threshold> {
    let m = (p.n - 1) as f64;
    let l = m.ln();
    let e = match p.sign {
        EpsilonSign::Plus => p.epsilon,
        EpsilonSign::Minus => -p.epsilon,
    };
    let x2 = 2.0 * l - (1.0 + e) * l.ln();
    if x2.is_nan() || x2 <= 0.0 {
        return Err(Error::Domain(format!("x^2 = {x2} is not positive for n = {}", p.n)));
    }
    let x = x2.sqrt();
    Ok(Threshold {
        n: p.n,
        x,
        value: m / 2.0 + x * (m / 4.0).sqrt(),
    })
}

fn plus_threshold(n: u64, epsilon: f64) -> Result<Threshold> {
    threshold(&ThresholdParams::new(n, epsilon, EpsilonSign::Plus)?)
}

fn require_n(n: u64, min: u64) -> Result<()> {
    if n < min {
        return Err(Error::Argument(format!("n must be at least {min}, got {n}")));
    }
    Ok(())
}

/// Asymptotic forms of `b(n-1, t)` and `B(n-1, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Asymptotics {
    /// `sqrt(2) (ln(n-1))^((1+eps)/2) / sqrt(pi (n-1)^3)`
    pub b: f64,
    /// `sqrt(2 / (pi (n-1))) e^(-x^2/2)`
    pub b_gaussian: f64,
    /// `(ln(n-1))^(eps/2) / (sqrt(4 pi) (n-1))`
    pub tail: f64,
    /// `e^(-x^2/2) / (sqrt(2 pi) x)`
    pub tail_mills: f64,
}

pub fn asymptotics(n: u64, epsilon: f64) -> Result<Asymptotics> {
    require_n(n, 4)?;
    let th = plus_threshold(n, epsilon)?;
    let m = (n - 1) as f64;
    let l = m.ln();
    let gauss = (-th.x * th.x / 2.0).exp();
    Ok(Asymptotics {
        b: 2f64.sqrt() * l.powf((1.0 + epsilon) / 2.0) / (PI * m.powi(3)).sqrt(),
        b_gaussian: (2.0 / (PI * m)).sqrt() * gauss,
        tail: l.powf(epsilon / 2.0) / ((4.0 * PI).sqrt() * m),
        tail_mills: gauss / ((2.0 * PI).sqrt() * th.x),
    })
}

pub fn asym_b(n: u64, epsilon: f64) -> Result<f64> {
    Ok(asymptotics(n, epsilon)?.b)
}

#[allow(non_snake_case)]
pub fn asym_B(n: u64, epsilon: f64) -> Result<f64> {
    Ok(asymptotics(n, epsilon)?.tail)
}

/// Upper bounds on `P(s* < t)` from negative dependence of the scores:
/// `(1 - B(n-1, t))^n <= e^(-n B(n-1, t))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerTailBound {
    pub t: i64,
    pub product_bound: f64,
    pub exp_bound: f64,
}

pub fn huber_lower_bound(n: u64, epsilon: f64) -> Result<LowerTailBound> {
    require_n(n, 4)?;
    huber_lower_bound_at(n, plus_threshold(n, epsilon)?.ceil())
}

pub fn huber_lower_bound_at(n: u64, t: i64) -> Result<LowerTailBound> {
    require_n(n, 2)?;
    let b = tail(n - 1, t);
    Ok(LowerTailBound {
        t,
        product_bound: (n as f64 * (-b).ln_1p()).exp(),
        exp_bound: (-(n as f64) * b).exp(),
    })
}

/// `(1 - B(n-1, t))^n` exactly.
pub fn huber_product_bound_exact(n: u64, t: i64) -> BigRational {
    let one_minus = BigRational::one() - ExactRow::new(n - 1).tail(t);
    num_traits::pow(one_minus, n as usize)
}

fn check_t(n: u64, t: i64) -> Result<()> {
    require_n(n, 3)?;
    if t < 0 || t as u64 > n - 1 {
        return Err(Error::Argument(format!("t = {t} outside 0..={}", n - 1)));
    }
    Ok(())
}

/// `E(Y_t) = n B(n-1, t)`.
pub fn ey(n: u64, t: i64) -> Result<f64> {
    check_t(n, t)?;
    Ok(n as f64 * tail(n - 1, t))
}

/// `Var(Y_t) = E(Y_t) - n B(n-2, t) B(n-2, t-1) - (n^2/4) b(n-2, t)^2`.
pub fn var_y(n: u64, t: i64) -> Result<f64> {
    check_t(n, t)?;
    let nf = n as f64;
    let e = nf * tail(n - 1, t);
    let b_hi = tail(n - 2, t);
    let b_lo = tail(n - 2, t - 1);
    let point = pmf(n - 2, t);
    Ok(e - nf * b_hi * b_lo - nf * nf / 4.0 * point * point)
}

pub fn ey_exact(n: u64, t: i64) -> Result<BigRational> {
    check_t(n, t)?;
    Ok(ExactRow::new(n - 1).tail(t) * BigInt::from(n))
}

pub fn var_y_exact(n: u64, t: i64) -> Result<BigRational> {
    check_t(n, t)?;
    let row = ExactRow::new(n - 2);
    let nr = BigRational::from_integer(BigInt::from(n));
    let e = ey_exact(n, t)?;
    let point = row.pmf(t);
    Ok(e - &nr * row.tail(t) * row.tail(t - 1) - &nr * &nr * &point * &point / BigInt::from(4))
}

/// `P(s_u > t, s_v > t) = B(n-2, t) B(n-2, t-1)` for distinct players.
pub fn pair_above_exact(n: u64, t: i64) -> Result<BigRational> {
    check_t(n, t)?;
    let row = ExactRow::new(n - 2);
    Ok(row.tail(t) * row.tail(t - 1))
}

fn check_h(n: u64, h: i64) -> Result<()> {
    require_n(n, 2)?;
    if h < 0 || h as u64 > n - 1 {
        return Err(Error::Argument(format!("h = {h} outside 0..={}", n - 1)));
    }
    Ok(())
}

/// `P(s_u = h, s_v = h) = C(n-2, h-1) C(n-2, h) / 2^(2(n-2))`.
pub fn pair_prob(n: u64, h: i64) -> Result<f64> {
    check_h(n, h)?;
    Ok(ln_pair_prob(n, h).exp())
}

fn ln_pair_prob(n: u64, h: i64) -> f64 {
    ln_pmf(n - 2, h - 1) + ln_pmf(n - 2, h)
}

pub fn pair_prob_exact(n: u64, h: i64) -> Result<BigRational> {
    check_h(n, h)?;
    let row = ExactRow::new(n - 2);
    Ok(row.pmf(h - 1) * row.pmf(h))
}

/// The tie count's mean above the threshold and its closed-form bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TieBound {
    pub t: i64,
    /// `n(n-1) sum_{h=t+1}^{n-1} P(s_u = h, s_v = h)`
    pub exact_sum: f64,
    /// `n(n-1) b(n-1, t) B(n-1, t)`
    pub upper_bound: f64,
    /// `(ln(n-1))^(1/2+eps) / (pi sqrt(2(n-1)))`
    pub asymptote: f64,
}

pub fn ew(n: u64, epsilon: f64) -> Result<TieBound> {
    require_n(n, 4)?;
    ew_at(n, plus_threshold(n, epsilon)?.ceil(), epsilon)
}

fn ew_at(n: u64, t: i64, epsilon: f64) -> Result<TieBound> {
    let nf = n as f64;
    let pairs = nf * (nf - 1.0);
    let last = n as i64 - 1;
    let ln_sum = ln_sum_decreasing(t + 1, last, |h| ln_pair_prob(n, h));
    let m = nf - 1.0;
    Ok(TieBound {
        t,
        exact_sum: pairs * ln_sum.exp(),
        upper_bound: pairs * (ln_pmf(n - 1, t) + ln_tail(n - 1, t)).exp(),
        asymptote: m.ln().powf(0.5 + epsilon) / (PI * (2.0 * m).sqrt()),
    })
}

/// `E(W_n)` summed exactly for threshold `t`.
pub fn ew_exact_at(n: u64, t: i64) -> Result<BigRational> {
    check_t(n, t)?;
    let mut sum = BigRational::zero();
    for h in t + 1..n as i64 {
        sum += pair_prob_exact(n, h)?;
    }
    Ok(sum * BigInt::from(n * (n - 1)))
}

/// Boole bound on `P(s* > t')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperTailBound {
    pub x_prime: f64,
    pub t_prime: f64,
    /// `n B(n-1, floor(t'))`, which bounds `P(s* > t')`.
    pub floor_bound: f64,
    /// `n B(n-1, ceil(t'))`, reported for comparison only.
    pub ceil_bound: f64,
    /// `(ln(n-1))^(-eps/2) n / (sqrt(4 pi) (n-1))`
    pub asymptote: f64,
}

impl UpperTailBound {
    /// The bound capped at one.
    pub fn value(&self) -> f64 {
        self.floor_bound.min(1.0)
    }
}

pub fn upper_tail_bound(n: u64, epsilon: f64) -> Result<UpperTailBound> {
    let th = threshold(&ThresholdParams::new(n, epsilon, EpsilonSign::Minus)?)?;
    let nf = n as f64;
    let m = nf - 1.0;
    Ok(UpperTailBound {
        x_prime: th.x,
        t_prime: th.value,
        floor_bound: nf * tail(n - 1, th.floor()),
        ceil_bound: nf * tail(n - 1, th.ceil()),
        asymptote: m.ln().powf(-epsilon / 2.0) * nf / ((4.0 * PI).sqrt() * m),
    })
}

/// `(n-1)/2 + sqrt((n-1)/4) sqrt(2 ln(n-1))`, the level the maximum score
/// concentrates around.
pub fn concentration_center(n: u64) -> Result<f64> {
    require_n(n, 3)?;
    let m = (n - 1) as f64;
    Ok(m / 2.0 + (m / 4.0).sqrt() * (2.0 * m.ln()).sqrt())
}

/// Every quantity above for one `(n, eps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub n: u64,
    pub epsilon: f64,
    pub x: f64,
    pub t: i64,
    pub t_real: f64,
    pub b_exact: f64,
    pub tail_exact: f64,
    pub asym: Asymptotics,
    pub huber_product_bound: f64,
    pub huber_exp_bound: f64,
    /// `e^(-(ln(n-1))^(eps/2) / sqrt(4 pi))`
    pub huber_exp_asym: f64,
    pub ey: f64,
    pub var_y: f64,
    /// Chebyshev bound `Var(Y_t) / E(Y_t)^2` on `P(Y_t = 0)`.
    pub chebyshev: f64,
    pub ew: TieBound,
    pub upper_tail: UpperTailBound,
    pub center: f64,
}

pub fn bounds_report(n: u64, epsilon: f64) -> Result<BoundsReport> {
    require_n(n, 4)?;
    check_epsilon(epsilon)?;
    let th = plus_threshold(n, epsilon)?;
    let t = th.ceil();
    let huber = huber_lower_bound_at(n, t)?;
    let l = ((n - 1) as f64).ln();
    let t_clamped = t.min(n as i64 - 1);
    let ey = ey(n, t_clamped)?;
    let var_y = var_y(n, t_clamped)?;
    Ok(BoundsReport {
        n,
        epsilon,
        x: th.x,
        t,
        t_real: th.value,
        b_exact: pmf(n - 1, t),
        tail_exact: tail(n - 1, t),
        asym: asymptotics(n, epsilon)?,
        huber_product_bound: huber.product_bound,
        huber_exp_bound: huber.exp_bound,
        huber_exp_asym: (-l.powf(epsilon / 2.0) / (4.0 * PI).sqrt()).exp(),
        ey,
        var_y,
        chebyshev: if ey > 0.0 { var_y / (ey * ey) } else { f64::INFINITY },
        ew: ew_at(n, t, epsilon)?,
        upper_tail: upper_tail_bound(n, epsilon)?,
        center: concentration_center(n)?,
    })
}

impl BoundsReport {
    /// `(key, value)` pairs in display order.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let g = |v: f64| format!("{v:.12e}");
        vec![
            ("n", self.n.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("x", g(self.x)),
            ("t_real", g(self.t_real)),
            ("t", self.t.to_string()),
            ("b", g(self.b_exact)),
            ("b_asym", g(self.asym.b)),
            ("b_asym_gaussian", g(self.asym.b_gaussian)),
            ("B", g(self.tail_exact)),
            ("B_asym", g(self.asym.tail)),
            ("B_asym_mills", g(self.asym.tail_mills)),
            ("huber_product_bound", g(self.huber_product_bound)),
            ("huber_exp_bound", g(self.huber_exp_bound)),
            ("huber_exp_asym", g(self.huber_exp_asym)),
            ("ey", g(self.ey)),
            ("var_y", g(self.var_y)),
            ("chebyshev", g(self.chebyshev)),
            ("ew_exact", g(self.ew.exact_sum)),
            ("ew_bound", g(self.ew.upper_bound)),
            ("ew_asym", g(self.ew.asymptote)),
            ("x_prime", g(self.upper_tail.x_prime)),
            ("t_prime", g(self.upper_tail.t_prime)),
            ("upper_tail", g(self.upper_tail.floor_bound)),
            ("upper_tail_ceil", g(self.upper_tail.ceil_bound)),
            ("upper_tail_asym", g(self.upper_tail.asymptote)),
            ("center", g(self.center)),
        ]
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields = self.fields();
        let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &fields {
            writeln!(f, "{k:<width$}  {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::rational_to_f64;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn threshold_at_101() {
        // sqrt(2 ln 100 - 1.5 ln ln 100) = sqrt(6.91957...)
        let th = plus_threshold(101, 0.5).unwrap();
        let l = 100f64.ln();
        assert!((th.x - (2.0 * l - 1.5 * l.ln()).sqrt()).abs() < 1e-14);
        assert!((th.x - 2.63050).abs() < 1e-5);
        assert!((th.value - 63.1525).abs() < 1e-3);
        assert_eq!(th.ceil(), 64);
    }

    #[test]
    fn threshold_above_half() {
        for n in 3..500 {
            let th = plus_threshold(n, 0.5).unwrap();
            assert!(th.x > 0.0);
            assert!(th.ceil() as f64 > (n - 1) as f64 / 2.0);
        }
    }

    #[test]
    fn threshold_rejects_bad_params() {
        assert!(ThresholdParams::new(2, 0.5, EpsilonSign::Plus).is_err());
        assert!(ThresholdParams::new(10, 1.0, EpsilonSign::Plus).is_err());
        assert!(ThresholdParams::new(10, 0.0, EpsilonSign::Minus).is_err());
    }

    #[test]
    fn sandwich_at_a_million() {
        let th = plus_threshold(1_000_001, 0.5).unwrap();
        let (lo, mid, hi) = th.sandwich();
        assert!(lo <= mid + 1e-12 && mid <= hi + 1e-12, "{lo} {mid} {hi}");
    }

    #[test]
    fn second_moment_examples() {
        assert_eq!(ey_exact(5, 3).unwrap(), rat(5, 16));
        assert!((ey(5, 3).unwrap() - 5.0 / 16.0).abs() < 1e-15);
        assert!(ey(5, 5).is_err());
        assert!(var_y(5, -1).is_err());
        for n in 3..=30u64 {
            for t in 0..n as i64 {
                let v = var_y_exact(n, t).unwrap();
                assert!(v >= BigRational::zero());
                assert!(v <= ey_exact(n, t).unwrap());
                let vf = var_y(n, t).unwrap();
                assert!((vf - rational_to_f64(&v)).abs() <= 1e-12 * (1.0 + vf.abs()));
            }
        }
    }

    #[test]
    fn pair_prob_examples() {
        assert_eq!(pair_prob_exact(4, 2).unwrap(), rat(1, 8));
        assert_eq!(pair_prob_exact(3, 0).unwrap(), rat(0, 1));
        assert!(pair_prob(3, 3).is_err());
        for n in 2..=20u64 {
            let row = ExactRow::new(n - 1);
            for h in 0..n as i64 {
                let p = pair_prob_exact(n, h).unwrap();
                let b = row.pmf(h);
                assert!(p <= &b * &b, "n = {n}, h = {h}");
            }
        }
    }

    #[test]
    fn ew_bound_dominates_sum() {
        for n in [10u64, 100, 1_000, 10_000] {
            let w = ew(n, 0.5).unwrap();
            assert!(w.exact_sum <= w.upper_bound, "n = {n}: {w:?}");
        }
    }

    #[test]
    fn ew_float_matches_exact_sum() {
        for n in 4..=40u64 {
            let t = plus_threshold(n, 0.5).unwrap().ceil().min(n as i64 - 1);
            let exact = rational_to_f64(&ew_exact_at(n, t).unwrap());
            let float = ew_at(n, t, 0.5).unwrap().exact_sum;
            assert!((exact - float).abs() <= 1e-12 * exact.max(1e-300), "n = {n}");
        }
    }

    #[test]
    fn huber_bound_order() {
        let mut n = 10u64;
        while n <= 1_000_000 {
            let h = huber_lower_bound(n, 0.5).unwrap();
            assert!(h.product_bound <= h.exp_bound);
            n *= 10;
        }
        assert_eq!(huber_product_bound_exact(5, 3), rat(15, 16).pow(5i32));
    }

    #[test]
    fn center_examples() {
        let c = concentration_center(101).unwrap();
        assert!((c - (50.0 + 5.0 * (2.0 * 100f64.ln()).sqrt())).abs() < 1e-12);
        assert!((c - 65.174).abs() < 1e-3);
        for n in 3..200 {
            assert!(concentration_center(n).unwrap() > (n - 1) as f64 / 2.0);
        }
        // growth like sqrt(n ln n)
        let dev = |n: u64| concentration_center(n).unwrap() - (n - 1) as f64 / 2.0;
        let scale = |n: u64| ((n - 1) as f64 * ((n - 1) as f64).ln()).sqrt();
        for n in [1_000u64, 1_000_000] {
            assert!((dev(n) / scale(n) - 0.5f64.sqrt()).abs() < 1e-12);
        }
        assert!(concentration_center(2).is_err());
    }

    #[test]
    fn upper_tail_is_probability_bound() {
        let u = upper_tail_bound(1_000_001, 0.5).unwrap();
        assert!(u.floor_bound <= 1.0, "{u:?}");
        assert!(u.ceil_bound <= u.floor_bound);
        assert_eq!(u.value(), u.floor_bound);
    }

    #[test]
    fn report_invariants() {
        for n in [4u64, 5, 10, 57, 1000, 123_456] {
            let r = bounds_report(n, 0.5).unwrap();
            assert!(r.var_y <= r.ey + 1e-15);
            assert!(r.huber_exp_bound >= r.huber_product_bound);
            for p in [r.b_exact, r.tail_exact, r.huber_exp_bound, r.huber_product_bound] {
                assert!((0.0..=1.0).contains(&p));
            }
            assert_eq!(r.fields().len(), 26);
        }
        assert!(bounds_report(3, 0.5).is_err());
    }
}
