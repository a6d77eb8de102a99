use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use tourney_core::binomial::ExactRow;
use tourney_core::bounds::{
    asymptotics, bounds_report, ew, huber_lower_bound, pair_prob, upper_tail_bound, var_y,
    var_y_exact,
};
use tourney_core::oracle::{enumerate_all, max_score_counts, Census};
use tourney_core::sim::{estimate_r_with, tie_stats, SimConfig, TieWindow};
use tourney_core::tournament::tournament_count;
use tourney_core::{expand, r_exact};

fn se(p: f64, reps: u64) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

#[test]
fn small_n_estimates_are_unbiased() {
    for n in 2..=6 {
        let exact = r_exact(&expand(n).unwrap()).to_f64();
        let e = estimate_r_with(&SimConfig::new(n, 200_000, 7).unwrap(), None);
        let slack = 4.0 * e.se.max(1e-9);
        assert!((e.r_hat - exact).abs() <= slack, "n = {n}: {} vs {exact}", e.r_hat);
    }
}

#[test]
fn five_player_tails_respect_the_bounds() {
    let counts = max_score_counts(&enumerate_all(5).unwrap());
    let total = BigInt::from(tournament_count(5));
    let frac = |c: BigUint| BigRational::new(BigInt::from(c), total.clone());

    // P(s* < 3) = P(every score <= 2) <= (1 - B(4, 2))^5 = (15/16)^5
    let below: BigUint = counts[..3].iter().sum();
    let product = num_traits::pow(BigRational::new(15.into(), 16.into()), 5);
    assert!(frac(below) <= product);

    let row = ExactRow::new(4);
    for k in 0..5usize {
        let above: BigUint = counts[k + 1..].iter().sum();
        let boole = row.tail(k as i64) * BigRational::from_integer(5.into());
        assert!(frac(above) <= boole, "k = {k}");
    }
}

#[test]
fn variance_formula_matches_enumeration() {
    let census = Census::new(5).unwrap();
    let (_, var) = census.y_moments(2);
    assert_eq!(var_y_exact(5, 2).unwrap(), var);
    let approx = var_y(5, 2).unwrap();
    assert!((approx - var.to_f64().unwrap()).abs() < 1e-12);
    assert!(var > BigRational::zero() && var < BigRational::from_integer(5.into()));
}

#[test]
fn pair_probability_is_below_product_of_marginals() {
    for n in 3..=40u64 {
        let row = ExactRow::new(n - 1);
        for h in 0..n as i64 {
            let b = row.pmf(h).to_f64().unwrap();
            assert!(pair_prob(n, h).unwrap() <= b * b * (1.0 + 1e-12), "n = {n}, h = {h}");
        }
    }
}

#[test]
fn tail_asymptote_forms_agree_slowly() {
    // The Mills-ratio form exceeds the power form by sqrt(2 ln(n-1)) / x,
    // which tends to one only at logarithmic speed.
    let mut prev = f64::INFINITY;
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let a = asymptotics(n, 0.5).unwrap();
        let r = bounds_report(n, 0.5).unwrap();
        let ratio = a.tail_mills / a.tail;
        let predicted = (2.0 * ((n - 1) as f64).ln()).sqrt() / r.x;
        assert!((ratio / predicted - 1.0).abs() < 1e-12);
        assert!(ratio > 1.0 && ratio < prev, "n = {n}: {ratio}");
        prev = ratio;
    }
    assert!(prev - 1.0 < 0.10, "{prev}");
    // the mass forms are the same expression written two ways
    let a = asymptotics(1_000_000, 0.5).unwrap();
    assert!((a.b / a.b_gaussian - 1.0).abs() < 1e-12);
}

#[test]
fn lower_tail_bound_tracks_its_asymptote() {
    let r = bounds_report(1_000_000, 0.5).unwrap();
    assert!((r.huber_exp_bound / r.huber_exp_asym - 1.0).abs() < 0.10);
    assert!(r.huber_product_bound <= r.huber_exp_bound);
}

#[test]
fn tie_bound_tracks_its_asymptote() {
    let b = ew(1_000_000, 0.5).unwrap();
    assert!(b.exact_sum <= b.upper_bound);
    assert!((b.upper_bound / b.asymptote - 1.0).abs() < 0.25, "{} vs {}", b.upper_bound, b.asymptote);
}

#[test]
fn large_n_maximum_is_bracketed_by_the_tail_bounds() {
    let n = 10_000;
    let reps = 300;
    let cfg = SimConfig::new(n, reps, 42).unwrap();
    let stats = tie_stats(&cfg, TieWindow::AtOrAbove, None).unwrap();
    assert_eq!(stats.inconsistent, 0);

    // P(s* <= t) is at most the product bound
    let lower = huber_lower_bound(n as u64, 0.5).unwrap();
    let below = stats.smax_cdf(lower.t);
    assert!(below <= lower.product_bound + 4.0 * se(lower.product_bound, reps), "{below}");
    assert!(stats.frac_smax_above_t >= 1.0 - lower.product_bound - 4.0 * se(lower.product_bound, reps));

    // P(s* > floor t') is at most the union bound
    let upper = upper_tail_bound(n as u64, 0.5).unwrap();
    let above = 1.0 - stats.smax_cdf(upper.t_prime.floor() as i64);
    assert!(above <= upper.value() + 4.0 * se(upper.value(), reps), "{above}");

    // a shared maximum at or above t is a tie in the window
    let shared_high = (1.0 - stats.frac_unique_max) - stats.smax_cdf(lower.t - 1);
    assert!(stats.frac_w_positive >= shared_high - 1e-12);
}
