//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p tourney-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use tourney_core::binomial::{ln_pmf, ln_rational, ln_tail, relative_error_ln, ExactRow};
use tourney_core::bounds::{
    asymptotics, bounds_report, ew, pair_prob_exact, threshold, upper_tail_bound, var_y_exact,
    EpsilonSign, ThresholdParams,
};
use tourney_core::exact::{expand, extend, r_exact};
use tourney_core::oracle::{enumerate_all, Census};
use tourney_core::sim::{estimate_r_with, SimConfig};
use tourney_core::table::{read_table, table_to_string, Provenance};
use tourney_core::tournament::tournament_count;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

const SEED: u64 = 20_240_917;
const GRID: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];
const EPS: f64 = 0.5;

fn big(s: &str) -> BigUint {
    BigUint::parse_bytes(s.as_bytes(), 10).unwrap()
}

fn table1_counts() -> Vec<(usize, BigUint)> {
    [
        (4, "32"),
        (5, "600"),
        (6, "20544"),
        (7, "1218224"),
        (8, "160241152"),
        (9, "42129744768"),
        (10, "21293228876800"),
        (11, "22220602090444032"),
        (12, "45959959305969143808"),
    ]
    .into_iter()
    .map(|(n, c)| (n, big(c)))
    .collect()
}

fn exact_r(n: usize) -> f64 {
    let (_, c) = table1_counts().into_iter().find(|(k, _)| *k == n).unwrap();
    c.to_f64().unwrap() / tournament_count(n).to_f64().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1_table_one() -> Outcome {
    for (n, want) in table1_counts() {
        let got = r_exact(&expand(n).map_err(|e| e.to_string())?).unique_max_count;
        ensure(got == want, || format!("n = {n}: got {got}, expected {want}"))?;
    }
    Ok("unique-max counts for n = 4..=12 match exactly".into())
}

fn ac2_corrected_count() -> Outcome {
    let t = expand(9).map_err(|e| e.to_string())?;
    let c = t.count_of(&[2, 2, 3, 3, 4, 4, 6, 6, 6]);
    let comp = t.count_of(&[2, 2, 2, 4, 4, 5, 5, 6, 6]);
    ensure(c == BigUint::from(361_307_520u64), || format!("count {c}"))?;
    ensure(comp == c, || format!("complement count {comp}"))?;
    ensure((&c % 9u32).to_u32() == Some(0), || format!("{c} not divisible by 9"))?;
    Ok(format!("{c}, divisible by 9, equal for the complement"))
}

fn ac3_extension() -> Outcome {
    let mut prev = expand(2).map_err(|e| e.to_string())?;
    for n in 2..=8 {
        let next = expand(n + 1).map_err(|e| e.to_string())?;
        let ext = extend(&prev).map_err(|e| e.to_string())?;
        ensure(ext == next, || format!("extend(expand({n})) != expand({})", n + 1))?;
        prev = next;
    }
    // r_10 from the 9-player table only, going through the file format
    let text = table_to_string(&expand(9).map_err(|e| e.to_string())?, Provenance::Expand);
    let nine = read_table(text.as_bytes(), true).map_err(|e| e.to_string())?.table;
    let r10 = r_exact(&extend(&nine).map_err(|e| e.to_string())?);
    let want = big("21293228876800");
    ensure(r10.unique_max_count == want && r10.total == tournament_count(10), || {
        format!("r_10 = {}/{}", r10.unique_max_count, r10.total)
    })?;
    Ok(format!("n = 2..=8 entry-for-entry; r_10 = {}/2^45 = {}", want, r10.decimal(4)))
}

fn ac4_oracle() -> Outcome {
    let start = Instant::now();
    for n in 3..=6 {
        let brute = enumerate_all(n).map_err(|e| e.to_string())?;
        ensure(brute == expand(n).map_err(|e| e.to_string())?, || format!("n = {n} differs"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("n = 3..=6 identical ({secs:.2}s)"))
}

fn ac5_huber() -> Outcome {
    let mut total = 0;
    for n in 3..=5 {
        let census = Census::new(n).map_err(|e| e.to_string())?;
        for m in 2..=n {
            for strict in [true, false] {
                let (checked, violation) = census.huber_grid(m, strict).map_err(|e| e.to_string())?;
                if let Some((k, c)) = violation {
                    return Err(format!("n = {n}, m = {m}, strict = {strict}, k = {k:?}: {} > {}", c.lhs, c.rhs));
                }
                total += checked;
            }
        }
    }
    Ok(format!("{total} threshold vectors hold exactly"))
}

fn ac6_variance() -> Outcome {
    for n in [5usize, 6] {
        let census = Census::new(n).map_err(|e| e.to_string())?;
        for t in 0..n as u32 {
            let (_, var) = census.y_moments(t);
            let formula = var_y_exact(n as u64, i64::from(t)).map_err(|e| e.to_string())?;
            ensure(formula == var, || format!("n = {n}, t = {t}: {formula} vs {var}"))?;
        }
    }
    let two = BigInt::from(2);
    for n in 3..=200u64 {
        let hi = ExactRow::new(n - 1);
        let lo = ExactRow::new(n - 2);
        for t in -1..=n as i64 {
            ensure(hi.tail(t) == (lo.tail(t) + lo.tail(t - 1)) / &two, || format!("halving n = {n}, t = {t}"))?;
        }
    }
    Ok("Var(Y_t) exact for n = 5, 6 and all t; halving identity for n <= 200".into())
}

fn ac7_pair() -> Outcome {
    for n in [4usize, 5, 6] {
        let census = Census::new(n).map_err(|e| e.to_string())?;
        let total = BigInt::from(tournament_count(n));
        for h in 0..n as u32 {
            let count = census.joint_count(&[(0, h), (1, h)]).map_err(|e| e.to_string())?;
            let brute = BigRational::new(BigInt::from(count), total.clone());
            let closed = pair_prob_exact(n as u64, i64::from(h)).map_err(|e| e.to_string())?;
            ensure(closed == brute, || format!("n = {n}, h = {h}: {closed} vs {brute}"))?;
        }
    }
    for n in 2..=20u64 {
        let row = ExactRow::new(n - 1);
        for h in 0..n as i64 {
            let p = pair_prob_exact(n, h).map_err(|e| e.to_string())?;
            let b = row.pmf(h);
            ensure(p <= &b * &b, || format!("bound fails at n = {n}, h = {h}"))?;
        }
    }
    Ok("closed form equals brute force for n = 4, 5, 6; bound holds for n <= 20".into())
}

fn ac8_calibration() -> Outcome {
    let mut parts = Vec::new();
    for n in [5usize, 8, 10, 12] {
        let cfg = SimConfig::new(n, 1_000_000, SEED).map_err(|e| e.to_string())?;
        let single = estimate_r_with(&cfg, Some(1));
        let multi = estimate_r_with(&cfg, Some(4));
        ensure(single == multi, || format!("n = {n}: 1 vs 4 workers differ"))?;
        let exact = exact_r(n);
        let dev = (single.r_hat - exact).abs();
        ensure(dev <= 4.0 * single.se, || {
            format!("n = {n}: r_hat {:.5} vs {exact:.5}, |dev| {dev:.5} > 4 se {:.5}", single.r_hat, 4.0 * single.se)
        })?;
        parts.push(format!("n={n}: {:.4} ({:+.1} se)", single.r_hat, (single.r_hat - exact) / single.se));
    }
    Ok(format!("{}; identical under 1 and 4 workers", parts.join(", ")))
}

fn ac9_trend() -> Outcome {
    let mut parts = Vec::new();
    let mut prev = 0.0;
    for (n, reps, target, tol) in [
        (30usize, 1_000_000u64, 0.6881, 0.003),
        (50, 1_000_000, 0.7290, 0.003),
        (100, 1_000_000, 0.7808, 0.003),
        (10_000, 300, 0.9533, 0.06),
    ] {
        let e = estimate_r_with(&SimConfig::new(n, reps, SEED).map_err(|e| e.to_string())?, None);
        ensure((e.r_hat - target).abs() <= tol, || {
            format!("n = {n}: r_hat {:.4} outside {target} +/- {tol}", e.r_hat)
        })?;
        ensure(e.r_hat > prev, || format!("n = {n}: r_hat {:.4} not above previous {prev:.4}", e.r_hat))?;
        prev = e.r_hat;
        parts.push(format!("n={n}: {:.4}", e.r_hat));
    }
    Ok(format!("{} (increasing)", parts.join(", ")))
}

fn ac10a_ratios() -> Outcome {
    let mut parts = Vec::new();
    for n in GRID {
        let r = bounds_report(n, EPS).map_err(|e| e.to_string())?;
        let a = asymptotics(n, EPS).map_err(|e| e.to_string())?;
        let rb = r.b_exact / a.b;
        let rt = r.tail_exact / a.tail;
        ensure((0.5..=2.0).contains(&rb) && (0.5..=2.0).contains(&rt), || {
            format!("n = {n}: b ratio {rb:.4}, B ratio {rt:.4}")
        })?;
        parts.push(format!("n={n}: {rb:.3}/{rt:.3}"));
    }
    Ok(format!("b/asym and B/asym in [0.5, 2]: {}", parts.join(", ")))
}

fn ac10b_sandwich() -> Outcome {
    let mut count = 0;
    for n in GRID {
        for eps in [0.1, 0.5, 0.9] {
            let th = threshold(&ThresholdParams::new(n, eps, EpsilonSign::Plus).unwrap()).unwrap();
            let (lo, mid, hi) = th.sandwich();
            ensure(lo <= mid + 1e-12 && mid <= hi + 1e-12, || format!("n = {n}, eps = {eps}: {lo} {mid} {hi}"))?;
            count += 1;
        }
    }
    Ok(format!("x <= standardized t <= x + 2/sqrt(n-1) at {count} points"))
}

fn ac10c_logspace() -> Outcome {
    let mut ms: Vec<u64> = (1..=300).collect();
    ms.extend((301..2000).step_by(17));
    ms.push(2000);
    let mut worst = 0.0f64;
    for &m in &ms {
        let row = ExactRow::new(m);
        for k in -1..=m as i64 {
            let e = relative_error_ln(ln_tail(m, k), ln_rational(&row.tail(k)));
            worst = worst.max(e);
            if k >= 0 {
                worst = worst.max(relative_error_ln(ln_pmf(m, k), ln_rational(&row.pmf(k))));
            }
            ensure(worst <= 1e-10, || format!("m = {m}, k = {k}: relative error {worst:e}"))?;
        }
    }
    Ok(format!("{} rows up to m = 2000, worst relative error {worst:.2e}", ms.len()))
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.4e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn ac10d_tie_bound() -> Outcome {
    let values: Vec<f64> = GRID.iter().map(|&n| ew(n, EPS).unwrap().upper_bound).collect();
    ensure(strictly_decreasing(&values), || format!("E(W_n) bounds {}", sci(&values)))?;
    Ok(format!("E(W_n) bound along grid: {}", sci(&values)))
}

fn ac10e_boole_bound() -> Outcome {
    let values: Vec<f64> = GRID.iter().map(|&n| upper_tail_bound(n, EPS).unwrap().floor_bound).collect();
    ensure(strictly_decreasing(&values), || {
        format!("n B(n-1, floor t') along grid is not strictly decreasing: {}", sci(&values))
    })?;
    Ok(format!("n B(n-1, floor t') along grid: {}", sci(&values)))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("AC1", "exact unique-max counts, n = 4..12", ac1_table_one),
        ("AC2", "corrected 9-player frequency", ac2_corrected_count),
        ("AC3", "extension equivalence and r_10 via extend", ac3_extension),
        ("AC4", "brute-force oracle equivalence", ac4_oracle),
        ("AC5", "negative-dependence inequality grids", ac5_huber),
        ("AC6", "variance formula and halving identity", ac6_variance),
        ("AC7", "pair probability closed form and bound", ac7_pair),
        ("AC8", "Monte-Carlo calibration and determinism", ac8_calibration),
        ("AC9", "large-n simulated trend", ac9_trend),
        ("AC10a", "asymptotic ratios for b and B", ac10a_ratios),
        ("AC10b", "threshold sandwich", ac10b_sandwich),
        ("AC10c", "log-space tails vs exact rationals", ac10c_logspace),
        ("AC10d", "tie-count bound decreases", ac10d_tie_bound),
        ("AC10e", "Boole upper-tail bound decreases", ac10e_boole_bound),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:<6} {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:<6} {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
