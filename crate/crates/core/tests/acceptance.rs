//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use velplan::cli::preset;
use velplan::oracle::{brute_meet, check_hemimetric, HemiMetricTable};
use velplan::solver::{check_profile, maneuver_time, meet_operator, slope_tolerance, BoundKind};
use velplan::{plan, Grid, PlanResult, SampledFunction};

use common::{random_below, random_instance, Instance};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// `w*(s_f)` of example2 at n = 4000, from the O(n²) oracle.
const EXAMPLE2_W_END: f64 = 721.438_028_262_896;

fn run_preset(name: &str, n: Option<usize>) -> PlanResult {
    let spec = preset(name).unwrap().to_spec(n, None).unwrap();
    plan(&spec).unwrap()
}

fn slope(w: &SampledFunction, i: usize) -> f64 {
    (w[i + 1] - w[i]) / w.grid().step()
}

fn example1_feasibility() -> Check {
    let start = Instant::now();
    let r = run_preset("example1", Some(4000));
    let elapsed = start.elapsed();
    ensure!(r.feasible, "reported infeasible: {:?}", &r.violation_report);
    ensure!(r.w_star.first() == 0.0, "w*(0) = {}", r.w_star.first());
    let end = r.w_star.last();
    ensure!(((end - 484.0) / 484.0).abs() <= 1e-6, "w*(s_f) = {end}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("w*(s_f) = {end}, {elapsed:?}"))
}

fn example2_infeasibility() -> Check {
    let r = run_preset("example2", Some(4000));
    ensure!(!r.feasible, "reported feasible");
    let n = r.w_star.grid().intervals();
    let lower: Vec<_> = r
        .violation_report
        .iter()
        .filter(|v| v.bound == BoundKind::MuMinus)
        .collect();
    ensure!(
        lower.len() == 1 && lower[0].index == n && lower[0].s == 200.0,
        "violations {lower:?}"
    );
    let end = r.w_star.last();
    ensure!(end < 1225.0, "w*(s_f) = {end}");
    ensure!(
        (end - EXAMPLE2_W_END).abs() <= 1e-9 * r.mu_plus.sup_norm(),
        "w*(s_f) = {end}, golden {EXAMPLE2_W_END}"
    );
    // Terminal approach is acceleration-limited: F reaches s_f below B.
    ensure!(
        r.forward.last() == end,
        "w*(s_f) not set by the forward pass"
    );
    Ok(format!("w*(s_f) = {end:.9}, gap {:.9}", 1225.0 - end))
}

fn example1_profile_shape() -> Check {
    let r = run_preset("example1", Some(4000));
    let w = &r.w_star;
    let g = *w.grid();
    let h = g.step();
    let idx = |s: f64| (s / h).round() as usize;
    let tol = 1e-9;

    // Initial ramp at slope 4 until the 420 plateau, reached at s = 105.
    for i in 0..idx(105.0) {
        ensure!(
            (slope(w, i) - 4.0).abs() <= tol,
            "slope {} at s = {}",
            slope(w, i),
            g.point(i)
        );
    }
    for i in idx(105.0)..=idx(124.2478) {
        ensure!(
            (w[i] - 420.0).abs() <= 1e-6,
            "w*({}) = {} off the plateau",
            g.point(i),
            w[i]
        );
    }
    // Peak between the exit ramp and terminal braking.
    let (peak, _) = (idx(134.2478)..=g.intervals())
        .map(|i| (i, w[i]))
        .fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    for i in idx(134.2478)..peak - 1 {
        ensure!(
            (slope(w, i) - 4.0).abs() <= tol,
            "exit slope {} at s = {}",
            slope(w, i),
            g.point(i)
        );
    }
    for i in peak + 1..g.intervals() {
        ensure!(
            (slope(w, i) + 10.5).abs() <= tol,
            "braking slope {} at s = {}",
            slope(w, i),
            g.point(i)
        );
    }
    ensure!(w.leq(&r.mu_plus, 0.0).unwrap(), "w* exceeds mu_plus");
    Ok(format!(
        "peak w* = {:.6} at s = {:.3}",
        w[peak],
        g.point(peak)
    ))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xA11CE);
    let mut worst = 0.0_f64;
    for k in 0..100 {
        let n = [100, 500, 2000][k % 3];
        let inst = random_instance(&mut rng, n);
        let fast = meet_operator(&inst.mu_plus, &inst.alpha_minus, &inst.alpha_plus).unwrap();
        let table = HemiMetricTable::new(&inst.alpha_minus, &inst.alpha_plus).unwrap();
        let slow = brute_meet(&inst.mu_plus, &table).unwrap();
        let gap = fast.max_abs_diff(&slow).unwrap();
        let bound = 1e-9 * inst.mu_plus.sup_norm();
        worst = worst.max(gap / inst.mu_plus.sup_norm());
        ensure!(
            gap <= bound,
            "instance {k} (n = {n}): gap {gap:e} > {bound:e}"
        );
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("worst relative gap {worst:e}, {elapsed:?}"))
}

fn m(inst: &Instance, mu: &SampledFunction) -> SampledFunction {
    meet_operator(mu, &inst.alpha_minus, &inst.alpha_plus).unwrap()
}

fn proposition_suite() -> Check {
    let mut rng = StdRng::seed_from_u64(0xB0B);
    let mut fixed_points = 0;
    let mut non_fixed = 0;
    for k in 0..100 {
        let n = rng.random_range(20..400);
        let inst = random_instance(&mut rng, n);
        let mu = &inst.mu_plus;
        let eps_idem = 1e-9 * mu.sup_norm();
        let w = m(&inst, mu);

        ensure!(w.leq(mu, 0.0).unwrap(), "{k}: dominance fails");
        let ww = m(&inst, &w);
        ensure!(
            ww.max_abs_diff(&w).unwrap() <= eps_idem,
            "{k}: not idempotent"
        );

        let lower = random_below(&mut rng, mu);
        ensure!(
            m(&inst, &lower).leq(&w, 0.0).unwrap(),
            "{k}: order preservation fails"
        );
        let other = common::piecewise_envelope(&mut rng, inst.grid, mu.sup_norm(), false);
        let lhs = m(&inst, &mu.meet(&other).unwrap());
        let rhs = w.meet(&m(&inst, &other)).unwrap();
        ensure!(
            lhs.max_abs_diff(&rhs).unwrap() <= eps_idem,
            "{k}: meet preservation fails"
        );

        let table = HemiMetricTable::new(&inst.alpha_minus, &inst.alpha_plus).unwrap();
        let report = check_hemimetric(&table, k as u64);
        ensure!(
            report.is_clean(),
            "{k}: hemi-metric violations {:?}",
            &report.violations[..1]
        );

        // Fixed-point characterization on a candidate that is feasible by
        // construction and on a perturbed one.
        let mu_minus = random_below(&mut rng, &w).map(|v| 0.5 * v).unwrap();
        let eps = 1e-6 * mu.sup_norm().max(1.0);
        let eps_slope = slope_tolerance(&inst.alpha_minus, &inst.alpha_plus);
        let candidates = [
            m(&inst, &random_below(&mut rng, mu)),
            {
                let mut v = w.clone().into_values();
                let i = rng.random_range(1..n);
                v[i] *= 0.5;
                SampledFunction::new(inst.grid, v).unwrap()
            },
            w.clone(),
        ];
        for c in candidates {
            let direct = check_profile(
                &c,
                &mu_minus,
                mu,
                &inst.alpha_minus,
                &inst.alpha_plus,
                eps,
                eps_slope,
            )
            .unwrap()
            .is_empty();
            let fixed = m(&inst, &c).max_abs_diff(&c).unwrap() <= eps_idem;
            let boxed = mu_minus.leq(&c, eps).unwrap() && c.leq(mu, eps).unwrap();
            ensure!(
                direct == (fixed && boxed),
                "{k}: direct {direct}, fixed {fixed}, in box {boxed}"
            );
            if fixed {
                fixed_points += 1;
            } else {
                non_fixed += 1;
            }
        }
    }
    ensure!(
        non_fixed > 0 && fixed_points > 0,
        "degenerate candidate mix"
    );
    Ok(format!(
        "{fixed_points} fixed points, {non_fixed} non-fixed candidates"
    ))
}

fn supremal_optimality() -> Check {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    let mut instances = 0;
    let mut alternatives = 0;
    while instances < 50 {
        let n = rng.random_range(50..600);
        let mut inst = random_instance(&mut rng, n);
        let w_star = m(&inst, &inst.mu_plus);
        // Lower bound: a random fraction of w*, so the instance is feasible.
        inst.mu_minus = random_below(&mut rng, &w_star).map(|v| 0.7 * v).unwrap();
        if !inst.mu_minus.leq(&w_star, 0.0).unwrap() {
            continue;
        }
        instances += 1;
        let t_star = maneuver_time(&w_star).unwrap().total;
        for _ in 0..20 {
            let w = m(&inst, &random_below(&mut rng, &inst.mu_plus));
            if !inst.mu_minus.leq(&w, 0.0).unwrap() {
                continue;
            }
            alternatives += 1;
            ensure!(w.leq(&w_star, 0.0).unwrap(), "feasible profile above w*");
            let t = maneuver_time(&w).unwrap().total;
            ensure!(t >= t_star - 1e-9, "time {t} beats optimum {t_star}");
        }
    }
    ensure!(alternatives > 0, "no feasible alternatives generated");
    Ok(format!(
        "{alternatives} feasible alternatives over {instances} instances"
    ))
}

fn analytic_trapezoid() -> Check {
    let (s_f, n, a) = (100.0, 2000, 2.0);
    let g = Grid::new(s_f, n).unwrap();
    let alpha_plus = SampledFunction::constant(g, a).unwrap();
    let alpha_minus = SampledFunction::constant(g, -a).unwrap();
    let mut worst_rel_time = 0.0_f64;
    for cap in [1000.0, 60.0] {
        let mu =
            SampledFunction::from_fn(g, |s| if s == 0.0 || s == s_f { 0.0 } else { cap }).unwrap();
        let w = meet_operator(&mu, &alpha_minus, &alpha_plus).unwrap();
        for (i, s) in g.points().enumerate() {
            let exact = (a * s).min(a * (s_f - s)).min(cap);
            ensure!(
                (w[i] - exact).abs() <= 1e-9,
                "cap {cap}: w({s}) = {} vs {exact}",
                w[i]
            );
        }
        let time = maneuver_time(&w).unwrap().total;
        let exact = if cap >= a * s_f / 2.0 {
            2.0 * 2.0 * (s_f / 2.0 / a).sqrt()
        } else {
            let s_c = cap / a;
            2.0 * 2.0 * (s_c / a).sqrt() + (s_f - 2.0 * s_c) / cap.sqrt()
        };
        let rel = ((time - exact) / exact).abs();
        worst_rel_time = worst_rel_time.max(rel);
        ensure!(rel <= 1e-6, "cap {cap}: time {time} vs {exact}");
    }
    Ok(format!("time relative error {worst_rel_time:e}"))
}

fn grid_convergence() -> Check {
    let w = |n| run_preset("example1", Some(n)).w_star;
    let (w1, w2, w4) = (w(4000), w(8000), w(16000));
    let coarse_gap = |c: &SampledFunction, f: &SampledFunction| {
        (0..c.len()).fold(0.0_f64, |acc, i| acc.max((c[i] - f[2 * i]).abs()))
    };
    let d1 = coarse_gap(&w1, &w2);
    let d2 = coarse_gap(&w2, &w4);
    let slack = 1e-9 * run_preset("example1", Some(4000)).mu_plus.sup_norm();
    ensure!(
        d1 <= 2.0 * d2 + slack,
        "|w4000 - w8000| = {d1:e}, |w8000 - w16000| = {d2:e}"
    );
    Ok(format!(
        "|w4000 - w8000| = {d1:e}, |w8000 - w16000| = {d2:e}"
    ))
}

fn example3_shape() -> Check {
    let r = run_preset("example3", None);
    ensure!(r.feasible, "reported infeasible");
    let tol = r.eps_feas;
    ensure!(r.v_star.max() <= 1.3 + 1e-9, "max v* = {}", r.v_star.max());
    ensure!(
        r.v_star.first() == 0.0 && r.v_star.last() == 0.0,
        "endpoint speeds not zero"
    );
    let n = r.w_star.grid().intervals();
    // Interior points where the lateral limit sets μ⁺ and w* rides on it.
    let touching: Vec<usize> = (1..n)
        .filter(|&i| r.mu_plus[i] < 1.3 * 1.3 - tol && r.w_star[i] >= r.mu_plus[i] - tol)
        .collect();
    let runs = touching.windows(2).filter(|p| p[1] == p[0] + 1).count();
    ensure!(
        runs > 0,
        "w* never follows the curvature envelope over a region"
    );
    Ok(format!(
        "{} interior points on beta/|k|, max v* = {:.4}, total time {:.4} s",
        touching.len(),
        r.v_star.max(),
        r.total_time
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 example1 feasible, w*(s_f) = 484", example1_feasibility),
        ("AC2 example2 infeasible at s_f", example2_infeasibility),
        (
            "AC3 example1 ramp/plateau/braking shape",
            example1_profile_shape,
        ),
        (
            "AC4 fast meet operator equals brute-force oracle",
            oracle_equivalence,
        ),
        ("AC5 lattice and hemi-metric properties", proposition_suite),
        (
            "AC6 w* dominates every feasible profile",
            supremal_optimality,
        ),
        ("AC7 analytic trapezoid", analytic_trapezoid),
        ("AC8 first-order grid convergence", grid_convergence),
        ("AC9 example3 structure", example3_shape),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
