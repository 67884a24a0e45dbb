//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the lines are always visible.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wproj::error::Result;
use wproj::experiments::{
    build_counterexample, find_p_threshold, sigma_e_analytic, sigma_e_montecarlo, t_minus_tp_bound_check,
    wp_mu_nu_exact, Discretization, GapEvaluator,
};
use wproj::measures::{rad_ball, vol_ball, DiscreteMeasure, GridSpec};
use wproj::ot::{CostExponent, QuantileFn};
use wproj::proj1d::{brute_force_projection_oracle, projection_from_quantile, ProjectionSpec1D};
use wproj::projnd::{project_atoms_analytic, project_capacitated, symmetric_difference_mass, CapacitatedInstance};
use wproj::props::{
    check_barycenter_preservation, check_glued_plan_optimal_1d, check_nonexpansive, check_translation_invariance,
    check_weak_nonexpansiveness, random_discrete, random_discrete_1d, CheckConfig, CheckReport,
};

/// Profile lattice used for the counterexample criteria.
const AXISYM: Discretization = Discretization::Axisym {
    spacing: 0.04,
    subsamples: 6,
};

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

/// Two-dimensional instance of up to three atoms in `[-0.5, 0.5]^2`.
fn small_2d(rng: &mut ChaCha8Rng) -> Result<DiscreteMeasure> {
    let atoms = rng.random_range(1..=3);
    random_discrete(rng, 2, atoms, 0.5)
}

fn worst_slack(reports: &[CheckReport]) -> f64 {
    reports.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
}

/// Volume of the unit `n`-ball by `V_n = 2 pi / n V_{n-2}`.
fn unit_ball_volume_by_recursion(n: usize) -> f64 {
    let mut v = [1.0, 2.0];
    for k in 2..=n {
        v[k % 2] *= 2.0 * PI / k as f64;
    }
    v[n % 2]
}

fn c1_nonexpansive_1d() -> Result<Outcome> {
    let start = Instant::now();
    let cfg = CheckConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut reports = Vec::new();
    for _ in 0..200 {
        let mu = random_discrete_1d(&mut rng, 50)?;
        let nu = random_discrete_1d(&mut rng, 50)?;
        reports.push(check_nonexpansive(&mu, &nu, CostExponent::TWO, &cfg)?);
    }
    let elapsed = start.elapsed();
    let all = reports.iter().all(|r| r.pass && r.asserted && r.tolerance == 1e-6);
    outcome(
        all && elapsed < Duration::from_secs(10),
        format!(
            "200 pairs, worst slack {:.3e} (tol 1e-6), {:.2}s of 10s",
            worst_slack(&reports),
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_pava_matches_oracle() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for p in [1.5, 2.0, 3.0] {
        for _ in 0..100 {
            let n = rng.random_range(2..=25);
            let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            q.sort_by(f64::total_cmp);
            let breaks: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let spec = ProjectionSpec1D::new(p, 1.0, n)?;
            let got = projection_from_quantile(&QuantileFn::step(breaks, q.clone())?, &spec)?.cells;
            let want = brute_force_projection_oracle(&q, p, 1.0)?;
            for (a, b) in got.iter().zip(&want) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(60),
        format!(
            "300 inputs over p in {{1.5, 2, 3}}, max |pava - oracle| {worst:.3e} (tol 1e-6), {:.2}s of 60s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c3_barycenter() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg1 = CheckConfig::default();
    let mut one = Vec::new();
    for _ in 0..100 {
        one.push(check_barycenter_preservation(&random_discrete_1d(&mut rng, 50)?, &cfg1)?);
    }
    let cfg2 = CheckConfig {
        spacing: 0.02,
        ..CheckConfig::default()
    };
    let mut two = Vec::new();
    for _ in 0..20 {
        two.push(check_barycenter_preservation(&small_2d(&mut rng)?, &cfg2)?);
    }
    let max1 = one.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let max2 = two.iter().map(|r| r.lhs).fold(0.0, f64::max);
    outcome(
        one.iter().chain(&two).all(|r| r.pass) && max1 <= 1e-9 && max2 <= 0.04,
        format!("d=1 max |shift| {max1:.2e} (tol 1e-9); d=2 h=0.02 max |shift| {max2:.2e} (tol 0.04)"),
    )
}

fn c4_translation() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = CheckConfig::default();
    let mut one = Vec::new();
    for _ in 0..50 {
        let mu = random_discrete_1d(&mut rng, 50)?;
        let nu = random_discrete_1d(&mut rng, 50)?;
        let h = rng.random_range(-3.0..3.0);
        one.push(check_translation_invariance(&mu, &nu, &[h], &cfg)?);
    }
    let mut two = Vec::new();
    for _ in 0..10 {
        let mu = small_2d(&mut rng)?;
        let nu = small_2d(&mut rng)?;
        let h: Vec<f64> = (0..2).map(|_| rng.random_range(-10i32..=10) as f64 * cfg.spacing).collect();
        two.push(check_translation_invariance(&mu, &nu, &h, &cfg)?);
    }
    let max1 = one.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let ratio2 = two.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
    outcome(
        one.iter().chain(&two).all(|r| r.pass) && max1 <= 1e-6,
        format!(
            "d=1 50 shifts max |lhs - rhs| {max1:.2e} (tol 1e-6); d=2 10 lattice shifts at h={}, worst discrepancy {:.0}% of 4*diam*h",
            cfg.spacing,
            100.0 * ratio2
        ),
    )
}

fn c5_weak_nonexpansive() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = CheckConfig::default();
    let mut weak = Vec::new();
    let mut optimal = Vec::new();
    for _ in 0..25 {
        let mu = random_discrete_1d(&mut rng, 50)?;
        let nu = random_discrete_1d(&mut rng, 50)?;
        weak.push(check_weak_nonexpansiveness(&mu, &nu, &cfg)?);
        optimal.push(check_glued_plan_optimal_1d(&mu, &nu)?);
    }
    for _ in 0..25 {
        let mu = small_2d(&mut rng)?;
        let nu = small_2d(&mut rng)?;
        weak.push(check_weak_nonexpansiveness(&mu, &nu, &cfg)?);
    }
    let worst_opt = optimal.iter().map(|r| r.lhs).fold(0.0, f64::max);
    outcome(
        weak.iter().chain(&optimal).all(|r| r.pass),
        format!(
            "50 instances (25 per d in {{1, 2}}), worst slack {:.3e}; d=1 max |gamma cost - W2^2| {worst_opt:.2e} (tol 1e-6)",
            worst_slack(&weak)
        ),
    )
}

fn c6_dirac_corollary() -> Result<Outcome> {
    let mut g2 = Vec::new();
    let mut g1 = Vec::new();
    for seed in 0..10 {
        let eval = GapEvaluator::new(2, Discretization::Sample { n: 2000 }, seed)?;
        g2.push(eval.gap(2.0)?.gap);
        g1.push(eval.gap(1.0)?.gap);
    }
    let (m2, sd2) = mean_sd(&g2);
    let (m1, sd1) = mean_sd(&g1);
    // three standard errors of the seed mean
    let tol = 3.0 * sd2 / (g2.len() as f64).sqrt();
    outcome(
        m2 <= tol,
        format!(
            "d=2 p=2 n=2000, mean gap {m2:.4} +- {sd2:.4} over 10 seeds (tol {tol:.4}); \
             informative p=1 mean gap {m1:.4} +- {sd1:.4}, positive in {}/10 seeds",
            g1.iter().filter(|g| **g > 0.0).count()
        ),
    )
}

fn c7_w1_gap() -> Result<Outcome> {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut min_scaled = f64::INFINITY;
    for d in 2..=6 {
        let inst = build_counterexample(d)?;
        let exact_r = inst.r == rad_ball(d, 0.5) && (wp_mu_nu_exact(&inst, CostExponent::ONE) - inst.r).abs() <= 1e-12;
        let r_oracle = (0.5 / unit_ball_volume_by_recursion(d)).powf(1.0 / d as f64);
        let exact_r = exact_r && (inst.r - r_oracle).abs() <= 1e-12;
        let gap = GapEvaluator::new(d, AXISYM, 0)?.gap(1.0)?.gap;
        let fine = GapEvaluator::new(d, AXISYM.doubled(d), 0)?.gap(1.0)?.gap;
        let change = (fine - gap).abs() / gap.abs();
        let scaled = gap * (d as f64).powf(1.5);
        min_scaled = min_scaled.min(scaled);
        pass &= exact_r && gap > 0.0 && fine > 0.0 && change <= 0.25;
        parts.push(format!("d={d} {gap:.5} ({:.1}%)", 100.0 * change));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "p=1 gaps (change at half cell area): {}; min gap*d^1.5 = {min_scaled:.4}; W1(mu,nu)=R exact; {:.1}s",
            parts.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0).max(1.0);
    (m, var.sqrt())
}

fn c8_threshold() -> Result<Outcome> {
    let tol_p = 0.01;
    let mut pass = true;
    let mut means = Vec::new();
    let mut parts = Vec::new();
    for d in 2..=4 {
        let mut hats = Vec::new();
        for seed in 0..10 {
            let t = find_p_threshold(d, tol_p, AXISYM, seed)?;
            pass &= t.gap_at_one > 0.0 && t.gap_at_two <= 0.0 && t.p_hat > 1.0 && t.p_hat < 2.0;
            if d == 2 {
                let beyond = GapEvaluator::new(d, AXISYM, seed)?.gap((t.p_hat + 0.5).min(2.0))?.gap;
                pass &= beyond <= 0.0;
            }
            hats.push(t.p_hat);
        }
        let (m, sd) = mean_sd(&hats);
        let spread = hats.iter().map(|h| (h - m).abs()).fold(0.0, f64::max);
        if d == 2 {
            pass &= spread <= 0.05;
        }
        parts.push(format!("p_hat({d}) = {m:.4} +- {sd:.4} (max dev {spread:.4})"));
        means.push(m);
    }
    let monotone = means.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        pass && monotone,
        format!("{}; nonincreasing in d: {monotone}", parts.join(", ")),
    )
}

fn c9_sigma_e() -> Result<Outcome> {
    let hand = 4.0 * 0.1f64.sqrt() * (1.9f64.sqrt() - 1.1f64.sqrt()) / (2.0 * PI);
    let a2 = sigma_e_analytic(2);
    let mut pass = (a2 - hand).abs() <= 1e-6;
    let mut parts = Vec::new();
    for d in [2, 3, 5, 8] {
        let a = sigma_e_analytic(d);
        let (est, se) = sigma_e_montecarlo(d, 1_000_000, d as u64)?;
        let z = (est - a).abs() / se;
        pass &= z <= 3.0;
        parts.push(format!("d={d} {a:.5} vs {est:.5} ({z:.2} se)"));
    }
    outcome(
        pass,
        format!("d=2 analytic {a2:.9} vs hand {hand:.9}; {}", parts.join(", ")),
    )
}

fn c10_geometry() -> Result<Outcome> {
    let mut worst_trip = 0.0f64;
    let mut worst_vol = 0.0f64;
    for n in 1..=64 {
        for v in [1e-3, 0.5, 1.0, 7.0] {
            worst_trip = worst_trip.max((vol_ball(n, rad_ball(n, v)) - v).abs() / v);
        }
        for r in [0.3, 1.0, 2.5] {
            worst_trip = worst_trip.max((rad_ball(n, vol_ball(n, r)) - r).abs() / r);
        }
        let oracle = unit_ball_volume_by_recursion(n);
        worst_vol = worst_vol.max((vol_ball(n, 1.0) - oracle).abs() / oracle);
    }
    let grid: Vec<f64> = (0..=100_000).map(|k| k as f64 * 1e-4).collect();
    let tp: Vec<bool> = [1.0, 1.5, 2.0].iter().map(|&p| t_minus_tp_bound_check(p, &grid).0).collect();
    outcome(
        worst_trip <= 1e-12 && worst_vol <= 1e-12 && tp.iter().all(|&b| b),
        format!(
            "n<=64 round trip rel err {worst_trip:.1e}, volume vs recursion {worst_vol:.1e} (tol 1e-12); t - t^p <= p - 1 for p=1,1.5,2: {tp:?}"
        ),
    )
}

fn c11_capacitated() -> Result<Outcome> {
    let dirac = DiscreteMeasure::dirac(vec![0.0, 0.0])?;
    let ball = project_atoms_analytic(&dirac, 1.0)?;
    let mut costs = Vec::new();
    let mut sd = f64::NAN;
    for h in [0.08, 0.04, 0.02] {
        let grid = GridSpec::covering(&[-0.8, -0.8], &[0.8, 0.8], h)?;
        let inst = CapacitatedInstance::new(dirac.clone(), grid, 1.0, CostExponent::TWO)?;
        let proj = project_capacitated(&inst)?;
        costs.push(proj.cost);
        if h == 0.02 {
            sd = symmetric_difference_mass(&proj.measure, &ball, 4)?;
        }
    }
    let monotone = costs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    outcome(
        sd <= 0.05 && monotone,
        format!(
            "d=2 h=0.02 symmetric difference {sd:.4} (tol 0.05); costs at h=0.08,0.04,0.02: {:.6}, {:.6}, {:.6}",
            costs[0], costs[1], costs[2]
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("one-dimensional nonexpansiveness", c1_nonexpansive_1d),
        ("PAVA against brute-force oracle", c2_pava_matches_oracle),
        ("barycenter preservation", c3_barycenter),
        ("translation invariance identity", c4_translation),
        ("weak nonexpansiveness", c5_weak_nonexpansive),
        ("Dirac target at p=2", c6_dirac_corollary),
        ("counterexample W1 gap", c7_w1_gap),
        ("threshold structure", c8_threshold),
        ("band mass sigma(E)", c9_sigma_e),
        ("geometry kernel", c10_geometry),
        ("capacitated projection sanity", c11_capacitated),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
