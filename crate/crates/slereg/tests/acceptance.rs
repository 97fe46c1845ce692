//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the lines show up in a
//! normal `cargo test` run. Set `SLE_REG_ACCEPTANCE=1,4,7` to run a subset.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slereg::experiments::{self, ExperimentConfig, ExperimentKind, Report};
use slereg::runner::{thread_count, Runner};
use slereg_core::exponents::{
    admissible_hoelder, admissible_pvar, admissible_pvar_by_intersection, interval_pairs, optimize_exponent, BesovParams, Objective,
};
use slereg_core::regularity::{besov_seminorm, p_variation, p_variation_bruteforce};
use slereg_core::{Complex64, DrivingPath, Kappa, SampledPath};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn runner() -> Runner {
    Runner::new(thread_count(None))
}

fn outcome(cfg: &ExperimentConfig) -> Report {
    experiments::run(cfg, &runner()).expect("experiment runs").report
}

fn k(v: f64) -> Kappa {
    Kappa::new(v).unwrap()
}

fn p_star_formula(kappa: f64) -> f64 {
    (1.0 + kappa / 8.0).min(2.0)
}

fn alpha_star_formula(kappa: f64) -> f64 {
    1.0 - kappa / (24.0 + 2.0 * kappa - 8.0 * (kappa + 8.0).sqrt())
}

fn c1_optimizer() -> Verdict {
    let mut worst: f64 = 0.0;
    for kappa in [0.5, 1.0, 2.0, 8.0 / 3.0, 4.0, 6.0, 16.0] {
        let pv = optimize_exponent(k(kappa), Objective::Pvar, &admissible_pvar(k(kappa))).unwrap();
        worst = worst.max((pv.value - p_star_formula(kappa)).abs());
        let (domain, target) = if kappa <= 1.0 {
            (admissible_pvar(k(kappa)), alpha_star_formula(kappa).min(0.5))
        } else {
            (admissible_hoelder(k(kappa)), alpha_star_formula(kappa))
        };
        let h = optimize_exponent(k(kappa), Objective::Hoelder, &domain).unwrap();
        worst = worst.max((h.value - target).abs());
    }
    verdict(worst <= 1e-6, format!("max |optimum - closed form| = {worst:.3e} (tol 1e-6)"))
}

fn c2_intervals() -> Verdict {
    let mut kappas: Vec<f64> = (1..=198).map(|i| 16.0 * f64::from(i) / 199.0).collect();
    kappas.extend([1.0, 8.0]);
    let mut worst: f64 = 0.0;
    let mut shape_mismatch = 0;
    for &kappa in &kappas {
        let a = interval_pairs(&admissible_pvar(k(kappa)));
        let b = interval_pairs(&admissible_pvar_by_intersection(k(kappa)));
        if a.len() != b.len() {
            shape_mismatch += 1;
            continue;
        }
        for ((a0, a1), (b0, b1)) in a.into_iter().zip(b) {
            worst = worst.max((a0 - b0).abs()).max((a1 - b1).abs());
        }
    }
    verdict(
        worst <= 1e-12 && shape_mismatch == 0,
        format!("{} kappa values, max endpoint gap {worst:.3e}, component-count mismatches {shape_mismatch}", kappas.len()),
    )
}

fn c3_pvar_exact() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for _ in 0..500 {
        let n = rng.random_range(2..=12);
        let pts: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let path = SampledPath::uniform(0.0, 1.0, pts).unwrap();
        for p in [1.0, 1.3, 2.0, 3.7] {
            if p_variation(&path, p).unwrap().value != p_variation_bruteforce(&path, p).unwrap().value {
                mismatches += 1;
            }
        }
    }
    verdict(mismatches == 0, format!("2000 comparisons, {mismatches} not bit-identical"))
}

fn c4_besov_closed_form() -> Verdict {
    let n = 1 << 12;
    let path = SampledPath::from_real((0..=n).map(|i| i as f64 / n as f64).collect(), &(0..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>()).unwrap();
    let mut worst: f64 = 0.0;
    for (delta, q) in [(0.7, 2.0), (0.55, 4.0)] {
        let a: f64 = q * (1.0 - delta);
        let exact = (2.0 / (a * (a + 1.0))).powf(1.0 / q);
        let got = besov_seminorm(&path, BesovParams::new(delta, q).unwrap()).unwrap().value;
        worst = worst.max((got - exact).abs() / exact);
    }
    verdict(worst < 0.01, format!("max relative error {worst:.3e} (tol 1e-2)"))
}

fn c5_simulator() -> Verdict {
    let dt = 1e-4;
    let n = 10_000;
    let d = DrivingPath::zero(1.0, n).unwrap();
    let trace = d.trace(1e-6).unwrap();
    let sup = trace.times.iter().zip(&trace.points).map(|(&t, z)| (z - Complex64::new(0.0, 2.0 * t.sqrt())).norm()).fold(0.0, f64::max);
    let driven = DrivingPath::sample(k(2.0), 1.0, n, 5).unwrap();
    let mut hydro: f64 = 0.0;
    for (i, angle) in [0.3f64, 1.2, 2.5].into_iter().enumerate() {
        let z = Complex64::from_polar(1e3, angle);
        let kk = n / 4 * (i + 1);
        let t = kk as f64 * dt;
        let g = driven.forward_flow(kk, z).unwrap();
        hydro = hydro.max((g - (z + 2.0 * t / z)).norm() / g.norm());
    }
    verdict(sup <= 1e-3 && hydro <= 1e-6, format!("sup |trace - 2i sqrt t| = {sup:.3e} (tol 1e-3); hydrodynamic rel. error {hydro:.3e} (tol 1e-6)"))
}

fn c6_scaling() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for kappa in [2.0, 4.0] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ScalingLaw, kappa, 10_000, 1.0 / 16384.0, 66);
        cfg.grid = vec![[1.0 / 16.0, 1.0 / 8.0]];
        let Report::ScalingLaw(r) = outcome(&cfg) else { unreachable!() };
        pass &= !r.rejected_at_1pct;
        parts.push(format!("kappa {kappa}: D = {:.4}, p = {:.3}", r.ks.statistic, r.ks.p_value));
    }
    verdict(pass, parts.join("; ") + " (reject if p < 0.01)")
}

fn c7_envelope() -> Verdict {
    let mut cfg = ExperimentConfig::new(ExperimentKind::DerivativeMomentScan, 2.0, 10_000, 1.0 / 16384.0, 77);
    cfg.r = Some(1.0);
    cfg.grid = [1.0, 0.25, 0.0625].iter().flat_map(|&s| [0.5, 0.25, 0.125, 0.0625].map(|y| [s, y])).collect();
    let Report::DerivativeMomentScan(r) = outcome(&cfg) else { unreachable!() };
    let unreliable = r.table.rows.iter().filter(|row| row.unreliable).count();
    let slopes: Vec<String> = r.y_exponents.iter().map(|f| format!("{:.3}", f.fit.slope)).collect();
    let exps_ok = !r.y_exponents.is_empty() && r.y_exponents.iter().all(|f| f.consistent);
    verdict(
        r.domination.pass && unreliable == 0 && exps_ok,
        format!(
            "c_hat = {:.4} from calibration half, held-out violations {:?}, unreliable rows {unreliable}; y-exponents at fixed s [{}] vs zeta = {} (slack {})",
            r.domination.c_hat,
            r.domination.failed_rows,
            slopes.join(", "),
            r.table.zeta,
            experiments::EXPONENT_SLACK
        ),
    )
}

fn c8_critical_pvar() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (kappa, target) in [(2.0, 1.25), (6.0, 1.75)] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::CriticalPvar, kappa, 200, 1.0 / 65536.0, 88);
        cfg.max_level = Some(13);
        let Report::CriticalPvar(r) = outcome(&cfg) else { unreachable!() };
        let ok = r.p_hat.is_some_and(|p| (p - target).abs() <= 0.15);
        pass &= ok;
        parts.push(format!(
            "kappa {kappa}: p_hat = {} CI [{:.3}, {:.3}] target {target}",
            r.p_hat.map_or("none".into(), |p| format!("{p:.4}")),
            r.interval.0,
            r.interval.1
        ));
    }
    verdict(pass, parts.join("; ") + " (tol 0.15)")
}

fn c9_critical_hoelder() -> Verdict {
    let mut cfg = ExperimentConfig::new(ExperimentKind::CriticalHoelder, 1.0, 200, 1.0 / 32768.0, 99);
    cfg.max_level = Some(14);
    cfg.epsilon = Some(0.1);
    let Report::CriticalHoelder(r) = outcome(&cfg) else { unreachable!() };
    verdict(
        (r.alpha_hat - 0.5).abs() <= 0.08,
        format!("alpha_hat = {:.4} CI [{:.3}, {:.3}], target 0.5 (tol 0.08), y_eval = {} sqrt(dt)", r.alpha_hat, r.interval.0, r.interval.1, r.y_factor),
    )
}

fn c10_besov_stability() -> Verdict {
    let mut cfg = ExperimentConfig::new(ExperimentKind::BesovFiniteness, 2.0, 200, 1.0 / 16384.0, 1010);
    cfg.r = Some(1.2);
    cfg.delta = Some(0.396);
    cfg.sample_levels = Some(vec![10]);
    let Report::BesovFiniteness(main) = outcome(&cfg) else { unreachable!() };
    let mut contrast = cfg.clone();
    contrast.n_traces = 50;
    contrast.delta = Some(0.95);
    contrast.contrast = true;
    contrast.sample_levels = Some(vec![8, 9, 10, 11]);
    let Report::BesovFiniteness(c) = outcome(&contrast) else { unreachable!() };
    let grows = c.refinement_growth.iter().all(|&g| g > 1.0);
    let growth: Vec<String> = c.refinement_growth.iter().map(|g| format!("{g:.3}")).collect();
    verdict(
        main.stable && grows,
        format!(
            "delta {} in (0, {:.4}): half-sample change {:.2}% (tol 5%); contrast delta 0.95 growth per refinement [{}]",
            main.delta,
            main.window.1,
            100.0 * main.half_change,
            growth.join(", ")
        ),
    )
}

fn c11_embedding() -> Verdict {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Embedding, 2.0, 50, 1.0 / 16384.0, 1111);
    cfg.r = Some(1.2);
    cfg.delta = Some(0.743);
    cfg.sample_levels = Some(vec![8]);
    cfg.synthetic_paths = Some(1000);
    let Report::Embedding(r) = outcome(&cfg) else { unreachable!() };
    verdict(
        r.stable && r.inconsistent == 0 && r.c_hat.is_finite() && r.c_hat > 0.0,
        format!(
            "C_hat = {:.4} (first half {:.4}, simulated {:.4}, synthetic {:.4}) over {} windows x {} paths; growth bound 10%",
            r.c_hat,
            r.c_hat_first_half,
            r.c_hat_simulated,
            r.c_hat_synthetic,
            r.windows.len(),
            r.simulated + r.synthetic
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("optimizer matches closed-form critical exponents", c1_optimizer),
        ("generic intersection equals closed-form admissible set", c2_intervals),
        ("p-variation DP equals exhaustive search", c3_pvar_exact),
        ("Besov seminorm of the identity path", c4_besov_closed_form),
        ("zero-driving trace and hydrodynamic normalization", c5_simulator),
        ("Brownian scaling of the derivative (KS)", c6_scaling),
        ("derivative moments dominated by a fitted envelope", c7_envelope),
        ("critical variation exponent", c8_critical_pvar),
        ("critical Hoelder exponent", c9_critical_hoelder),
        ("Besov norm stability and contrast growth", c10_besov_stability),
        ("single embedding constant", c11_embedding),
    ];
    let only: Option<Vec<usize>> = std::env::var("SLE_REG_ACCEPTANCE").ok().map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.1} s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
