use relay_gate::channel::power_budget;
use relay_gate::optimizer::{
    brute_force_optimal_delay, brute_force_optimal_f, inner_minimize_f, lagrangian_l2, shadow_price_surface, solve,
    MultiplierRanges, MultiplierState, Nu2Rule, SolverConfig, StepSchedule,
};
use relay_gate::queue::{rate_set, secondary_delay};
use relay_gate::NetworkParams;

fn cfg(gamma_th: f64) -> SolverConfig {
    SolverConfig {
        gamma_th,
        ..SolverConfig::default()
    }
}

fn gamma_at(p: &NetworkParams, f: f64) -> f64 {
    power_budget(p, rate_set(p, f).unwrap().lambda_ps).gamma
}

#[test]
fn inner_minimizer_matches_fine_scan() {
    let p = NetworkParams::default();
    let m = MultiplierState::new(0.0, 5.0, 0.0).unwrap();
    let f = inner_minimize_f(&p, &m, 0.2).unwrap();
    let (mut best_f, mut best_v) = (0.0, f64::INFINITY);
    for i in 0..=10_000 {
        let g = i as f64 * 1e-4;
        let v = lagrangian_l2(&p, g, &m, 0.2);
        if v < best_v {
            (best_f, best_v) = (g, v);
        }
    }
    assert!((f - best_f).abs() <= 1e-4, "{f} vs {best_f}");
    assert!(lagrangian_l2(&p, f, &m, 0.2) <= best_v + 1e-12);
}

#[test]
fn solver_matches_oracle_at_heavy_primary_load() {
    let p = NetworkParams::default().with_rates(0.5, 0.1);
    let r = solve(&p, &cfg(0.2)).unwrap();
    let oracle = brute_force_optimal_f(&p, 0.2, 1e-3).unwrap();
    assert!((r.f_star - oracle).abs() <= 2e-3, "{} vs {oracle}", r.f_star);
    assert!(r.gamma_star <= 0.2 + 1e-6);
    assert!(r.converged);
}

#[test]
fn oracle_knee_matches_budget_boundary() {
    // With the budget active the optimum sits on Γ(f) = Γ_th; bisection oracle.
    let p = NetworkParams::default().with_rates(0.5, 0.1);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if gamma_at(&p, mid) <= 0.3 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = solve(&p, &cfg(0.3)).unwrap();
    assert!((r.f_star - lo).abs() < 1e-6, "{} vs {lo}", r.f_star);
}

#[test]
fn anchors_on_budget_sweep() {
    let p = NetworkParams::default().with_rates(0.5, 0.1);
    let expected = [(0.05, 0.0), (0.1, 0.107), (0.2, 0.256), (0.3, 0.48), (0.4, 0.851), (0.45, 1.0)];
    for (g, f) in expected {
        assert_eq!(brute_force_optimal_f(&p, g, 1e-3).unwrap(), f, "Γ_th = {g}");
    }
}

#[test]
fn optimum_nondecreasing_in_budget() {
    let p = NetworkParams::default().with_rates(0.5, 0.1);
    let fs: Vec<f64> = (1..=20).map(|i| solve(&p, &cfg(0.05 * i as f64)).unwrap().f_star).collect();
    for w in fs.windows(2) {
        assert!(w[1] >= w[0] - 1e-9, "{fs:?}");
    }
}

#[test]
fn optimum_nonincreasing_in_heavy_primary_load() {
    let fs: Vec<f64> = [0.2, 0.3, 0.4, 0.5, 0.6]
        .iter()
        .map(|&lp| solve(&NetworkParams::default().with_rates(lp, 0.1), &cfg(0.2)).unwrap().f_star)
        .collect();
    for w in fs.windows(2) {
        assert!(w[1] <= w[0], "{fs:?}");
    }
}

#[test]
fn multipliers_stay_projected_and_dual_bounded() {
    for lp in [0.2, 0.4, 0.5] {
        let p = NetworkParams::default().with_rates(lp, 0.1);
        let r = solve(&p, &cfg(0.15)).unwrap();
        let (_, d_star) = brute_force_optimal_delay(&p, 0.15, 1e-4).unwrap();
        for t in &r.trace {
            assert!(t.nu1 >= 0.0 && t.nu2 >= 0.0 && t.xi >= 0.0);
            assert!(t.objective <= d_star + 1e-9, "λ_p={lp}: dual {} > {d_star}", t.objective);
        }
    }
}

#[test]
fn complementary_slackness_at_convergence() {
    for (lp, g) in [(0.3, 0.2), (0.5, 0.2), (0.1, 0.6), (0.4, 0.1)] {
        let p = NetworkParams::default().with_rates(lp, 0.1);
        let r = solve(&p, &cfg(g)).unwrap();
        assert!(r.converged);
        for res in [r.kkt.relay, r.kkt.power, r.kkt.secondary] {
            assert!(res.abs() <= 1e-3, "λ_p={lp} Γ_th={g}: {:?}", r.kkt);
        }
        let rates = rate_set(&p, r.f_star).unwrap();
        assert!(rates.is_stable());
        assert_eq!(r.d_s_star, secondary_delay(&p, r.f_star).unwrap().d_s);
    }
}

#[test]
fn diminishing_schedule_also_reaches_oracle() {
    let p = NetworkParams::default().with_rates(0.3, 0.1);
    let c = SolverConfig {
        schedule: StepSchedule::Diminishing,
        ..cfg(0.2)
    };
    let r = solve(&p, &c).unwrap();
    let oracle = brute_force_optimal_f(&p, 0.2, 1e-3).unwrap();
    assert!((r.f_star - oracle).abs() <= 2e-3);
}

#[test]
fn literal_nu2_rule_never_prices_the_budget() {
    // ν₁ stays 0 on a stable problem, so ν₂ never moves and primal recovery
    // alone enforces the budget.
    let p = NetworkParams::default().with_rates(0.5, 0.1);
    let c = SolverConfig {
        nu2_rule: Nu2Rule::LiteralNu1,
        ..cfg(0.2)
    };
    let r = solve(&p, &c).unwrap();
    assert_eq!(r.multipliers.nu2, 0.0);
    assert!(r.gamma_star <= 0.2 + 1e-6);
}

#[test]
fn ordinary_lagrangian_shows_duality_gap() {
    // Γ is concave in f, so without augmentation the inner minimizer jumps
    // between the endpoints and never lands on the budget boundary.
    let p = NetworkParams::default().with_rates(0.5, 0.1);
    let c = SolverConfig {
        penalty: 0.0,
        step_alpha: 0.1,
        ..cfg(0.2)
    };
    let r = solve(&p, &c).unwrap();
    for t in &r.trace {
        assert!(t.f == 0.0 || t.f == 1.0 || t.f > 0.9 || t.f < 0.1, "iterate {}", t.f);
    }
}

#[test]
fn surface_rows_follow_range_order() {
    let p = NetworkParams::default().with_rates(0.1, 0.1);
    let ranges = MultiplierRanges {
        nu1: vec![0.0, 1.0],
        nu2: vec![0.0, 5.0, 10.0],
        xi: vec![0.0, 2.0],
    };
    let cells = shadow_price_surface(&p, 0.2, &ranges);
    assert_eq!(cells.len(), 12);
    assert_eq!(cells[1].multipliers, MultiplierState::new(0.0, 0.0, 2.0).unwrap());
    assert_eq!(cells[11].multipliers, MultiplierState::new(1.0, 10.0, 2.0).unwrap());
    for c in &cells {
        assert!(c.kkt.relay <= 0.0 && c.kkt.secondary <= 0.0);
    }
}
