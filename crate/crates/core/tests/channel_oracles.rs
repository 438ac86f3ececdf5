use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relay_gate::channel::{db_to_linear, exp_integral_e1, expected_relay_power, outage_probability, power_budget};
use relay_gate::{LinkParams, NetworkParams};

/// `∫_x^∞ e^{−t}/t dt` by Simpson's rule after `t = x·e^s`, which turns the
/// integrand into the smooth `exp(−x e^s)`.
fn e1_quadrature(x: f64) -> f64 {
    let s_max = (60.0 / x).ln().max(1.0);
    let n = 200_000;
    let h = s_max / n as f64;
    let g = |s: f64| (-x * s.exp()).exp();
    let mut acc = g(0.0) + g(s_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn e1_matches_quadrature_across_regimes() {
    for x in [1e-3, 0.05, 0.3, 0.999, 1.0, 1.001, 2.5, 7.0, 30.0] {
        assert_relative_eq!(exp_integral_e1(x), e1_quadrature(x), max_relative = 1e-9);
    }
}

#[test]
fn e1_continuous_at_method_switch() {
    let below = exp_integral_e1(1.0 - 1e-12);
    let above = exp_integral_e1(1.0 + 1e-12);
    assert_relative_eq!(below, above, max_relative = 1e-10);
}

fn monte_carlo(link: &LinkParams, n: usize, seed: u64) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut outages, mut sum, mut sum2) = (0usize, 0.0, 0.0);
    for _ in 0..n {
        let g = -link.sigma2 * (1.0 - rng.random::<f64>()).ln();
        if g * link.p_max < link.gamma_th {
            outages += 1;
        } else {
            let p = link.gamma_th / g;
            sum += p;
            sum2 += p * p;
        }
    }
    let n = n as f64;
    let mean = sum / n;
    let se = ((sum2 / n - mean * mean) / n).sqrt();
    (outages as f64 / n, mean, se)
}

#[test]
fn outage_and_power_match_monte_carlo() {
    let p = NetworkParams::default();
    for (i, link) in [p.links.p, p.links.s, p.links.ps, p.links.sp].iter().enumerate() {
        let n = 400_000;
        let (out, power, se) = monte_carlo(link, n, i as u64 + 7);
        let po = outage_probability(link);
        let po_se = (po * (1.0 - po) / n as f64).sqrt();
        assert!((out - po).abs() < 5.0 * po_se, "link {i}: {out} vs {po}");
        let e = expected_relay_power(link);
        assert!((power - e).abs() < 5.0 * se, "link {i}: {power} vs {e} (se {se})");
    }
}

#[test]
fn default_scenario_outages() {
    // 1 − exp(−1/(σ² P)) with σ² = 10^{0.4}, 10^{1.2}, 10^{0.8} (P = 0.25)
    let o = NetworkParams::default().outages();
    assert_relative_eq!(o.p, 1.0 - (-1.0 / 10f64.powf(0.4)).exp(), max_relative = 1e-14);
    assert_relative_eq!(o.p, 0.328_41, epsilon = 1e-5);
    assert_relative_eq!(o.ps, 0.061_146, epsilon = 1e-6);
    assert_relative_eq!(o.s, o.ps, max_relative = 1e-15);
    assert_relative_eq!(o.sp, 0.469_51, epsilon = 1e-5);
}

#[test]
fn decibel_conversion() {
    assert_relative_eq!(db_to_linear(8.0), 6.309_573_444_801_933, max_relative = 1e-15);
    assert_eq!(db_to_linear(0.0), 1.0);
    assert_relative_eq!(db_to_linear(-10.0), 0.1, max_relative = 1e-15);
}

#[test]
fn gamma_is_energy_share() {
    // Γ equals λ_ps E[P_sp] / (λ_ps E[P_sp] + λ_s E[P_s]) computed from the quadrature E1.
    let p = NetworkParams::default();
    let lambda_ps = 0.05;
    let e = |l: &LinkParams| l.gamma_th / l.sigma2 * e1_quadrature(l.gamma_th / (l.sigma2 * l.p_max));
    let relay = lambda_ps * e(&p.links.sp);
    let own = p.lambda_s * e(&p.links.s);
    assert_relative_eq!(power_budget(&p, lambda_ps).gamma, relay / (relay + own), max_relative = 1e-9);
}
