//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use cellcap_core::arq_sim::{simulate_delay, simulate_enhanced_lb_network, simulate_on_realization, DelayStats, Engine, SimScenario};
use cellcap_core::bounds::{laplace_product_check, lb_highdensity, lb_lowdensity, ub_powercontrol, BoundParams};
use cellcap_core::channel::{one_shot_connection_prob, pathloss, FadingModel};
use cellcap_core::geometry::{kth_nearest_cdf, nearest_dist_cdf, sample_realization, NetworkConfig, NetworkRealization};
use cellcap_core::stats::{chi_square_gof, ks_test, linear_fit};
use cellcap_core::strategies::{Strategy, StrategyKind};

const LONG_HORIZON: u64 = 1_000_000_000_000;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn power_control(lam: f64, n: u64, seed: u64) -> SimScenario<f64> {
    let cfg = NetworkConfig::<f64>::new(lam);
    let mut s = SimScenario::new(cfg, Strategy::power_control(0.5, &cfg));
    s.n_realizations = n;
    s.max_slots = LONG_HORIZON;
    s.seed = seed;
    s
}

fn aloha(lam: f64, n: u64, seed: u64) -> SimScenario<f64> {
    let cfg = NetworkConfig::<f64>::new(lam);
    let mut s = SimScenario::new(cfg, Strategy::pure_aloha(0.5, 2.0, &cfg));
    s.n_realizations = n;
    s.max_slots = LONG_HORIZON;
    s.seed = seed;
    s
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}

fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(x, &ly).slope
}

#[test]
fn c01_distance_laws() {
    let lam = 1.0;
    let mut cfg = NetworkConfig::<f64>::new(lam);
    cfg.mu_density = lam;
    let n = 20_000u64;
    let (mut d0, mut d7) = (Vec::new(), Vec::new());
    for i in 0..n {
        let r = sample_realization(&cfg, 101, i).unwrap();
        d0.push(r.typical_d0);
        d7.push(r.typical_dk[6]);
    }
    let a = ks_test(&d0, |y| nearest_dist_cdf(lam, y));
    let b = ks_test(&d7, |y| kth_nearest_cdf(lam, 7, y).unwrap());
    let pass = a.p_value > 0.01 && b.p_value > 0.01;
    report(1, "distance laws", pass, format!("KS p-values d0 {:.3}, d7 {:.3}", a.p_value, b.p_value));
    assert!(pass);
}

#[test]
fn c02_geometric_delay_oracle() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (i, &(p, power, d0)) in [(0.25, 4.0, 1.0), (0.5, 2.0, 1.5), (0.8, 1.25, 0.8)].iter().enumerate() {
        let cfg = NetworkConfig::<f64>::new(1.0);
        let strat = Strategy::new(
            StrategyKind::DistanceAloha {
                p,
                power_scale: power,
                inversion: 0.0,
            },
            &cfg,
        );
        let mut s = SimScenario::new(cfg, strat);
        s.n_realizations = 20_000;
        s.max_slots = 100_000;
        s.engine = Engine::Slots;
        s.seed = 200 + i as u64;
        let real = NetworkRealization::from_points(vec![[d0, 0.0]], vec![], 10.0).unwrap();
        let st = simulate_on_realization(&s, &real).unwrap();

        let inv_gain = 1.0 / pathloss(d0, 3.0);
        let expected = 1.0 / (p * (-cfg.sinr_threshold * cfg.noise * inv_gain / power).exp());
        let z = (st.mean_censored - expected).abs() / st.std_error();

        let q = 1.0 / expected;
        let bins = 30;
        let mut observed = vec![0u64; bins + 1];
        for &d in st.delays() {
            observed[((d - 1) as usize).min(bins)] += 1;
        }
        let nn = st.n as f64;
        let mut exp_counts: Vec<f64> = (0..bins).map(|k| nn * q * (1.0 - q).powi(k as i32)).collect();
        exp_counts.push(nn * (1.0 - q).powi(bins as i32));
        let gof = chi_square_gof(&observed, &exp_counts, 5.0, 0);
        pass &= z < 3.0 && gof.p_value > 0.01;
        detail.push(format!("E={expected:.3} sim={:.3} z={z:.2} chi2 p={:.3}", st.mean_censored, gof.p_value));
    }
    report(2, "geometric delay oracle", pass, detail.join("; "));
    assert!(pass);
}

#[test]
fn c03_aloha_divergence() {
    let mut means = Vec::new();
    for tmax in [100u64, 1_000, 10_000] {
        let mut s = aloha(1.0, 10_000, 300);
        s.max_slots = tmax;
        means.push(simulate_delay(&s).unwrap().mean_censored);
    }
    let r1 = means[1] / means[0] - 1.0;
    let r2 = means[2] / means[1] - 1.0;
    let pass = r1 >= 0.2 && r2 >= 0.2;
    report(
        3,
        "aloha censored mean keeps growing",
        pass,
        format!("means {means:.2?}, increases {:.1}% and {:.1}%", 100.0 * r1, 100.0 * r2),
    );
    assert!(pass);
}

#[test]
fn c04_low_density_scaling() {
    let grid = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    let means: Vec<f64> = grid
        .iter()
        .map(|&lam| simulate_delay(&power_control(lam, 10_000, 400)).unwrap().mean_censored)
        .collect();
    let lx: Vec<f64> = grid.iter().map(|v: &f64| v.ln()).collect();
    let slope = log_slope(&lx, &means);
    let pass = (-1.8..=-1.2).contains(&slope);
    report(4, "low-density polynomial scaling", pass, format!("log-log slope {slope:.3}, means {means:.1?}"));
    assert!(pass);
}

#[test]
fn c05_high_density_scaling_and_sandwich() {
    let grid = [0.5, 1.0, 2.0, 3.0, 4.0];
    let stats: Vec<DelayStats<f64>> = grid
        .iter()
        .map(|&lam| simulate_delay(&power_control(lam, 10_000, 500)).unwrap())
        .collect();
    let means: Vec<f64> = stats.iter().map(|s| s.mean_censored).collect();
    let ly: Vec<f64> = means.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(&grid, &ly);
    let mut pass = fit.r_squared >= 0.95 && fit.slope > 0.0;
    let mut detail = vec![format!("slope {:.3} R2 {:.4}", fit.slope, fit.r_squared)];
    for (st, &lam) in stats.iter().zip(&grid) {
        if st.survival(st.max_slots) >= 1e-3 {
            detail.push(format!("lam={lam} censored, skipped"));
            continue;
        }
        let cfg = NetworkConfig::<f64>::new(lam);
        let params = BoundParams::from_config(&cfg, 0.5, st.eta_measured);
        let lb = lb_highdensity(&params).unwrap();
        let ub = ub_powercontrol(&params).unwrap();
        let ok = lb <= st.mean_censored && st.mean_censored <= ub;
        pass &= ok;
        detail.push(format!("lam={lam}: {lb:.3e} <= {:.3e} <= {ub:.3e}", st.mean_censored));
    }
    report(5, "high-density exponential growth within bounds", pass, detail.join("; "));
    assert!(pass);
}

#[test]
fn c06_laplace_product() {
    let mut pass = true;
    let mut detail = Vec::new();
    for lam in [0.5, 2.0] {
        let cfg = NetworkConfig::<f64>::new(lam);
        let strat = Strategy::power_control(0.5, &cfg);
        for i in 0..5 {
            let real = sample_realization(&cfg, 600, i).unwrap();
            let (an, emp) = laplace_product_check(&real, &cfg, &strat, 1.0, 100_000, 600 + i).unwrap();
            let z = (an - emp.value).abs() / emp.std_error;
            pass &= z < 3.0;
            detail.push(format!("{z:.2}"));
        }
    }
    report(6, "laplace product identity", pass, format!("|z| per realization {}", detail.join(" ")));
    assert!(pass);
}

#[test]
fn c07_coordination_order_invariance() {
    let grid = [1.0, 2.0, 3.0];
    let mut base = Vec::new();
    let mut coord = Vec::new();
    for &lam in &grid {
        let mut s = aloha(lam, 10_000, 700);
        base.push(simulate_delay(&s).unwrap().mean_censored);
        s.coordination_k = 7;
        coord.push(simulate_delay(&s).unwrap().mean_censored);
    }
    let lower = base.iter().zip(&coord).all(|(b, c)| c < b);
    let (s0, s7) = (log_slope(&grid, &base), log_slope(&grid, &coord));
    let change = (s7 - s0).abs() / s0;
    let pass = lower && change < 0.25;
    report(
        7,
        "coordination improves but keeps the order",
        pass,
        format!("k=0 {base:.1?} k=7 {coord:.1?}; slopes {s0:.3} vs {s7:.3} ({:.1}%)", 100.0 * change),
    );
    assert!(pass);
}

#[test]
fn c08_multi_antenna_order_invariance() {
    let grid = [2.0, 4.0, 6.0, 8.0];
    let mut single = Vec::new();
    let mut multi = Vec::new();
    for &lam in &grid {
        let mut s = aloha(lam, 10_000, 800);
        s.coordination_k = 7;
        s.max_slots = u64::MAX / 2;
        single.push(simulate_delay(&s).unwrap().mean_censored);
        s.cfg.antennas = 4;
        multi.push(simulate_delay(&s).unwrap().mean_censored);
    }
    let lower = single.iter().zip(&multi).all(|(a, b)| b < a);
    let (s1, s4) = (log_slope(&grid, &single), log_slope(&grid, &multi));
    let change = (s4 - s1).abs() / s1;
    let pass = lower && change < 0.25;
    report(
        8,
        "four antennas improve but keep the order",
        pass,
        format!("N=1 {} N=4 {}; slopes {s1:.3} vs {s4:.3} ({:.1}%)", sci(&single), sci(&multi), 100.0 * change),
    );
    assert!(pass);
}

#[test]
fn c09_amplifying_pathloss_invariance() {
    let n = 20_000;
    // distinct seeds: with amplifying path loss, matched deployments would
    // give identical estimates at both densities
    let est = |lam: f64, amplifying: bool, seed: u64| {
        let mut cfg = NetworkConfig::<f64>::new(lam);
        cfg.noise = 0.0;
        one_shot_connection_prob(&cfg, amplifying, n, seed).unwrap()
    };
    let (a_lo, a_hi) = (est(0.1, true, 900), est(10.0, true, 901));
    let (c_lo, c_hi) = (est(0.1, false, 902), est(10.0, false, 903));
    let za = a_lo.z_distance(&a_hi);
    let zc = c_lo.z_distance(&c_hi);
    let pass = za < 3.0 && zc > 3.0;
    report(
        9,
        "one-shot coverage density invariance",
        pass,
        format!(
            "amplifying {:.4}/{:.4} z={za:.2}; capped {:.4}/{:.4} z={zc:.1}",
            a_lo.value, a_hi.value, c_lo.value, c_hi.value
        ),
    );
    assert!(pass);
}

fn dominance(lam: f64, noise: f64, n: u64, seed: u64) -> (bool, f64, [f64; 2]) {
    let mut cfg = NetworkConfig::<f64>::new(lam);
    cfg.noise = noise;
    let mut s = SimScenario::new(cfg, Strategy::csit_threshold(&cfg, FadingModel::ExpUnit));
    s.n_realizations = n;
    s.max_slots = 1_000;
    s.seed = seed;
    let real = simulate_delay(&s).unwrap();
    s.enhanced_mode = true;
    let enh = simulate_enhanced_lb_network(&s).unwrap();
    let nn = n as f64;
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for t in 1..=1_000 {
        let (a, b) = (enh.survival(t), real.survival(t));
        let sigma = ((a * (1.0 - a) + b * (1.0 - b)) / nn).sqrt();
        let excess = a - b - 3.0 * sigma;
        worst = worst.max(excess);
        ok &= excess <= 0.0;
    }
    (ok, worst, [enh.survival(10), real.survival(10)])
}

#[test]
fn c10_enhanced_network_dominance() {
    let (ok_noise, worst_noise, s_noise) = dominance(2.0, 1.0, 2_000, 1000);
    let (ok_free, worst_free, s_free) = dominance(0.05, 0.0, 2_000, 1001);
    let pass = ok_noise && ok_free;
    report(
        10,
        "restricted network is stochastically faster",
        pass,
        format!(
            "max excess over 3 sigma: N=1 {worst_noise:.4}, lam=0.05 N=0 {worst_free:.4}; P(D>10) restricted/real: N=1 {:.3}/{:.3}, lam=0.05 N=0 {:.3}/{:.3}",
            s_noise[0], s_noise[1], s_free[0], s_free[1]
        ),
    );
    assert!(pass);
}

#[test]
fn c11_bound_scaling() {
    let cfg = NetworkConfig::<f64>::new(1.0);
    let params = BoundParams::from_config(&cfg, 0.5, 0.5);
    let low_grid = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2];
    let scaled: Vec<f64> = low_grid
        .iter()
        .map(|&lam: &f64| lb_lowdensity(&params.with_density(lam)).unwrap() * lam.powf(1.5))
        .collect();
    let max = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let min = scaled.iter().cloned().fold(f64::MAX, f64::min);
    let variation = max / min - 1.0;

    let high_grid: Vec<f64> = (4..=16).map(|v| v as f64).collect();
    let logs: Vec<f64> = high_grid
        .iter()
        .map(|&lam| lb_highdensity(&params.with_density(lam)).unwrap().ln())
        .collect();
    let slope = linear_fit(&high_grid, &logs).slope;
    let target = std::f64::consts::PI * params.c2();
    let slope_err = (slope - target).abs() / target;
    let pass = variation < 0.15 && slope_err < 0.01;
    report(
        11,
        "bound scaling laws",
        pass,
        format!(
            "low-density bound x lam^1.5 {scaled:.4?} varies {:.1}%; high-density log-slope {slope:.5} vs {target:.5} ({:.3}%)",
            100.0 * variation,
            100.0 * slope_err
        ),
    );
    assert!(pass);
}
