use cellcap_core::arq_sim::{simulate_delay, SimScenario};
use cellcap_core::bounds::{lb_highdensity, lb_lowdensity, ub_powercontrol, BoundParams};
use cellcap_core::channel::{compute_sinr, Decision, SinrOptions};
use cellcap_core::geometry::{kth_nearest_cdf, nearest_dist_cdf, sample_realization, NetworkConfig, NetworkRealization};
use cellcap_core::strategies::Strategy as TxStrategy;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = [f64; 2]> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| [x, y])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sinr_is_invariant_to_common_power_scaling(
        bs in prop::collection::vec(point(), 2..12),
        powers in prop::collection::vec(0.1..10.0f64, 12),
        fading in prop::collection::vec(0.01..5.0f64, 12),
        scale in 0.01..100.0f64,
    ) {
        let real = NetworkRealization::from_points(bs, vec![], 10.0).unwrap();
        let n = real.bs_count();
        let mut cfg = NetworkConfig::<f64>::new(1.0);
        cfg.noise = 0.3;
        let dec: Vec<Decision<f64>> = powers[..n].iter().map(|&p| Decision { transmit: true, power: p }).collect();
        let silenced = vec![false; n];
        let base = compute_sinr(&real, &dec, &fading[..n], &cfg, &silenced, &SinrOptions::default()).unwrap();
        let scaled: Vec<Decision<f64>> = dec.iter().map(|d| Decision { power: d.power * scale, ..*d }).collect();
        cfg.noise *= scale;
        let other = compute_sinr(&real, &scaled, &fading[..n], &cfg, &silenced, &SinrOptions::default()).unwrap();
        prop_assert!((base.sinr - other.sinr).abs() <= 1e-9 * base.sinr);
    }

    #[test]
    fn silencing_never_lowers_sinr(
        bs in prop::collection::vec(point(), 2..12),
        mask in prop::collection::vec(any::<bool>(), 12),
    ) {
        let real = NetworkRealization::from_points(bs, vec![], 10.0).unwrap();
        let n = real.bs_count();
        let cfg = NetworkConfig::<f64>::new(1.0);
        let dec = vec![Decision { transmit: true, power: 1.0 }; n];
        let fading = vec![1.0; n];
        let none = vec![false; n];
        let mut some: Vec<bool> = mask[..n].to_vec();
        some[real.serving] = false;
        let opts = SinrOptions::default();
        let a = compute_sinr(&real, &dec, &fading, &cfg, &none, &opts).unwrap();
        let b = compute_sinr(&real, &dec, &fading, &cfg, &some, &opts).unwrap();
        prop_assert!(b.sinr >= a.sinr);
    }

    #[test]
    fn kth_nearest_cdf_is_ordered(density in 0.01..10.0f64, y in 0.01..3.0f64, k in 1u32..20) {
        let lo = kth_nearest_cdf(density, k + 1, y).unwrap();
        let hi = kth_nearest_cdf(density, k, y).unwrap();
        prop_assert!(lo <= hi + 1e-15);
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(kth_nearest_cdf(density, k, y * 1.1).unwrap() >= hi);
        let first = kth_nearest_cdf(density, 1, y).unwrap();
        prop_assert!((first - nearest_dist_cdf(density, y)).abs() <= 1e-12);
    }

    #[test]
    fn realizations_are_reproducible_and_serve_the_nearest(seed in any::<u64>(), index in 0u64..1000) {
        let cfg = NetworkConfig::<f64>::new(0.5);
        let a = sample_realization(&cfg, seed, index).unwrap();
        let b = sample_realization(&cfg, seed, index).unwrap();
        prop_assert_eq!(&a.bs_points, &b.bs_points);
        prop_assert_eq!(a.typical_d0, a.typical_dk[0]);
        prop_assert_eq!(a.typical_d0, a.bs_dist[a.serving]);
        prop_assert!(a.typical_dk.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(a.n0 >= 1 && a.is_active(a.serving));
    }

    #[test]
    fn bounds_are_ordered_and_highdensity_grows(lam in 0.05..6.0f64) {
        let p = |l: f64| BoundParams::from_config(&NetworkConfig::<f64>::new(l), 0.5, 0.5);
        let (a, b) = (p(lam), p(lam * 1.2));
        prop_assert!(lb_highdensity(&b).unwrap() > lb_highdensity(&a).unwrap());
        prop_assert!(lb_lowdensity(&a).unwrap() <= ub_powercontrol(&a).unwrap());
        prop_assert!(lb_highdensity(&a).unwrap() <= ub_powercontrol(&a).unwrap());
    }
}

#[test]
fn delay_stats_are_seed_deterministic_and_survival_is_monotone() {
    let cfg = NetworkConfig::<f64>::new(1.0);
    let mut s = SimScenario::new(cfg, TxStrategy::pure_aloha(0.5, 2.0, &cfg));
    s.n_realizations = 300;
    s.max_slots = 500;
    s.seed = 42;
    let a = simulate_delay(&s).unwrap();
    let b = simulate_delay(&s).unwrap();
    assert_eq!(a.delays(), b.delays());
    assert_eq!(a.mean_censored, b.mean_censored);
    let curve = a.survival_curve(500);
    assert_eq!(curve[0], 1.0);
    assert!(curve.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(a.survival(500), a.censored_count as f64 / a.n as f64);
    s.seed = 43;
    assert_ne!(simulate_delay(&s).unwrap().delays(), a.delays());
}
