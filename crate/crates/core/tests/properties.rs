use canetoad::action::{minimize_action, ActionOptions, Endpoints};
use canetoad::config::RunConfig;
use canetoad::fronts::{fit_exponent, fit_speed, FitWindow, FrontTrace};
use canetoad::geometry::Metric;
use canetoad::spectral::{ground_state_q, Normalization};
use canetoad::{PhiProfile, TradeoffSpec};
use proptest::prelude::*;

fn tradeoff() -> impl Strategy<Value = TradeoffSpec> {
    prop_oneof![
        (0.05..2.0f64, 0.2..2.0f64, 0.1..2.0f64).prop_map(|(c, p, t)| TradeoffSpec::power_law(c, p, t).unwrap()),
        (0.05..2.0f64, 0.5..3.0f64, 0.1..2.0f64).prop_map(|(c, p, t)| TradeoffSpec::log_power(c, p, t).unwrap()),
        (0.1..1.5f64, 0.1..2.0f64).prop_map(|(mu, t)| TradeoffSpec::linear_plus(mu, None, t).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m_and_phi_are_monotone(spec in tradeoff(), a in 0.0..50.0f64, d in 0.0..50.0f64) {
        let tmin = spec.theta_min();
        let (lo, hi) = (tmin + a, tmin + a + d);
        prop_assert!(spec.m(tmin) == 0.0);
        prop_assert!(spec.m(hi) >= spec.m(lo));
        let phi = PhiProfile::new(spec.clone());
        prop_assert!(phi.eval_phi(tmin).unwrap().abs() < 1e-14);
        prop_assert!(phi.eval_phi(hi).unwrap() >= phi.eval_phi(lo).unwrap());
    }

    #[test]
    fn eta_inverts_phi(spec in tradeoff(), a in 0.01..2.0f64, t in 0.1..200.0f64) {
        let phi = PhiProfile::new(spec);
        let eta = phi.eta(a, t).unwrap();
        let back = phi.eval_phi(eta).unwrap();
        prop_assert!((back - a * t).abs() <= 1e-8 * a * t, "{back} vs {}", a * t);
    }

    #[test]
    fn christoffel_symmetric_in_lower_indices(tmin in 0.01..5.0f64, d in 0.0..100.0f64) {
        let c = Metric::new(tmin).unwrap().christoffel(tmin + d).unwrap();
        for k in 0..2 {
            prop_assert_eq!(c.get(k, 0, 1), c.get(k, 1, 0));
        }
    }

    #[test]
    fn linear_trace_fits(v in 0.1..10.0f64, t0 in 1.0..20.0f64) {
        let mut trace = FrontTrace::new(1e-2, 1.0);
        for k in 0..40 {
            let t = t0 + k as f64;
            trace.push(t, Some(v * t), Some(1.0 + t));
        }
        let w = FitWindow::new(t0, t0 + 39.0);
        let e = fit_exponent(&trace, w).unwrap();
        prop_assert!((e.value - 1.0).abs() <= e.stderr.max(1e-12), "{e:?}");
        let s = fit_speed(&trace, w).unwrap();
        prop_assert!((s.value - v).abs() <= 1e-9 * v);
    }

    #[test]
    fn power_trace_fits(k in 0.5..2.0f64, v in 0.1..10.0f64) {
        let mut trace = FrontTrace::new(1e-2, 0.0);
        for i in 1..=30 {
            let t = i as f64;
            trace.push(t, Some(v * t.powf(k)), None);
        }
        let e = fit_exponent(&trace, FitWindow::new(1.0, 30.0)).unwrap();
        prop_assert!((e.value - k).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// More mortality, less growth.
    #[test]
    fn eigenvalue_decreases_with_mortality(c in 0.05..1.0f64, k in 1.01..3.0f64, p in 0.3..1.5f64) {
        let lo = TradeoffSpec::power_law(c, p, 1.0).unwrap();
        let hi = TradeoffSpec::power_law(c * k, p, 1.0).unwrap();
        let g = |s: &TradeoffSpec| ground_state_q(s, 15.0, 1024, Normalization::SupOne).unwrap().eigenvalue;
        prop_assert!(g(&hi) < g(&lo));
    }

    /// With `m ≡ 0` the action scales like `1/t`.
    #[test]
    fn free_action_scales_inversely_with_time(x in -10.0..10.0f64, th in 1.0..5.0f64, t in 0.5..5.0f64, s in 1.5..4.0f64) {
        let spec = TradeoffSpec::zero(1.0).unwrap();
        let opts = ActionOptions { nodes: 100, ..ActionOptions::default() };
        let z = |t: f64| minimize_action(&spec, &Endpoints::from_origin(&spec, t, x, th), &opts).unwrap().zeta;
        let (a, b) = (z(t), z(s * t));
        prop_assert!((a - s * b).abs() <= 1e-6 * a.max(1e-12), "{a} vs {}", s * b);
    }

    #[test]
    fn optimal_paths_respect_floor_and_first_integral(
        spec in tradeoff(), t in 1.0..20.0f64, x in 0.0..40.0f64, d in 0.0..3.0f64,
    ) {
        let tmin = spec.theta_min();
        let opts = ActionOptions { nodes: 100, ..ActionOptions::default() };
        let sol = minimize_action(&spec, &Endpoints::from_origin(&spec, t, x, tmin + d), &opts).unwrap();
        prop_assert!(sol.zeta >= 0.0);
        prop_assert!(sol.best.z2.iter().all(|&z| z >= tmin));
        prop_assert!(sol.best.first_integral_spread() <= 1e-5, "{}", sol.best.first_integral_spread());
        let phi = PhiProfile::new(spec.clone()).eval_phi(sol.best.max_trait()).unwrap();
        prop_assert!(sol.zeta >= phi - 1e-6);
    }

    #[test]
    fn distance_is_symmetric(x1 in -5.0..5.0f64, t1 in 1.0..4.0f64, x2 in -5.0..5.0f64, t2 in 1.0..4.0f64) {
        let g = Metric::new(1.0).unwrap();
        let d1 = g.geodesic_distance((x1, t1), (x2, t2), 100).unwrap().distance;
        let d2 = g.geodesic_distance((x2, t2), (x1, t1), 100).unwrap().distance;
        prop_assert!((d1 - d2).abs() <= 1e-6 * d1.max(1e-9));
        prop_assert!(d1 >= (t1 - t2).abs() - 1e-9);
    }

    #[test]
    fn config_round_trips(c in 0.01..1.0f64, p in 0.1..2.0f64, tmin in 0.05..2.0f64, nx in 50usize..500, t_final in 1.0..100.0f64) {
        let text = format!(
            "name = \"prop\"\n[tradeoff]\nkind = \"power_law\"\nc = {c}\np = {p}\ntheta_min = {tmin}\n\
             [grid]\nx_min = -10.0\nx_max = 50.0\ntheta_max = {}\nnx = {nx}\nntheta = 40\n\
             [sim]\nt_final = {t_final}\n",
            tmin + 10.0
        );
        let cfg = RunConfig::parse(&text).unwrap();
        let again = RunConfig::parse(&cfg.canonical()).unwrap();
        prop_assert_eq!(cfg.hash(), again.hash());
        prop_assert_eq!(cfg.canonical(), again.canonical());
    }
}
