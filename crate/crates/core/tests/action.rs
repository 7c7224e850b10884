use canetoad::action::{action_of_trajectory, minimize_action, ActionOptions, Endpoints, Trajectory};
use canetoad::TradeoffSpec;

mod common;
use common::{brute_force, reduced};

#[test]
fn optimizer_agrees_with_brute_force() {
    let cases = [
        (
            TradeoffSpec::power_law(0.1, 1.0 / 3.0, 0.1).unwrap(),
            10.0,
            20.0,
            0.1,
            12.0,
        ),
        (
            TradeoffSpec::power_law(0.1, 1.0 / 3.0, 0.1).unwrap(),
            20.0,
            60.0,
            2.0,
            30.0,
        ),
        (TradeoffSpec::power_law(0.5, 1.0, 1.0).unwrap(), 5.0, 10.0, 1.0, 8.0),
        (TradeoffSpec::zero(1.0).unwrap(), 4.0, 12.0, 1.0, 12.0),
    ];
    let opts = ActionOptions {
        nodes: 8,
        ..ActionOptions::default()
    };
    for (spec, t, x, theta, hi) in cases {
        let sol = minimize_action(&spec, &Endpoints::from_origin(&spec, t, x, theta), &opts).unwrap();
        let brute = brute_force(&spec, t, x, theta, 8, hi);
        assert!(sol.zeta <= brute * (1.0 + 1e-9), "t={t} x={x}: {} > {brute}", sol.zeta);
        assert!(brute <= 1.05 * sol.zeta, "t={t} x={x}: {brute} vs {}", sol.zeta);
        let h = t / 8.0;
        assert!((reduced(&spec, x, h, &sol.best.z2) - sol.zeta).abs() < 1e-9 * sol.zeta);
    }
}

fn sampled(spec: &TradeoffSpec, t: f64, m: usize, f: impl Fn(f64) -> (f64, f64)) -> Trajectory {
    let times: Vec<f64> = (0..=m).map(|k| t * k as f64 / m as f64).collect();
    let (z1, z2) = times.iter().map(|&s| f(s / t)).unzip();
    Trajectory::new(times, z1, z2, spec).unwrap()
}

#[test]
fn beats_explicit_paths() {
    let spec = TradeoffSpec::power_law(0.1, 1.0 / 3.0, 0.1).unwrap();
    let tmin = spec.theta_min();
    let (t, x) = (20.0, 80.0);
    let m = 200;
    let zeta = minimize_action(
        &spec,
        &Endpoints::from_origin(&spec, t, x, tmin),
        &ActionOptions::default(),
    )
    .unwrap()
    .zeta;
    let mut candidates = vec![sampled(&spec, t, m, |s| (x * s, tmin))];
    for height in [1.0, 3.0, 10.0, 30.0, 60.0] {
        candidates.push(sampled(&spec, t, m, |s| (x * s, tmin + 4.0 * height * s * (1.0 - s))));
        // up over the first fifth, across, down over the last fifth
        candidates.push(sampled(&spec, t, m, |s| {
            let z2 = tmin + height * (5.0 * s).min(1.0).min(5.0 * (1.0 - s));
            let z1 = x * ((s - 0.2) / 0.6).clamp(0.0, 1.0);
            (z1, z2)
        }));
    }
    for c in &candidates {
        let a = action_of_trajectory(c, &spec).unwrap();
        assert!(zeta <= a + 1e-9, "{zeta} > {a}");
    }
}

#[test]
fn nondecreasing_in_distance_and_even() {
    let spec = TradeoffSpec::power_law(0.1, 1.0 / 3.0, 0.1).unwrap();
    let opts = ActionOptions::default();
    let t = 15.0;
    let z = |x: f64| {
        minimize_action(&spec, &Endpoints::from_origin(&spec, t, x, 0.1), &opts)
            .unwrap()
            .zeta
    };
    let xs = [0.0, 5.0, 10.0, 20.0, 40.0, 80.0];
    let vals: Vec<f64> = xs.iter().map(|&x| z(x)).collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{vals:?}");
    for &x in &xs[1..4] {
        assert!((z(-x) - z(x)).abs() < 1e-9 * z(x));
    }
}

#[test]
fn returned_paths_carry_the_first_integral() {
    let spec = TradeoffSpec::power_law(0.5, 1.0, 1.0).unwrap();
    for (t, x, theta) in [(5.0, 10.0, 1.0), (10.0, 40.0, 3.0), (3.0, 2.0, 1.5)] {
        let sol = minimize_action(
            &spec,
            &Endpoints::from_origin(&spec, t, x, theta),
            &ActionOptions::default(),
        )
        .unwrap();
        assert!(
            sol.best.first_integral_spread() <= 1e-5,
            "{}",
            sol.best.first_integral_spread()
        );
        assert!(sol.best.z2.iter().all(|&z| z >= 1.0));
    }
}
