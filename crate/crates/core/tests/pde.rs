use canetoad::pde::{self, DiffusionScheme, Field2D, GridSpec, SimConfig, Simulation};
use canetoad::spectral::{ground_state_q, Normalization};
use canetoad::{fronts, TradeoffSpec};
use std::f64::consts::PI;

/// `m ≡ 0`, no crowding, data `cos(k(θ − θ̲))` constant in `x`: the exact
/// solution is `e^{(1 − k²)t} cos(k(θ − θ̲))`.
#[test]
fn crank_nicolson_matches_cosine_mode() {
    let (tmin, len) = (1.0, 10.0);
    let grid = GridSpec::new(-5.0, 5.0, tmin, tmin + len, 21, 401).unwrap();
    let spec = TradeoffSpec::zero(tmin).unwrap();
    let mut cfg = SimConfig::new(grid, spec, 0.005, 1.0);
    cfg.linearized = true;
    cfg.scheme = DiffusionScheme::CrankNicolson;
    let k = PI / (2.0 * len);
    let init = Field2D::from_fn(grid, |_, th| (k * (th - tmin)).cos());
    let mut sim = Simulation::from_field(cfg, init).unwrap();
    for _ in 0..200 {
        sim.step().unwrap();
    }
    let t = sim.time();
    assert!((t - 1.0).abs() < 1e-12);
    let exact = Field2D::from_fn(grid, |_, th| ((1.0 - k * k) * t).exp() * (k * (th - tmin)).cos());
    let err = sim
        .field()
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "L∞ error {err}");
}

fn lockstep_max_excess(spec: TradeoffSpec, grid: GridSpec, t_final: f64) -> f64 {
    let mut cfg = SimConfig::new(grid, spec, 0.02, t_final);
    cfg.dt = cfg.max_dt().min(0.02);
    let mut lin_cfg = cfg.clone();
    lin_cfg.linearized = true;
    let mut a = Simulation::new(cfg).unwrap();
    let mut b = Simulation::new(lin_cfg).unwrap();
    let steps = a.config().steps();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..steps {
        a.step().unwrap();
        b.step().unwrap();
        for (u, v) in a.field().values.iter().zip(&b.field().values) {
            worst = worst.max(u - v);
        }
    }
    worst
}

#[test]
fn nonlinear_run_stays_below_linearized() {
    let spec = TradeoffSpec::power_law(0.5, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(-10.0, 30.0, 1.0, 11.0, 161, 41).unwrap();
    let excess = lockstep_max_excess(spec, grid, 8.0);
    assert!(excess <= 1e-8, "{excess}");
    let spec = TradeoffSpec::power_law(0.1, 1.0 / 3.0, 0.1).unwrap();
    let grid = GridSpec::new(-10.0, 40.0, 0.1, 20.1, 201, 81).unwrap();
    let excess = lockstep_max_excess(spec, grid, 8.0);
    assert!(excess <= 1e-8, "{excess}");
}

/// `Q(θ) e^{γt}` (same truncation and trait grid) is an `x`-independent
/// solution of the linearized problem, so `sup n̄ e^{−γt}/Q` cannot grow.
#[test]
fn linearized_solution_under_ground_state_supersolution() {
    let spec = TradeoffSpec::power_law(0.5, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(-10.0, 30.0, 1.0, 13.0, 161, 97).unwrap();
    let pair = ground_state_q(
        &spec,
        grid.theta_max - grid.theta_min,
        grid.ntheta,
        Normalization::SupOne,
    )
    .unwrap();
    let mut cfg = SimConfig::new(grid, spec, 0.01, 10.0);
    cfg.linearized = true;
    let gamma = pair.eigenvalue;
    let q = pair.eigenfunction;
    let floor = 1e-2;
    let ratio = |f: &Field2D| {
        let mut r = 0.0f64;
        for row in f.values.chunks_exact(grid.ntheta) {
            for (v, &qj) in row.iter().zip(&q) {
                if qj > floor {
                    r = r.max(v / qj);
                }
            }
        }
        r * (-gamma * f.time).exp()
    };
    let mut sim = Simulation::new(cfg).unwrap();
    let mut prev = ratio(sim.field());
    let steps = sim.config().steps();
    for k in 0..steps {
        sim.step().unwrap();
        if (k + 1) % 50 == 0 {
            let r = ratio(sim.field());
            assert!(r <= 1.02 * prev, "t = {}: {r} > {prev}", sim.time());
            prev = r;
        }
    }
}

fn front_at_end(nx: usize, ntheta: usize, dt: f64) -> (f64, f64) {
    let spec = TradeoffSpec::power_law(0.5, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(-10.0, 40.0, 1.0, 11.0, nx, ntheta).unwrap();
    let mut cfg = SimConfig::new(grid, spec, dt, 10.0);
    cfg.snapshot_every = (1.0 / dt).round() as usize;
    let out = pde::run(&cfg).unwrap();
    (out.fronts.x_front.last().unwrap().unwrap(), grid.dx())
}

#[test]
fn front_position_converges_under_refinement() {
    let (coarse, dx) = front_at_end(201, 41, 0.05);
    let (fine, _) = front_at_end(401, 81, 0.025);
    assert!((coarse - fine).abs() <= 2.0 * dx, "{coarse} vs {fine}");
}

#[test]
fn diffusion_alone_conserves_mass_and_stays_positive() {
    let spec = TradeoffSpec::zero(0.5).unwrap();
    let grid = GridSpec::new(-15.0, 15.0, 0.5, 20.5, 121, 81).unwrap();
    for scheme in [DiffusionScheme::CrankNicolson, DiffusionScheme::BackwardEuler] {
        let mut cfg = SimConfig::new(grid, spec.clone(), 0.05, 3.0);
        cfg.reaction = false;
        cfg.scheme = scheme;
        let init = Field2D::from_fn(grid, |x, th| (-(x * x) - (th - 0.5).powi(2)).exp());
        let mut sim = Simulation::from_field(cfg, init).unwrap();
        let m0 = sim.field().mass();
        for _ in 0..60 {
            sim.step().unwrap();
            assert!(sim.field().min() >= -1e-14);
        }
        let drift = (sim.field().mass() - m0).abs() / m0;
        assert!(drift < 1e-8, "{scheme:?}: {drift}");
    }
}

#[test]
fn front_monotone_after_transient() {
    let spec = TradeoffSpec::power_law(0.5, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(-10.0, 40.0, 1.0, 11.0, 201, 41).unwrap();
    let mut cfg = SimConfig::new(grid, spec, 0.05, 15.0);
    cfg.snapshot_every = 10;
    let out = pde::run(&cfg).unwrap();
    let xs: Vec<f64> = out
        .fronts
        .times
        .iter()
        .zip(&out.fronts.x_front)
        .filter(|(t, _)| **t >= 5.0)
        .map(|(_, x)| x.unwrap())
        .collect();
    assert!(xs.windows(2).all(|w| w[1] >= w[0]), "{xs:?}");
    let fit = fronts::fit_speed(&out.fronts, fronts::FitWindow::new(5.0, 15.0)).unwrap();
    assert!(fit.value > 0.0);
}
