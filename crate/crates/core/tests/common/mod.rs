//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use canetoad::TradeoffSpec;

/// Closed-form distance. Non-vertical geodesics satisfy `ẋ = cθ`,
/// `θ̇² = 1 − c²θ` at unit speed, so `θ = H − u²/(4H)` with `H = c⁻²` and
/// `x = (H u − u³/(12H))/√H` in the shifted arclength `u`.
pub fn exact_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let dx = (q.0 - p.0).abs();
    let (t1, t2) = (p.1, q.1);
    if dx == 0.0 {
        return (t2 - t1).abs();
    }
    let span = |h: f64, u1: f64, u2: f64| (h * (u2 - u1) - (u2.powi(3) - u1.powi(3)) / (12.0 * h)) / h.sqrt();
    let half = |h: f64, t: f64| 2.0 * (h * (h - t)).max(0.0).sqrt();
    // (u1, u2) sign choices: through the apex, both before it, both after it
    let cases: [fn(f64, f64) -> (f64, f64); 3] = [|a1, a2| (-a1, a2), |a1, a2| (-a1, -a2), |a1, a2| (a1, a2)];
    let h0 = t1.max(t2);
    let mut best = f64::INFINITY;
    for case in cases {
        let ends = |h: f64| case(half(h, t1), half(h, t2));
        let f = |h: f64| {
            let (u1, u2) = ends(h);
            if u2 < u1 {
                f64::NAN
            } else {
                span(h, u1, u2) - dx
            }
        };
        let grid: Vec<f64> = (0..=6000).map(|k| h0 * (1e7f64).powf(k as f64 / 6000.0)).collect();
        for w in grid.windows(2) {
            let (fa, fb) = (f(w[0]), f(w[1]));
            if !(fa * fb <= 0.0) {
                continue;
            }
            let (mut lo, mut hi) = (w[0], w[1]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let (u1, u2) = ends(0.5 * (lo + hi));
            best = best.min(u2 - u1);
        }
    }
    best
}

/// Reduced discrete action of a trait path with the position eliminated.
pub fn reduced(spec: &TradeoffSpec, x: f64, h: f64, z: &[f64]) -> f64 {
    let mut integral = 0.0;
    let mut rest = 0.0;
    for w in z.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        integral += mid * h;
        rest += (w[1] - w[0]).powi(2) / (4.0 * h) + spec.m(mid) * h;
    }
    x * x / (4.0 * integral) + rest
}

/// Trait lattice with the per-segment costs tabulated between
/// consecutive levels (the start and end are single-point levels).
struct Lattice {
    x2: f64,
    /// `steps[k][a][b] = (Δ∫Z₂, Δrest)` from point `a` of level `k` to
    /// point `b` of level `k + 1`.
    steps: Vec<Vec<Vec<(f64, f64)>>>,
}

impl Lattice {
    fn new(spec: &TradeoffSpec, x: f64, h: f64, levels: &[Vec<f64>]) -> Self {
        let steps = levels
            .windows(2)
            .map(|w| {
                w[0].iter()
                    .map(|&a| {
                        w[1].iter()
                            .map(|&b| {
                                let mid = 0.5 * (a + b);
                                (mid * h, (b - a).powi(2) / (4.0 * h) + spec.m(mid) * h)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { x2: x * x, steps }
    }

    fn search(
        &self,
        k: usize,
        from: usize,
        integral: f64,
        rest: f64,
        path: &mut Vec<usize>,
        best: &mut (f64, Vec<usize>),
    ) {
        if k == self.steps.len() {
            let value = self.x2 / (4.0 * integral) + rest;
            if value < best.0 {
                *best = (value, path.clone());
            }
            return;
        }
        for (to, &(di, dr)) in self.steps[k][from].iter().enumerate() {
            let r = rest + dr;
            if r >= best.0 {
                continue;
            }
            path.push(to);
            self.search(k + 1, to, integral + di, r, path, best);
            path.pop();
        }
    }
}

/// Exhaustive search over a 12-point lattice per interior node, zoomed
/// around the incumbent.
pub fn brute_force(spec: &TradeoffSpec, t: f64, x: f64, theta: f64, m: usize, hi: f64) -> f64 {
    let lo = spec.theta_min();
    let h = t / m as f64;
    let points = 12;
    let mut centers = vec![0.5 * (lo + hi); m - 1];
    let mut half = 0.5 * (hi - lo);
    let mut best = f64::INFINITY;
    for _ in 0..4 {
        let mut levels = vec![vec![lo]];
        for &c in &centers {
            levels.push(
                (0..points)
                    .map(|i| (c - half + 2.0 * half * i as f64 / (points - 1) as f64).clamp(lo, hi))
                    .collect(),
            );
        }
        levels.push(vec![theta]);
        let mut found = (best, Vec::new());
        Lattice::new(spec, x, h, &levels).search(0, 0, 0.0, 0.0, &mut Vec::new(), &mut found);
        if !found.1.is_empty() {
            best = found.0;
            centers = found.1[..m - 1].iter().zip(&levels[1..]).map(|(&i, l)| l[i]).collect();
        }
        half *= 2.5 / (points - 1) as f64;
    }
    best
}
