//! The trait-dependent metric `g = diag(1/θ, 1)` on `ℝ × [θ̲, ∞)`, under
//! which the kinetic part of the action is `|ż|²_g / 4`.

use crate::action::{minimize_action, ActionOptions, Endpoints};
use crate::error::{Error, Result};
use crate::model::TradeoffSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub theta_min: f64,
}

/// `Γᶜₐᵦ` stored as `symbols[c][a][b]`, coordinates ordered `(x, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    pub symbols: [[[f64; 2]; 2]; 2],
}

impl Christoffel {
    pub fn get(&self, c: usize, a: usize, b: usize) -> f64 {
        self.symbols[c][a][b]
    }
}

/// A minimizing path of the discrete energy on `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct Geodesic {
    pub distance: f64,
    pub energy: f64,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl Metric {
    pub fn new(theta_min: f64) -> Result<Self> {
        if !(theta_min > 0.0) {
            return Err(Error::domain(format!("metric needs theta_min > 0, got {theta_min}")));
        }
        Ok(Self { theta_min })
    }

    fn check(&self, theta: f64) -> Result<()> {
        if theta >= self.theta_min {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "theta = {theta} is below theta_min = {}",
                self.theta_min
            )))
        }
    }

    pub fn g(&self, theta: f64) -> [[f64; 2]; 2] {
        [[1.0 / theta, 0.0], [0.0, 1.0]]
    }

    pub fn g_inv(&self, theta: f64) -> [[f64; 2]; 2] {
        [[theta, 0.0], [0.0, 1.0]]
    }

    pub fn christoffel(&self, theta: f64) -> Result<Christoffel> {
        self.check(theta)?;
        let mut symbols = [[[0.0; 2]; 2]; 2];
        symbols[0][0][1] = -0.5 / theta;
        symbols[0][1][0] = -0.5 / theta;
        symbols[1][0][0] = 0.5 / (theta * theta);
        Ok(Christoffel { symbols })
    }

    /// Scalar curvature `R = 2K` with Gaussian curvature
    /// `K = −f''/f = −3/(4θ²)` for `g = dθ² + f(θ)² dx²`, `f = θ^{−1/2}`.
    pub fn scalar_curvature(&self, theta: f64) -> Result<f64> {
        self.check(theta)?;
        Ok(-1.5 / (theta * theta))
    }

    /// `inf_{θ ≥ θ̲} R`, attained at `θ̲`.
    pub fn curvature_infimum(&self) -> f64 {
        -1.5 / (self.theta_min * self.theta_min)
    }

    /// `Σ ((Δz₁)²/z₂_mid + (Δz₂)²) / Δs` over a path sampled uniformly on
    /// `[0, 1]`.
    pub fn energy(&self, z1: &[f64], z2: &[f64]) -> f64 {
        let h = 1.0 / (z1.len() - 1) as f64;
        (0..z1.len() - 1)
            .map(|k| {
                let mid = 0.5 * (z2[k] + z2[k + 1]);
                ((z1[k + 1] - z1[k]).powi(2) / mid + (z2[k + 1] - z2[k]).powi(2)) / h
            })
            .sum()
    }

    /// `d_g(p, q)` over paths with `segments` segments. On `s ∈ [0, 1]`
    /// the energy `∫|ż|²_g` of a minimizer is `d²`, and it equals four
    /// times the action with `m ≡ 0` and horizon 1.
    pub fn geodesic_distance(&self, p: (f64, f64), q: (f64, f64), segments: usize) -> Result<Geodesic> {
        self.check(p.1)?;
        self.check(q.1)?;
        let spec = TradeoffSpec::zero(self.theta_min)?;
        let ends = Endpoints {
            t: 1.0,
            y: p.0,
            eta: p.1,
            x: q.0,
            theta: q.1,
        };
        let opts = ActionOptions {
            nodes: segments,
            ..ActionOptions::default()
        };
        let sol = minimize_action(&spec, &ends, &opts)?;
        let iterations = sol.runs.iter().map(|r| r.iterations).sum();
        let energy = 4.0 * sol.zeta;
        Ok(Geodesic {
            distance: energy.sqrt(),
            energy,
            z1: sol.best.z1,
            z2: sol.best.z2,
            converged: sol.converged,
            iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn christoffel_values() {
        let g = Metric::new(0.5).unwrap();
        let c = g.christoffel(1.0).unwrap();
        assert_eq!(c.get(0, 0, 1), -0.5);
        assert_eq!(c.get(0, 1, 0), -0.5);
        assert_eq!(c.get(1, 0, 0), 0.5);
        let c = g.christoffel(2.0).unwrap();
        assert_eq!(c.get(0, 0, 1), -0.25);
        assert_eq!(c.get(1, 0, 0), 0.125);
        for (a, b, d) in [(0, 0, 0), (1, 1, 1), (1, 0, 1), (1, 1, 0), (0, 1, 1)] {
            assert_eq!(c.get(a, b, d), 0.0);
        }
        assert!(matches!(g.christoffel(0.4), Err(Error::Domain(_))));
    }

    #[test]
    fn curvature_values() {
        let g = Metric::new(1.0).unwrap();
        assert_eq!(g.scalar_curvature(1.0).unwrap(), -1.5);
        assert_eq!(g.scalar_curvature(10.0).unwrap(), -0.015);
        assert!(matches!(g.scalar_curvature(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn distance_basics() {
        let g = Metric::new(1.0).unwrap();
        assert_eq!(g.geodesic_distance((0.0, 2.0), (0.0, 2.0), 50).unwrap().distance, 0.0);
        let d = g.geodesic_distance((0.0, 1.0), (0.0, 4.0), 50).unwrap().distance;
        assert!((d - 3.0).abs() < 1e-8, "{d}");
    }

    #[test]
    fn bulging_path_is_shorter() {
        let g = Metric::new(1.0).unwrap();
        let geo = g.geodesic_distance((0.0, 1.0), (10.0, 1.0), 200).unwrap();
        assert!(geo.distance < 10.0);
        assert!(geo.z2.iter().cloned().fold(0.0, f64::max) > 2.0);
    }
}
