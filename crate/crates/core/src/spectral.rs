//! Principal eigenvalue problems in the trait variable.
//!
//! Every problem here is `Q'' + V(θ) Q = γ Q` on `[θ̲, θ̲ + b]` with a
//! Neumann condition at `θ̲` and a Dirichlet condition at `θ̲ + b`. The
//! discretization is the three-point Laplacian with the Neumann ghost node
//! eliminated; a diagonal similarity makes the matrix symmetric, so the
//! principal eigenvalue is located by Sturm bisection and polished by
//! shifted inverse iteration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PhiProfile, TradeoffSpec};
use crate::numerics::{golden_section, trapezoid, Tridiagonal};

/// Smallest admissible node count.
pub const MIN_NODES: usize = 64;
const MAX_INVERSE_ITERATIONS: usize = 500;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `max Q = 1`
    SupOne,
    /// trapezoid `∫ Q = γ` (needs `γ > 0`)
    IntegralEqualsEigenvalue,
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub eigenvalue: f64,
    /// Uniform grid on `[θ̲, θ̲ + b]`, including both end nodes.
    pub grid: Vec<f64>,
    /// Values on `grid`; the last entry is the Dirichlet zero.
    pub eigenfunction: Vec<f64>,
    pub normalization: Normalization,
    pub truncation_b: f64,
    /// `‖(A − γI)Q‖∞ / ‖Q‖∞` of the discrete operator.
    pub residual: f64,
}

impl EigenPair {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.eigenfunction, self.spacing())
    }

    /// `ψ = −log Q` (infinite where `Q` vanishes).
    pub fn log_decay(&self) -> Vec<f64> {
        self.eigenfunction.iter().map(|q| -q.ln()).collect()
    }

    /// Linear interpolation of the eigenfunction; zero outside the grid.
    pub fn value_at(&self, theta: f64) -> f64 {
        let h = self.spacing();
        let x = (theta - self.grid[0]) / h;
        if x < 0.0 || x > (self.grid.len() - 1) as f64 {
            return 0.0;
        }
        let i = (x.floor() as usize).min(self.grid.len() - 2);
        let w = x - i as f64;
        (1.0 - w) * self.eigenfunction[i] + w * self.eigenfunction[i + 1]
    }

    fn renormalize(&mut self, normalization: Normalization) -> Result<()> {
        let scale = match normalization {
            Normalization::SupOne => 1.0 / self.eigenfunction.iter().cloned().fold(0.0, f64::max),
            Normalization::IntegralEqualsEigenvalue => {
                if self.eigenvalue <= 0.0 {
                    return Err(Error::InvalidNormalization(format!(
                        "integral normalization needs a positive eigenvalue, got {}",
                        self.eigenvalue
                    )));
                }
                self.eigenvalue / self.integral()
            }
        };
        self.eigenfunction.iter_mut().for_each(|q| *q *= scale);
        self.normalization = normalization;
        Ok(())
    }
}

/// Symmetrized three-point discretization of `∂θθ + V` with the Dirichlet
/// node dropped.
struct SymTridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
    potential: Vec<f64>,
    h: f64,
}

impl SymTridiag {
    fn new(potential: Vec<f64>, h: f64) -> Self {
        let k = potential.len();
        let inv_h2 = 1.0 / (h * h);
        let diag = potential.iter().map(|v| v - 2.0 * inv_h2).collect();
        let mut off = vec![inv_h2; k.saturating_sub(1)];
        if let Some(first) = off.first_mut() {
            *first = std::f64::consts::SQRT_2 * inv_h2;
        }
        Self {
            diag,
            off,
            potential,
            h,
        }
    }

    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64, pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let k = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..k {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < k { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm_inf(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Residual of the unsymmetrized operator for the symmetric vector `v`.
    fn residual(&self, v: &[f64], gamma: f64) -> (f64, f64) {
        let k = v.len();
        let q = |i: usize| -> f64 {
            if i >= k {
                0.0
            } else if i == 0 {
                std::f64::consts::SQRT_2 * v[0]
            } else {
                v[i]
            }
        };
        let inv_h2 = 1.0 / (self.h * self.h);
        let mut res: f64 = 0.0;
        let mut sup: f64 = 0.0;
        for i in 0..k {
            let qi = q(i);
            let lap = if i == 0 {
                2.0 * (q(1) - qi) * inv_h2
            } else {
                (q(i - 1) - 2.0 * qi + q(i + 1)) * inv_h2
            };
            res = res.max((lap + (self.potential[i] - gamma) * qi).abs());
            sup = sup.max(qi.abs());
        }
        (res, sup)
    }
}

/// Largest eigenvalue of `∂θθ + potential` on `[theta_min, theta_min + b]`
/// with `n` nodes, Neumann at the left end and Dirichlet at the right end.
pub fn principal_eigenpair<F>(potential: F, theta_min: f64, b: f64, n: usize) -> Result<EigenPair>
where
    F: Fn(f64) -> f64,
{
    if n < MIN_NODES {
        return Err(Error::domain(format!("need at least {MIN_NODES} nodes, got {n}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!("truncation length must be positive, got {b}")));
    }
    let h = b / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| theta_min + i as f64 * h).collect();
    let values: Vec<f64> = grid[..n - 1].iter().map(|&t| potential(t)).collect();
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!(
            "potential is not finite at theta = {}",
            grid[bad]
        )));
    }
    let op = SymTridiag::new(values, h);
    let scale = op.norm_inf();
    let pivmin = f64::MIN_POSITIVE * scale.max(1.0) * 1e3;
    let k = op.len();

    // Sturm bisection: afterwards every eigenvalue lies strictly below `hi`.
    let (mut lo, mut hi) = op.gershgorin();
    hi += f64::EPSILON * scale + pivmin;
    for _ in 0..200 {
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if op.count_below(mid, pivmin) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let shift = hi;
    let neg_off: Vec<f64> = op.off.iter().map(|e| -e).collect();
    let mut sub = vec![0.0; k];
    sub[1..].copy_from_slice(&neg_off);
    let mut sup = vec![0.0; k];
    sup[..k - 1].copy_from_slice(&neg_off);
    let diag: Vec<f64> = op.diag.iter().map(|d| shift - d).collect();
    let solver = Tridiagonal::factor(&sub, &diag, &sup);

    let tol = RESIDUAL_TOL.max(64.0 * f64::EPSILON * scale);
    let mut v = vec![1.0; k];
    let mut gamma = shift;
    let mut rel_residual = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        solver.solve_in_place(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::numeric("inverse iteration broke down", f64::NAN));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        gamma = rayleigh(&op, &v);
        let (res, sup) = op.residual(&v, gamma);
        rel_residual = res / sup;
        if rel_residual <= tol {
            break;
        }
    }
    if rel_residual > tol {
        return Err(Error::numeric(
            format!("inverse iteration did not converge in {MAX_INVERSE_ITERATIONS} steps"),
            rel_residual,
        ));
    }
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let mut eigenfunction: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    eigenfunction[0] *= std::f64::consts::SQRT_2;
    eigenfunction.push(0.0);
    let mut pair = EigenPair {
        eigenvalue: gamma,
        grid,
        eigenfunction,
        normalization: Normalization::SupOne,
        truncation_b: b,
        residual: rel_residual,
    };
    pair.renormalize(Normalization::SupOne)?;
    Ok(pair)
}

fn rayleigh(op: &SymTridiag, v: &[f64]) -> f64 {
    let k = v.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..k {
        let mut av = op.diag[i] * v[i];
        if i > 0 {
            av += op.off[i - 1] * v[i - 1];
        }
        if i + 1 < k {
            av += op.off[i] * v[i + 1];
        }
        num += v[i] * av;
        den += v[i] * v[i];
    }
    num / den
}

/// `Q` with `Q'' + (1 − m) Q = γ Q` on the truncation `[θ̲, θ̲ + b]`.
pub fn ground_state_q(spec: &TradeoffSpec, b: f64, n: usize, normalization: Normalization) -> Result<EigenPair> {
    let mut pair = principal_eigenpair(|t| 1.0 - spec.m(t), spec.theta_min(), b, n)?;
    pair.renormalize(normalization)?;
    Ok(pair)
}

/// Default first truncation for `γ∞`: `max(10, 2·η₁(10))`.
pub fn default_truncation(spec: &TradeoffSpec) -> f64 {
    match PhiProfile::new(spec.clone()).eta(1.0, 10.0) {
        Ok(eta) => 10f64.max(2.0 * (eta - spec.theta_min())),
        Err(_) => 10.0,
    }
}

#[derive(Debug, Clone)]
pub struct GammaInfinity {
    pub value: f64,
    /// `(b, γ(b))` for each truncation tried.
    pub history: Vec<(f64, f64)>,
}

/// Grid spacing used for the `γ∞` truncation sequence; results are
/// Richardson-extrapolated from this spacing and its half.
pub const GAMMA_SPACING: f64 = 1.0 / 128.0;

fn truncated_gamma(spec: &TradeoffSpec, b: f64) -> Result<f64> {
    let solve = |h: f64| -> Result<f64> {
        let n = ((b / h).round() as usize + 1).max(MIN_NODES);
        Ok(principal_eigenpair(|t| 1.0 - spec.m(t), spec.theta_min(), b, n)?.eigenvalue)
    };
    let coarse = solve(GAMMA_SPACING)?;
    let fine = solve(GAMMA_SPACING / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Principal eigenvalue `γ∞` of `Q'' + (1 − m) Q` on the half-line, by
/// doubling the Dirichlet truncation until successive values agree to `tol`.
pub fn gamma_infinity(spec: &TradeoffSpec, tol: f64) -> Result<f64> {
    Ok(gamma_infinity_detailed(spec, tol)?.value)
}

pub fn gamma_infinity_detailed(spec: &TradeoffSpec, tol: f64) -> Result<GammaInfinity> {
    if spec.is_zero() {
        return Err(Error::domain("gamma_infinity needs a trade-off that grows to infinity"));
    }
    let mut b = default_truncation(spec);
    let mut history = vec![(b, truncated_gamma(spec, b)?)];
    for _ in 0..12 {
        b *= 2.0;
        let gamma = truncated_gamma(spec, b)?;
        let prev = history.last().unwrap().1;
        history.push((b, gamma));
        let slack = tol.max(1e-12);
        if gamma < prev - slack {
            return Err(Error::numeric(
                format!("truncated eigenvalue decreased from {prev} to {gamma} at b = {b}"),
                prev - gamma,
            ));
        }
        if (gamma - prev).abs() < tol {
            return Ok(GammaInfinity { value: gamma, history });
        }
    }
    let (b_last, g_last) = *history.last().unwrap();
    let g_prev = history[history.len() - 2].1;
    Err(Error::numeric(
        format!("gamma_infinity did not settle by b = {b_last} (last value {g_last})"),
        (g_last - g_prev).abs(),
    ))
}

/// `c_λ` from `Q'' + [λ²θ − λc + 1 − m] Q = 0` on the truncation.
pub fn dispersion_c_lambda(spec: &TradeoffSpec, lambda: f64, b: f64, n: usize) -> Result<f64> {
    dispersion_c_lambda_shifted(spec, lambda, 0.0, b, n)
}

/// `c_λ` for the potential lowered by `2ε`.
pub fn dispersion_c_lambda_shifted(spec: &TradeoffSpec, lambda: f64, eps: f64, b: f64, n: usize) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    let l2 = lambda * lambda;
    let pair = principal_eigenpair(|t| l2 * t + 1.0 - spec.m(t) - 2.0 * eps, spec.theta_min(), b, n)?;
    Ok(pair.eigenvalue / lambda)
}

/// Whether `c_λ` at this `λ` depends on the truncation (critical case with
/// `λ ≥ μ`: the half-line problem has no solution there).
pub fn is_truncation_dependent(spec: &TradeoffSpec, lambda: f64) -> bool {
    spec.critical_mu().is_some_and(|mu| lambda >= mu)
}

#[derive(Debug, Clone)]
pub struct DispersionCurve {
    pub lambdas: Vec<f64>,
    pub speeds: Vec<f64>,
    pub c_star: f64,
    pub lambda_star: f64,
    pub critical_mu: Option<f64>,
    /// The minimizer ran into `λ = μ`: `c_star` is an infimum, not attained.
    pub boundary_infimum: bool,
    /// `γ` of the same truncation (the `λ → 0` limit of `λ c_λ`).
    pub gamma_b: f64,
    pub b: f64,
    pub n: usize,
}

const SCAN_POINTS: usize = 64;
const LAMBDA_MIN: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e3;

/// Minimal speed `c* = min_λ c_λ` (or `inf_{λ<μ} c_λ` in the critical case).
pub fn minimal_speed(spec: &TradeoffSpec, b: f64, n: usize) -> Result<DispersionCurve> {
    let gamma_b = ground_state_q(spec, b, n, Normalization::SupOne)?.eigenvalue;
    if gamma_b <= 0.0 {
        return Err(Error::domain(format!(
            "minimal speed needs a positive growth rate, truncated gamma = {gamma_b}"
        )));
    }
    let critical_mu = spec.critical_mu();
    let lambda_hi = critical_mu.map_or(LAMBDA_MAX, |mu| mu * (1.0 - 1e-6));
    let lambda_lo = LAMBDA_MIN.min(0.5 * lambda_hi);
    let (llo, lhi) = (lambda_lo.ln(), lambda_hi.ln());
    let mut lambdas: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| (llo + (lhi - llo) * k as f64 / (SCAN_POINTS - 1) as f64).exp())
        .collect();
    let mut speeds = lambdas
        .par_iter()
        .map(|&l| dispersion_c_lambda(spec, l, b, n))
        .collect::<Result<Vec<f64>>>()?;

    let mut idx = 0;
    for (k, &c) in speeds.iter().enumerate() {
        if c < speeds[idx] {
            idx = k;
        }
    }
    let last = SCAN_POINTS - 1;
    let (lambda_star, c_star, boundary_infimum) = if idx == last {
        (lambdas[last], speeds[last], critical_mu.is_some())
    } else {
        let a = lambdas[idx.saturating_sub(1)].ln();
        let z = lambdas[idx + 1].ln();
        let (x, c) = golden_section(
            |ll| dispersion_c_lambda(spec, ll.exp(), b, n).unwrap_or(f64::INFINITY),
            a,
            z,
            1e-9,
        );
        if c <= speeds[idx] {
            (x.exp(), c, false)
        } else {
            (lambdas[idx], speeds[idx], false)
        }
    };
    if let Err(pos) = lambdas.binary_search_by(|l| l.partial_cmp(&lambda_star).unwrap()) {
        lambdas.insert(pos, lambda_star);
        speeds.insert(pos, c_star);
    }
    Ok(DispersionCurve {
        lambdas,
        speeds,
        c_star,
        lambda_star,
        critical_mu,
        boundary_infimum,
        gamma_b,
        b,
        n,
    })
}

/// Spatial diffusivity used in the box problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxDiffusivity {
    /// `d(θ) = θ`, as in the Cauchy problem.
    Trait,
    /// `d ≡ θ̲`.
    Frozen,
}

#[derive(Debug, Clone)]
pub struct BoxEigen {
    pub gamma: f64,
    pub v: EigenPair,
}

/// Eigenelements `(γ_{r,s}, V_{r,s})` of
/// `V'' + (1 − m − π² d(θ)/(4r²)) V = γ V` on `[θ̲, θ̲ + s]`, `‖V‖∞ = 1`.
pub fn box_eigen(spec: &TradeoffSpec, r: f64, s: f64, n: usize, diffusivity: BoxDiffusivity) -> Result<BoxEigen> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::domain(format!("box needs r, s > 0, got r = {r}, s = {s}")));
    }
    let k = std::f64::consts::PI.powi(2) / (4.0 * r * r);
    let tmin = spec.theta_min();
    let v = principal_eigenpair(
        |t| {
            let d = match diffusivity {
                BoxDiffusivity::Trait => t,
                BoxDiffusivity::Frozen => tmin,
            };
            1.0 - spec.m(t) - k * d
        },
        tmin,
        s,
        n,
    )?;
    Ok(BoxEigen { gamma: v.eigenvalue, v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_potential_cosine_mode() {
        let pair = principal_eigenpair(|_| 1.0, 1.0, 10.0, 4096).unwrap();
        assert!((pair.eigenvalue - (1.0 - PI * PI / 400.0)).abs() < 1e-6);
        let pair = principal_eigenpair(|_| 0.0, 1.0, 1.0, 512).unwrap();
        assert!((pair.eigenvalue + PI * PI / 4.0).abs() < 1e-4);
    }

    #[test]
    fn eigenfunction_is_positive_and_sup_normalized() {
        let spec = TradeoffSpec::power_law(0.5, 1.0, 1.0).unwrap();
        let pair = ground_state_q(&spec, 12.0, 600, Normalization::SupOne).unwrap();
        let max = pair.eigenfunction.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
        let n = pair.eigenfunction.len();
        assert!(pair.eigenfunction[..n - 1].iter().all(|&q| q > 0.0));
        assert_eq!(pair.eigenfunction[n - 1], 0.0);
    }

    #[test]
    fn too_few_nodes_is_domain_error() {
        assert!(matches!(
            principal_eigenpair(|_| 0.0, 1.0, 1.0, 32),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn integral_normalization() {
        let spec = TradeoffSpec::power_law(0.3, 1.0, 1.0).unwrap();
        let q = ground_state_q(&spec, 15.0, 800, Normalization::IntegralEqualsEigenvalue).unwrap();
        assert!((q.integral() - q.eigenvalue).abs() < 1e-8);
        let strong = TradeoffSpec::power_law(3.0, 1.0, 1.0).unwrap();
        let err = ground_state_q(&strong, 15.0, 800, Normalization::IntegralEqualsEigenvalue);
        assert!(matches!(err, Err(Error::InvalidNormalization(_))));
    }

    #[test]
    fn zero_tradeoff_ground_state_is_cosine() {
        let spec = TradeoffSpec::zero(1.0).unwrap();
        let q = ground_state_q(&spec, 10.0, 2001, Normalization::SupOne).unwrap();
        for (t, v) in q.grid.iter().zip(&q.eigenfunction) {
            let exact = (PI * (t - 1.0) / 20.0).cos();
            assert!((v - exact).abs() < 1e-5, "{t}: {v} vs {exact}");
        }
    }

    #[test]
    fn potential_shift_moves_gamma() {
        let spec = TradeoffSpec::power_law(0.7, 1.5, 1.0).unwrap();
        let base = ground_state_q(&spec, 10.0, 800, Normalization::SupOne)
            .unwrap()
            .eigenvalue;
        let shifted = principal_eigenpair(|t| 1.0 - spec.m(t) - 0.37, 1.0, 10.0, 800)
            .unwrap()
            .eigenvalue;
        assert!((base - 0.37 - shifted).abs() < 1e-10);
    }

    #[test]
    fn gamma_below_one_for_growing_tradeoff() {
        let spec = TradeoffSpec::power_law(1.0, 4.0 / 3.0, 1.0).unwrap();
        let g = gamma_infinity(&spec, 1e-9).unwrap();
        assert!(g < 1.0);
    }

    #[test]
    fn gamma_infinity_rejects_zero() {
        assert!(gamma_infinity(&TradeoffSpec::zero(1.0).unwrap(), 1e-8).is_err());
    }

    #[test]
    fn dispersion_rejects_nonpositive_lambda() {
        let spec = TradeoffSpec::power_law(1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            dispersion_c_lambda(&spec, 0.0, 10.0, 200),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn box_frozen_zero_tradeoff_closed_form() {
        let spec = TradeoffSpec::zero(1.5).unwrap();
        let (r, s) = (3.0, 4.0);
        let out = box_eigen(&spec, r, s, 4001, BoxDiffusivity::Frozen).unwrap();
        let exact = 1.0 - PI * PI * 1.5 / (4.0 * r * r) - PI * PI / (4.0 * s * s);
        assert!((out.gamma - exact).abs() < 1e-6);
        let sup = out.v.eigenfunction.iter().cloned().fold(0.0, f64::max);
        assert!((sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn box_is_domain_monotone() {
        let spec = TradeoffSpec::power_law(0.5, 1.0 / 3.0, 1.0).unwrap();
        let small = box_eigen(&spec, 5.0, 5.0, 400, BoxDiffusivity::Trait).unwrap().gamma;
        let large = box_eigen(&spec, 10.0, 10.0, 800, BoxDiffusivity::Trait).unwrap().gamma;
        assert!(large > small);
    }
}
