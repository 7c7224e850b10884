//! Front extraction from density profiles and power-law / linear fits of
//! front trajectories.

use crate::error::{Error, Result};

/// Default level for the front of `ρ` and of the trait marginal.
pub const DEFAULT_THRESHOLD: f64 = 1e-2;
/// Minimum number of trace points a fit accepts.
pub const MIN_FIT_POINTS: usize = 8;
/// Fraction of the horizon dropped from the start of default fit windows.
pub const TRANSIENT_FRACTION: f64 = 0.2;

/// Values of a nonnegative profile on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    pub origin: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Profile1D {
    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn end(&self) -> f64 {
        self.coordinate(self.values.len().saturating_sub(1))
    }
}

/// Largest coordinate where the profile is at least `threshold`, linearly
/// interpolated towards the next node; `None` if the level is never reached.
pub fn level_position(profile: &Profile1D, threshold: f64) -> Option<f64> {
    let v = &profile.values;
    let last = v.iter().rposition(|&y| y >= threshold)?;
    if last + 1 == v.len() {
        return Some(profile.coordinate(last));
    }
    let (hi, lo) = (v[last], v[last + 1]);
    let w = if hi > lo { (hi - threshold) / (hi - lo) } else { 0.0 };
    Some(profile.coordinate(last) + w.clamp(0.0, 1.0) * profile.spacing)
}

/// Front of `ρ(x)`: the largest `x` with `ρ ≥ threshold`.
pub fn front_position(density: &Profile1D, threshold: f64) -> Option<f64> {
    level_position(density, threshold)
}

/// Front in the trait: the largest `θ` with `max_x n(·, θ) ≥ threshold`,
/// given the trait marginal `max_x n(·, θ)`.
pub fn trait_front(marginal: &Profile1D, threshold: f64) -> Option<f64> {
    level_position(marginal, threshold)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrontTrace {
    pub times: Vec<f64>,
    pub x_front: Vec<Option<f64>>,
    pub theta_front: Vec<Option<f64>>,
    pub threshold: f64,
    /// Trait lower bound, the origin for trait-front displacements.
    pub theta_min: f64,
}

impl FrontTrace {
    pub fn new(threshold: f64, theta_min: f64) -> Self {
        Self {
            threshold,
            theta_min,
            ..Default::default()
        }
    }

    pub fn push(&mut self, time: f64, x: Option<f64>, theta: Option<f64>) {
        debug_assert!(self.times.last().is_none_or(|&t| t < time));
        self.times.push(time);
        self.x_front.push(x);
        self.theta_front.push(theta);
    }

    /// Builds a trace from stored profiles at a given level.
    pub fn from_profiles(densities: &[Profile1D], marginals: &[Profile1D], threshold: f64, theta_min: f64) -> Self {
        let mut trace = Self::new(threshold, theta_min);
        for (rho, marg) in densities.iter().zip(marginals) {
            trace.push(rho.time, front_position(rho, threshold), trait_front(marg, threshold));
        }
        trace
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// `[0.2·T, T]` for the trace horizon `T`.
    pub fn default_window(&self) -> FitWindow {
        let t = self.horizon();
        FitWindow::new(TRANSIENT_FRACTION * t, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl FitWindow {
    pub fn new(t_lo: f64, t_hi: f64) -> Self {
        Self { t_lo, t_hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_lo && t <= self.t_hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Fitted exponent or speed.
    pub value: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub window: FitWindow,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y = a + b x`; returns `(b, a, stderr(b), R²)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if n > 2.0 {
        ((sse / (n - 2.0)) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (slope, intercept, stderr, r2)
}

fn windowed(times: &[f64], values: &[Option<f64>], window: FitWindow) -> Vec<(f64, f64)> {
    times
        .iter()
        .zip(values)
        .filter(|(t, _)| window.contains(**t))
        .filter_map(|(&t, v)| v.map(|v| (t, v)))
        .collect()
}

fn fit(points: Vec<(f64, f64)>, window: FitWindow, log_log: bool) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            got: points.len(),
            need: MIN_FIT_POINTS,
        });
    }
    if log_log {
        if let Some(&(t, v)) = points.iter().find(|(t, v)| *t <= 0.0 || *v <= 0.0) {
            return Err(Error::domain(format!(
                "log-log fit needs positive data, got ({t}, {v})"
            )));
        }
    }
    let map = |x: f64| if log_log { x.ln() } else { x };
    let xs: Vec<f64> = points.iter().map(|p| map(p.0)).collect();
    let ys: Vec<f64> = points.iter().map(|p| map(p.1)).collect();
    let (value, intercept, stderr, r_squared) = least_squares(&xs, &ys);
    Ok(FitResult {
        value,
        stderr,
        intercept,
        window,
        r_squared,
        points: points.len(),
    })
}

/// Slope of `log x_front` against `log t` inside `window`.
pub fn fit_exponent(trace: &FrontTrace, window: FitWindow) -> Result<FitResult> {
    fit(windowed(&trace.times, &trace.x_front, window), window, true)
}

/// Slope of `x_front` against `t` inside `window`.
pub fn fit_speed(trace: &FrontTrace, window: FitWindow) -> Result<FitResult> {
    fit(windowed(&trace.times, &trace.x_front, window), window, false)
}

/// Slope of `log(θ_front − θ̲)` against `log t` inside `window`.
pub fn fit_trait_exponent(trace: &FrontTrace, window: FitWindow) -> Result<FitResult> {
    let shifted: Vec<Option<f64>> = trace
        .theta_front
        .iter()
        .map(|v| v.map(|t| t - trace.theta_min))
        .collect();
    fit(windowed(&trace.times, &shifted, window), window, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(values: Vec<f64>, origin: f64, spacing: f64) -> Profile1D {
        Profile1D {
            origin,
            spacing,
            values,
            time: 0.0,
        }
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> FrontTrace {
        let mut trace = FrontTrace::new(DEFAULT_THRESHOLD, 1.0);
        for k in 1..=40 {
            let t = k as f64;
            trace.push(t, Some(f(t)), Some(1.0 + t));
        }
        trace
    }

    #[test]
    fn step_profile_front() {
        let dx = 0.5;
        let values: Vec<f64> = (0..40).map(|i| if i as f64 * dx <= 7.0 { 1.0 } else { 0.0 }).collect();
        let x = front_position(&profile(values, 0.0, dx), 0.5).unwrap();
        assert!((x - 7.0).abs() <= dx);
    }

    #[test]
    fn below_threshold_is_missing() {
        assert_eq!(front_position(&profile(vec![1e-4; 10], 0.0, 1.0), 1e-2), None);
    }

    #[test]
    fn gaussian_level_set() {
        let dx = 0.01;
        let values: Vec<f64> = (0..1500).map(|i| (-(i as f64 * dx - 5.0).powi(2)).exp()).collect();
        let x = front_position(&profile(values, 0.0, dx), (-4.0f64).exp()).unwrap();
        // linear interpolation of a convex tail errs by O(dx²)
        assert!((x - 7.0).abs() < 1e-3, "{x}");
    }

    #[test]
    fn exact_power_law_exponent() {
        let trace = synthetic(|t| 4.0 * t.powf(1.2));
        let fit = fit_exponent(&trace, FitWindow::new(5.0, 40.0)).unwrap();
        assert!((fit.value - 1.2).abs() < 1e-6);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let trace = synthetic(|t| 3.0 * t);
        let fit = fit_exponent(&trace, FitWindow::new(5.0, 40.0)).unwrap();
        assert!((fit.value - 1.0).abs() < 1e-6);
        assert!((fit.value - 1.0).abs() <= fit.stderr.max(1e-9));
    }

    #[test]
    fn exact_linear_speed() {
        let trace = synthetic(|t| 2.0 + 1.7 * t);
        let fit = fit_speed(&trace, FitWindow::new(0.0, 40.0)).unwrap();
        assert!((fit.value - 1.7).abs() < 1e-12);
        assert!((fit.intercept - 2.0).abs() < 1e-10);
    }

    #[test]
    fn trait_exponent_uses_displacement() {
        let trace = synthetic(|t| t);
        let fit = fit_trait_exponent(&trace, FitWindow::new(1.0, 40.0)).unwrap();
        assert!((fit.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_fronts_cannot_be_fitted() {
        let mut trace = FrontTrace::new(DEFAULT_THRESHOLD, 1.0);
        for k in 1..=20 {
            trace.push(k as f64, if k < 4 { Some(k as f64) } else { None }, None);
        }
        let err = fit_speed(&trace, trace.default_window()).unwrap_err();
        assert!(matches!(err, Error::InsufficientPoints { got: 0, .. }));
    }
}
