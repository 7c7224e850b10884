//! Trade-off functions `m(θ)`, the cumulative action `Φ(θ) = ∫ √m`, the
//! trait-spreading scale `η_a(t)` and regime classification.

use crate::error::{Error, Result};
use crate::numerics::integrate;

/// Relative tolerance for the quadrature behind `Φ`.
pub const PHI_REL_TOL: f64 = 1e-10;
/// Relative tolerance on `Φ(η) − a·t` when inverting `Φ`.
pub const ETA_REL_TOL: f64 = 1e-9;

/// Limit of `m(θ)/θ` as `θ → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeLimit {
    Zero,
    Finite(f64),
    Infinite,
}

impl RegimeLimit {
    pub fn is_positive(self) -> bool {
        !matches!(self, RegimeLimit::Zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Extinction,
    Linear,
    Accelerating,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Extinction => "extinction",
            Regime::Linear => "linear",
            Regime::Accelerating => "accelerating",
        })
    }
}

/// Monotone cubic (Fritsch–Carlson) interpolant through `(θ, m)` knots,
/// extended past the last knot linearly in `√m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    knots: Vec<(f64, f64)>,
    slopes: Vec<f64>,
    tail_sqrt_slope: f64,
}

impl MonotoneTable {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::config("tabulated trade-off needs at least two knots"));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::config("tabulated knots must be strictly increasing in theta"));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::config("tabulated trade-off must be nondecreasing"));
            }
        }
        if knots.iter().any(|&(t, v)| !t.is_finite() || !v.is_finite() || v < 0.0) {
            return Err(Error::config("tabulated knots must be finite with m >= 0"));
        }
        let n = knots.len();
        let h: Vec<f64> = knots.windows(2).map(|w| w[1].0 - w[0].0).collect();
        let delta: Vec<f64> = knots.windows(2).zip(&h).map(|(w, h)| (w[1].1 - w[0].1) / h).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = delta[0];
        slopes[n - 1] = delta[n - 2];
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        let (_, m_last) = knots[n - 1];
        let tail_sqrt_slope = if m_last > 0.0 {
            slopes[n - 1] / (2.0 * m_last.sqrt())
        } else {
            0.0
        };
        Ok(Self {
            knots,
            slopes,
            tail_sqrt_slope,
        })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Value, first and second derivative.
    fn eval3(&self, theta: f64) -> (f64, f64, f64) {
        let n = self.knots.len();
        let (t_last, m_last) = self.knots[n - 1];
        if theta >= t_last {
            let s = self.tail_sqrt_slope;
            let r = m_last.sqrt() + s * (theta - t_last);
            return (r * r, 2.0 * r * s, 2.0 * s * s);
        }
        let k = match self.knots.binary_search_by(|(t, _)| t.partial_cmp(&theta).unwrap()) {
            Ok(k) => k.min(n - 2),
            Err(0) => 0,
            Err(k) => k - 1,
        };
        let (t0, m0) = self.knots[k];
        let (t1, m1) = self.knots[k + 1];
        let h = t1 - t0;
        let u = ((theta - t0) / h).clamp(0.0, 1.0);
        let (d0, d1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let v =
            (2.0 * u3 - 3.0 * u2 + 1.0) * m0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * m1 + (u3 - u2) * d1;
        let dv = (6.0 * u2 - 6.0 * u) * m0
            + (3.0 * u2 - 4.0 * u + 1.0) * d0
            + (-6.0 * u2 + 6.0 * u) * m1
            + (3.0 * u2 - 2.0 * u) * d1;
        let d2v = (12.0 * u - 6.0) * m0 + (6.0 * u - 4.0) * d0 + (-12.0 * u + 6.0) * m1 + (6.0 * u - 2.0) * d1;
        (v, dv / h, d2v / (h * h))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TradeoffKind {
    /// `C·(θ^p − θ̲^p)`
    PowerLaw {
        c: f64,
        p: f64,
    },
    /// `C·(log(θ/θ̲))^p`
    LogPower {
        c: f64,
        p: f64,
    },
    /// `μ²·(θ − θ̲) + sub(θ)`
    LinearPlus {
        mu: f64,
        sub: Option<Box<TradeoffKind>>,
    },
    Zero,
    Tabulated(MonotoneTable),
}

impl TradeoffKind {
    fn eval3(&self, theta: f64, tmin: f64) -> (f64, f64, f64) {
        match self {
            TradeoffKind::PowerLaw { c, p } => {
                let v = c * (theta.powf(*p) - tmin.powf(*p));
                let d = c * p * theta.powf(p - 1.0);
                let d2 = c * p * (p - 1.0) * theta.powf(p - 2.0);
                (v, d, d2)
            }
            TradeoffKind::LogPower { c, p } => {
                let l = (theta / tmin).ln();
                if l <= 0.0 {
                    let d = if *p == 1.0 {
                        c / tmin
                    } else if *p > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    };
                    return (0.0, d, 0.0);
                }
                let v = c * l.powf(*p);
                let d = c * p * l.powf(p - 1.0) / theta;
                let d2 = c * p * ((p - 1.0) * l.powf(p - 2.0) - l.powf(p - 1.0)) / (theta * theta);
                (v, d, d2)
            }
            TradeoffKind::LinearPlus { mu, sub } => {
                let lin = (mu * mu * (theta - tmin), mu * mu, 0.0);
                match sub {
                    Some(s) => {
                        let (a, b, c) = s.eval3(theta, tmin);
                        (lin.0 + a, lin.1 + b, c)
                    }
                    None => lin,
                }
            }
            TradeoffKind::Zero => (0.0, 0.0, 0.0),
            TradeoffKind::Tabulated(t) => t.eval3(theta),
        }
    }

    fn regime_limit(&self) -> RegimeLimit {
        match self {
            TradeoffKind::PowerLaw { c, p } => {
                if *p < 1.0 {
                    RegimeLimit::Zero
                } else if *p == 1.0 {
                    RegimeLimit::Finite(*c)
                } else {
                    RegimeLimit::Infinite
                }
            }
            TradeoffKind::LogPower { .. } | TradeoffKind::Zero => RegimeLimit::Zero,
            TradeoffKind::LinearPlus { mu, sub } => {
                let base = mu * mu;
                match sub.as_deref().map(TradeoffKind::regime_limit) {
                    None | Some(RegimeLimit::Zero) => RegimeLimit::Finite(base),
                    Some(RegimeLimit::Finite(v)) => RegimeLimit::Finite(base + v),
                    Some(RegimeLimit::Infinite) => RegimeLimit::Infinite,
                }
            }
            TradeoffKind::Tabulated(t) => {
                if t.tail_sqrt_slope > 0.0 {
                    RegimeLimit::Infinite
                } else {
                    RegimeLimit::Zero
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            TradeoffKind::PowerLaw { c, p } | TradeoffKind::LogPower { c, p } => {
                positive("C", *c)?;
                positive("p", *p)
            }
            TradeoffKind::LinearPlus { mu, sub } => {
                positive("mu", *mu)?;
                match sub {
                    Some(s) => s.validate(),
                    None => Ok(()),
                }
            }
            TradeoffKind::Zero | TradeoffKind::Tabulated(_) => Ok(()),
        }
    }
}

/// A trade-off function together with its trait lower bound `θ̲`.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffSpec {
    kind: TradeoffKind,
    theta_min: f64,
}

impl TradeoffSpec {
    pub fn new(kind: TradeoffKind, theta_min: f64) -> Result<Self> {
        if !(theta_min > 0.0 && theta_min.is_finite()) {
            return Err(Error::config(format!("theta_min must be positive, got {theta_min}")));
        }
        kind.validate()?;
        if let TradeoffKind::Tabulated(t) = &kind {
            let (t0, m0) = t.knots[0];
            if (t0 - theta_min).abs() > 1e-12 * theta_min || m0 != 0.0 {
                return Err(Error::config("tabulated trade-off must start at (theta_min, 0)"));
            }
        }
        Ok(Self { kind, theta_min })
    }

    pub fn power_law(c: f64, p: f64, theta_min: f64) -> Result<Self> {
        Self::new(TradeoffKind::PowerLaw { c, p }, theta_min)
    }

    pub fn log_power(c: f64, p: f64, theta_min: f64) -> Result<Self> {
        Self::new(TradeoffKind::LogPower { c, p }, theta_min)
    }

    pub fn linear_plus(mu: f64, sub: Option<TradeoffKind>, theta_min: f64) -> Result<Self> {
        Self::new(
            TradeoffKind::LinearPlus {
                mu,
                sub: sub.map(Box::new),
            },
            theta_min,
        )
    }

    pub fn zero(theta_min: f64) -> Result<Self> {
        Self::new(TradeoffKind::Zero, theta_min)
    }

    pub fn tabulated(knots: Vec<(f64, f64)>, theta_min: f64) -> Result<Self> {
        Self::new(TradeoffKind::Tabulated(MonotoneTable::new(knots)?), theta_min)
    }

    pub fn kind(&self) -> &TradeoffKind {
        &self.kind
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, TradeoffKind::Zero)
    }

    /// `m(θ)` with the domain check.
    pub fn eval_m(&self, theta: f64) -> Result<f64> {
        self.check_domain(theta)?;
        Ok(self.m(theta))
    }

    /// `m(θ)` without the domain check; arguments below `θ̲` are clamped.
    pub fn m(&self, theta: f64) -> f64 {
        self.eval3(theta).0
    }

    pub fn dm(&self, theta: f64) -> f64 {
        self.eval3(theta).1
    }

    pub fn d2m(&self, theta: f64) -> f64 {
        self.eval3(theta).2
    }

    /// Value, first and second derivative of `m`.
    pub fn eval3(&self, theta: f64) -> (f64, f64, f64) {
        if theta <= self.theta_min {
            let (_, d, d2) = self.kind.eval3(self.theta_min, self.theta_min);
            return (0.0, d, d2);
        }
        self.kind.eval3(theta, self.theta_min)
    }

    pub fn regime_limit(&self) -> RegimeLimit {
        self.kind.regime_limit()
    }

    pub fn is_sublinear(&self) -> bool {
        self.regime_limit() == RegimeLimit::Zero
    }

    /// `μ` of the critical case `m(θ)/θ → μ² ∈ (0, ∞)`.
    pub fn critical_mu(&self) -> Option<f64> {
        match self.regime_limit() {
            RegimeLimit::Finite(v) if v > 0.0 => Some(v.sqrt()),
            _ => None,
        }
    }

    /// Point `θ_d` past which `m(θ)/θ` is decreasing; only defined for
    /// sublinear trade-offs.
    pub fn decreasing_ratio_threshold(&self) -> Option<f64> {
        if !self.is_sublinear() {
            return None;
        }
        let tmin = self.theta_min;
        match &self.kind {
            TradeoffKind::PowerLaw { p, .. } => Some(tmin * (1.0 / (1.0 - p)).powf(1.0 / p)),
            TradeoffKind::LogPower { p, .. } => Some(tmin * p.exp()),
            TradeoffKind::Zero => Some(tmin),
            _ => Some(self.sampled_ratio_threshold()),
        }
    }

    /// Last sample where `m(θ)/θ` fails to decrease, on a geometric grid.
    fn sampled_ratio_threshold(&self) -> f64 {
        let tmin = self.theta_min;
        let samples: Vec<f64> = (0..=2000)
            .map(|k| tmin * (1.0 + 1e-3) * 10f64.powf(6.0 * k as f64 / 2000.0))
            .collect();
        let mut threshold = samples[0];
        for w in samples.windows(2) {
            if self.m(w[1]) / w[1] >= self.m(w[0]) / w[0] {
                threshold = w[1];
            }
        }
        threshold
    }

    fn check_domain(&self, theta: f64) -> Result<()> {
        if theta.is_nan() || theta < self.theta_min {
            Err(Error::domain(format!(
                "theta = {theta} is below theta_min = {}",
                self.theta_min
            )))
        } else {
            Ok(())
        }
    }
}

pub fn eval_m(spec: &TradeoffSpec, theta: f64) -> Result<f64> {
    spec.eval_m(theta)
}

/// Decides the long-time regime from the trade-off class and `γ∞`.
pub fn classify_regime(spec: &TradeoffSpec, gamma_inf: f64) -> Regime {
    if gamma_inf <= 0.0 {
        Regime::Extinction
    } else if spec.regime_limit().is_positive() {
        Regime::Linear
    } else {
        Regime::Accelerating
    }
}

/// `Φ(θ) = ∫_θ̲^θ √m(s) ds` with a cumulative table on geometric knots.
#[derive(Debug, Clone)]
pub struct PhiProfile {
    spec: TradeoffSpec,
    cache: Vec<(f64, f64)>,
}

impl PhiProfile {
    pub fn new(spec: TradeoffSpec) -> Self {
        let tmin = spec.theta_min();
        let step = 1e-2 * tmin.max(1.0);
        let mut cache = vec![(tmin, 0.0)];
        if Self::closed_form(&spec, tmin).is_none() {
            let mut acc = 0.0;
            let mut prev = tmin;
            let mut k = 1;
            loop {
                let theta = tmin + step * ((1u64 << k) - 1) as f64;
                acc += Self::segment(&spec, prev, theta);
                cache.push((theta, acc));
                prev = theta;
                k += 1;
                if theta > tmin + 1e7 {
                    break;
                }
            }
        }
        Self { spec, cache }
    }

    pub fn spec(&self) -> &TradeoffSpec {
        &self.spec
    }

    /// The cumulative `(θ, Φ(θ))` table (a single entry for closed forms).
    pub fn cache(&self) -> &[(f64, f64)] {
        &self.cache
    }

    fn closed_form(spec: &TradeoffSpec, theta: f64) -> Option<f64> {
        let tmin = spec.theta_min();
        let d = (theta - tmin).max(0.0);
        match spec.kind() {
            TradeoffKind::Zero => Some(0.0),
            TradeoffKind::PowerLaw { c, p } if *p == 1.0 => Some(c.sqrt() * 2.0 / 3.0 * d.powf(1.5)),
            TradeoffKind::PowerLaw { c, p } if *p == 2.0 => {
                let r = (theta * theta - tmin * tmin).max(0.0).sqrt();
                Some(c.sqrt() * 0.5 * (theta * r - tmin * tmin * ((theta + r) / tmin).ln()))
            }
            TradeoffKind::LogPower { c, p } if *p == 2.0 => {
                Some(c.sqrt() * (theta * (theta / tmin).ln() - theta + tmin))
            }
            TradeoffKind::LinearPlus { mu, sub: None } => Some(mu * 2.0 / 3.0 * d.powf(1.5)),
            _ => None,
        }
    }

    fn segment(spec: &TradeoffSpec, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if a <= spec.theta_min() {
            // s = θ̲ + u² removes the square-root behaviour of √m at θ̲
            let tmin = spec.theta_min();
            integrate(
                |u| 2.0 * u * spec.m(tmin + u * u).max(0.0).sqrt(),
                0.0,
                (b - tmin).sqrt(),
                PHI_REL_TOL,
            )
        } else {
            integrate(|s| spec.m(s).max(0.0).sqrt(), a, b, PHI_REL_TOL)
        }
    }

    /// `Φ(θ)`; errors below `θ̲`.
    pub fn eval_phi(&self, theta: f64) -> Result<f64> {
        self.spec.check_domain(theta)?;
        Ok(self.phi(theta))
    }

    pub(crate) fn phi(&self, theta: f64) -> f64 {
        if let Some(v) = Self::closed_form(&self.spec, theta) {
            return v;
        }
        let k = match self.cache.binary_search_by(|(t, _)| t.partial_cmp(&theta).unwrap()) {
            Ok(k) => return self.cache[k].1,
            Err(0) => return 0.0,
            Err(k) => k - 1,
        };
        let (t0, p0) = self.cache[k];
        p0 + Self::segment(&self.spec, t0, theta)
    }

    /// `η_a(t)`: the unique `η` with `Φ(η) = a·t`.
    pub fn eta(&self, a: f64, t: f64) -> Result<f64> {
        if !(a > 0.0) || !(t > 0.0) {
            return Err(Error::domain(format!(
                "eta needs a > 0 and t > 0, got a = {a}, t = {t}"
            )));
        }
        if self.spec.is_zero() {
            return Err(Error::EtaUndefined);
        }
        let target = a * t;
        let tol = ETA_REL_TOL * target.max(1.0);
        let tmin = self.spec.theta_min();
        let mut lo = tmin;
        let mut width = 1.0;
        let mut hi = tmin + width;
        while self.phi(hi) < target {
            lo = hi;
            width *= 2.0;
            hi = tmin + width;
            if !hi.is_finite() {
                return Err(Error::EtaUndefined);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let value = self.phi(mid) - target;
            if value.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(mid);
            }
            if value < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Empirical constant `D_m` of `θ√m(θ) ≤ D_m·Φ(θ)`, sampled on
    /// `[2θ_d, 10⁶]`. `None` for non-sublinear or zero trade-offs.
    pub fn sandwich_constant(&self) -> Option<SandwichReport> {
        if self.spec.is_zero() {
            return None;
        }
        let theta_d = self.spec.decreasing_ratio_threshold()?;
        let lo = 2.0 * theta_d;
        let hi = 1e6_f64.max(lo * 10.0);
        let mut d_m: f64 = 0.0;
        let mut lower_holds = true;
        for k in 0..=400 {
            let theta = lo * (hi / lo).powf(k as f64 / 400.0);
            let phi = self.phi(theta);
            let rhs = theta * self.spec.m(theta).sqrt();
            lower_holds &= phi <= rhs * (1.0 + 1e-12);
            d_m = d_m.max(rhs / phi);
        }
        Some(SandwichReport {
            theta_d,
            d_m,
            lower_holds,
        })
    }

    /// Smallest `C_a ≥ 1` with `C_a⁻¹ ≤ η_a(t)/η₁(t) ≤ C_a` over sampled `t`.
    pub fn eta_comparability(&self, a: f64, t_lo: f64, t_hi: f64, samples: usize) -> Result<f64> {
        let mut c: f64 = 1.0;
        for k in 0..samples {
            let t = t_lo * (t_hi / t_lo).powf(k as f64 / (samples - 1).max(1) as f64);
            let ratio = self.eta(a, t)? / self.eta(1.0, t)?;
            c = c.max(ratio).max(1.0 / ratio);
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub theta_d: f64,
    pub d_m: f64,
    /// Whether `Φ(θ) ≤ θ√m(θ)` held at every sample.
    pub lower_holds: bool,
}

pub fn eval_phi(profile: &PhiProfile, theta: f64) -> Result<f64> {
    profile.eval_phi(theta)
}

pub fn eta(profile: &PhiProfile, a: f64, t: f64) -> Result<f64> {
    profile.eta(a, t)
}
