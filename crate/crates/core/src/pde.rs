//! Time integration of the nonlocal equation on a truncated `(x, θ)`
//! rectangle.
//!
//! Each step is a Strang splitting: half a reaction step (exact exponential
//! update with `ρ` frozen), one ADI diffusion step (a sweep in `x` with
//! coefficient `θ`, then a sweep in `θ`), and another reaction half step with
//! `ρ` recomputed. The `x` ends carry Neumann conditions, `θ̲` a Neumann
//! condition and `theta_max` a homogeneous Dirichlet condition.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fronts::{self, FrontTrace, Profile1D};
use crate::model::{PhiProfile, TradeoffSpec};
use crate::numerics::Tridiagonal;
use crate::spectral::{self, Normalization, MIN_NODES};

/// `ρ(x)` on the spatial grid.
pub type Density1D = Profile1D;

/// Level of `ρ` whose approach to `x_max` invalidates a run.
pub const BOUNDARY_LEVEL: f64 = 1e-3;
/// Exponent of `Q` in the tail monitor.
pub const TAIL_DELTA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub nx: usize,
    pub ntheta: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, theta_min: f64, theta_max: f64, nx: usize, ntheta: usize) -> Result<Self> {
        let grid = Self {
            x_min,
            x_max,
            theta_min,
            theta_max,
            nx,
            ntheta,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 3 || self.ntheta < 3 {
            return Err(Error::config("grid needs at least 3 nodes in each direction"));
        }
        if !(self.x_max > self.x_min) || !(self.theta_max > self.theta_min) || !(self.theta_min > 0.0) {
            return Err(Error::config(format!("degenerate grid {self:?}")));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        (self.theta_max - self.theta_min) / (self.ntheta - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.theta_min + j as f64 * self.dtheta()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `n(t, x, θ)` stored row-major: `values[i * ntheta + j] = n(x_i, θ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field2D {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            time: 0.0,
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for i in 0..grid.nx {
            for j in 0..grid.ntheta {
                field.values[i * grid.ntheta + j] = f(grid.x(i), grid.theta(j));
            }
        }
        field
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.ntheta + j]
    }

    /// Trait profile at `x_i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let nt = self.grid.ntheta;
        &self.values[i * nt..(i + 1) * nt]
    }

    /// Trapezoid integral over the whole rectangle.
    pub fn mass(&self) -> f64 {
        let rho = rho(self);
        crate::numerics::trapezoid(&rho.values, self.grid.dx())
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `max_x n(·, θ)` on the trait grid.
    pub fn trait_marginal(&self) -> Profile1D {
        let nt = self.grid.ntheta;
        let mut values = vec![0.0f64; nt];
        for row in self.values.chunks_exact(nt) {
            for (v, &n) in values.iter_mut().zip(row) {
                *v = v.max(n);
            }
        }
        Profile1D {
            origin: self.grid.theta_min,
            spacing: self.grid.dtheta(),
            values,
            time: self.time,
        }
    }
}

/// Trapezoid rule in `θ` for each `x` node.
pub fn rho(field: &Field2D) -> Density1D {
    let h = field.grid.dtheta();
    let values = field
        .values
        .chunks_exact(field.grid.ntheta)
        .map(|row| crate::numerics::trapezoid(row, h))
        .collect();
    Profile1D {
        origin: field.grid.x_min,
        spacing: field.grid.dx(),
        values,
        time: field.time,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiffusionScheme {
    /// Implicit Euler sweeps: unconditionally positive and order preserving.
    #[default]
    BackwardEuler,
    CrankNicolson,
}

impl DiffusionScheme {
    fn implicitness(self) -> f64 {
        match self {
            DiffusionScheme::BackwardEuler => 1.0,
            DiffusionScheme::CrankNicolson => 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub tradeoff: TradeoffSpec,
    pub dt: f64,
    pub t_final: f64,
    /// Drop the `−ρ n` term.
    pub linearized: bool,
    /// Disable the whole reaction term (pure diffusion).
    pub reaction: bool,
    /// Steps between recorded snapshots.
    pub snapshot_every: usize,
    /// Height and extent of the initial box.
    pub c0: f64,
    pub scheme: DiffusionScheme,
    pub front_threshold: f64,
    /// Keep full fields for every snapshot in [`RunOutput`].
    pub store_fields: bool,
}

impl SimConfig {
    pub fn new(grid: GridSpec, tradeoff: TradeoffSpec, dt: f64, t_final: f64) -> Self {
        Self {
            grid,
            tradeoff,
            dt,
            t_final,
            linearized: false,
            reaction: true,
            snapshot_every: 1,
            c0: 1.0,
            scheme: DiffusionScheme::default(),
            front_threshold: fronts::DEFAULT_THRESHOLD,
            store_fields: false,
        }
    }

    /// A priori bound on `ρ` used in the step-size bound.
    pub fn rho_max_estimate(&self) -> f64 {
        self.c0.powi(2).max(1.0)
    }

    /// Largest `dt` allowed by the reaction and splitting bounds.
    pub fn max_dt(&self) -> f64 {
        let rho = self.rho_max_estimate();
        let reaction = (0..self.grid.ntheta)
            .map(|j| 1.0 / (1.0 + (1.0 - self.tradeoff.m(self.grid.theta(j))).abs() + rho))
            .fold(f64::INFINITY, f64::min);
        (0.9 * reaction).min(self.grid.dx()).min(self.grid.dtheta())
    }

    /// Number of steps to reach `t_final`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    /// Checks the hard invariants and returns warnings for soft ones.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.grid.validate()?;
        if (self.grid.theta_min - self.tradeoff.theta_min()).abs() > 1e-12 * self.grid.theta_min {
            return Err(Error::config("grid theta_min differs from the trade-off theta_min"));
        }
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) || self.snapshot_every == 0 {
            return Err(Error::config("dt, t_final and snapshot_every must be positive"));
        }
        if self.dt > self.max_dt() * (1.0 + 1e-12) {
            return Err(Error::config(format!(
                "dt = {} exceeds the stability bound {}",
                self.dt,
                self.max_dt()
            )));
        }
        if !(self.front_threshold > 0.0) {
            return Err(Error::config("front threshold must be positive"));
        }
        let mut warnings = Vec::new();
        if let Ok(eta) = PhiProfile::new(self.tradeoff.clone()).eta(1.0, self.t_final) {
            let need = self.grid.theta_min + 4.0 * (eta - self.grid.theta_min);
            if self.grid.theta_max < need {
                warnings.push(format!(
                    "theta_max = {} is below theta_min + 4 eta_1(t_final) = {need:.3}",
                    self.grid.theta_max
                ));
            }
        }
        Ok(warnings)
    }
}

/// Precomputed implicit operators for one step size.
#[derive(Debug, Clone)]
struct Diffusion {
    nx: usize,
    nt: usize,
    theta_w: f64,
    /// explicit weights `(1 − ϑ) dt θ_j / dx²` and `(1 − ϑ) dt / dθ²`
    rx_explicit: Vec<f64>,
    rt_explicit: f64,
    /// batched Thomas factors of the `x` sweep, row-major like the field
    x_sub: Vec<f64>,
    x_cp: Vec<f64>,
    x_inv: Vec<f64>,
    theta_solve: Tridiagonal,
}

impl Diffusion {
    fn new(grid: &GridSpec, dt: f64, scheme: DiffusionScheme) -> Self {
        let (nx, nt) = (grid.nx, grid.ntheta);
        let w = scheme.implicitness();
        let dx2 = grid.dx().powi(2);
        let r: Vec<f64> = (0..nt).map(|j| w * dt * grid.theta(j) / dx2).collect();
        let mut x_sub = vec![0.0; nx * nt];
        let mut x_cp = vec![0.0; nx * nt];
        let mut x_inv = vec![0.0; nx * nt];
        for j in 0..nt {
            let mut prev = 0.0;
            for i in 0..nx {
                let a = match i {
                    0 => 0.0,
                    _ if i == nx - 1 => -2.0 * r[j],
                    _ => -r[j],
                };
                let c = match i {
                    0 => -2.0 * r[j],
                    _ if i == nx - 1 => 0.0,
                    _ => -r[j],
                };
                let inv = 1.0 / (1.0 + 2.0 * r[j] - a * prev);
                let k = i * nt + j;
                x_sub[k] = a;
                x_inv[k] = inv;
                x_cp[k] = c * inv;
                prev = x_cp[k];
            }
        }
        let rt = w * dt / grid.dtheta().powi(2);
        let m = nt - 1;
        let sub: Vec<f64> = (0..m).map(|_| -rt).collect();
        let diag = vec![1.0 + 2.0 * rt; m];
        let sup: Vec<f64> = (0..m).map(|j| if j == 0 { -2.0 * rt } else { -rt }).collect();
        Self {
            nx,
            nt,
            theta_w: w,
            rx_explicit: (0..nt).map(|j| (1.0 - w) * dt * grid.theta(j) / dx2).collect(),
            rt_explicit: (1.0 - w) * dt / grid.dtheta().powi(2),
            x_sub,
            x_cp,
            x_inv,
            theta_solve: Tridiagonal::factor(&sub, &diag, &sup),
        }
    }

    fn apply(&self, u: &mut [f64], scratch: &mut Vec<f64>) {
        self.sweep_x(u, scratch);
        self.sweep_theta(u);
    }

    fn sweep_x(&self, u: &mut [f64], scratch: &mut Vec<f64>) {
        let (nx, nt) = (self.nx, self.nt);
        if self.theta_w < 1.0 {
            scratch.clear();
            scratch.extend_from_slice(u);
            for i in 0..nx {
                let (l, r) = match i {
                    0 => (1, 1),
                    _ if i == nx - 1 => (nx - 2, nx - 2),
                    _ => (i - 1, i + 1),
                };
                for j in 0..nt {
                    let c = scratch[i * nt + j];
                    u[i * nt + j] = c + self.rx_explicit[j] * (scratch[l * nt + j] + scratch[r * nt + j] - 2.0 * c);
                }
            }
        }
        for j in 0..nt {
            u[j] *= self.x_inv[j];
        }
        for i in 1..nx {
            let (prev, cur) = u.split_at_mut(i * nt);
            let prev = &prev[(i - 1) * nt..];
            let cur = &mut cur[..nt];
            let k = i * nt;
            for j in 0..nt {
                cur[j] = (cur[j] - self.x_sub[k + j] * prev[j]) * self.x_inv[k + j];
            }
        }
        for i in (0..nx - 1).rev() {
            let (cur, next) = u.split_at_mut((i + 1) * nt);
            let cur = &mut cur[i * nt..];
            let k = i * nt;
            for j in 0..nt {
                cur[j] -= self.x_cp[k + j] * next[j];
            }
        }
    }

    fn sweep_theta(&self, u: &mut [f64]) {
        let nt = self.nt;
        let re = self.rt_explicit;
        let explicit = self.theta_w < 1.0;
        u.par_chunks_mut(nt).for_each(|row| {
            if explicit {
                let old = row.to_vec();
                for j in 0..nt - 1 {
                    let l = if j == 0 { old[1] } else { old[j - 1] };
                    row[j] = old[j] + re * (l + old[j + 1] - 2.0 * old[j]);
                }
            }
            row[nt - 1] = 0.0;
            self.theta_solve.solve_in_place(&mut row[..nt - 1]);
        });
    }
}

/// Initial box of height `C0` on `{x ≤ C0} × [θ̲, θ̲ + C0]`, smoothed by one
/// diffusion half step and cut off above `θ̲ + C0 + 3 dθ`.
pub fn init_field(config: &SimConfig) -> Result<Field2D> {
    let g = config.grid;
    let c0 = config.c0;
    if !(c0 > 0.0) {
        return Err(Error::config("C0 must be positive"));
    }
    if c0 >= g.x_max || g.x_min >= c0 || g.theta_min + c0 > g.theta_max {
        return Err(Error::config(format!(
            "initial box [x_min, {c0}] x [{}, {}] is not inside the grid",
            g.theta_min,
            g.theta_min + c0
        )));
    }
    // each node carries the fraction of its dual cell covered by the box
    let cover = |v: f64, edge: f64, h: f64| ((edge - v) / h + 0.5).clamp(0.0, 1.0);
    let (dx, dth) = (g.dx(), g.dtheta());
    let mut field = Field2D::from_fn(g, |x, th| c0 * cover(x, c0, dx) * cover(th, g.theta_min + c0, dth));
    let smoother = Diffusion::new(&g, 0.5 * config.dt, DiffusionScheme::BackwardEuler);
    smoother.apply(&mut field.values, &mut Vec::new());
    let cutoff = g.theta_min + c0 + 3.0 * g.dtheta();
    for (k, v) in field.values.iter_mut().enumerate() {
        if g.theta(k % g.ntheta) > cutoff + 1e-12 * cutoff {
            *v = 0.0;
        }
    }
    Ok(field)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundMonitor {
    pub time: f64,
    pub sup_n: f64,
    pub sup_rho: f64,
    pub min_n: f64,
    /// `max n / Q^δ` over `θ ≥ θ_mid`.
    pub tail_ratio: f64,
}

/// `Q^δ` on the trait grid, from the ground state on twice the trait window.
#[derive(Debug, Clone)]
pub struct TailReference {
    weights: Vec<f64>,
    j_mid: usize,
}

impl TailReference {
    pub fn new(spec: &TradeoffSpec, grid: &GridSpec) -> Result<Self> {
        let b = 2.0 * (grid.theta_max - grid.theta_min);
        let n = (2 * grid.ntheta).max(MIN_NODES);
        let q = spectral::ground_state_q(spec, b, n, Normalization::SupOne)?;
        let weights = (0..grid.ntheta)
            .map(|j| q.value_at(grid.theta(j)).max(0.0).powf(TAIL_DELTA))
            .collect();
        Ok(Self {
            weights,
            j_mid: grid.ntheta / 2,
        })
    }
}

/// Sup and inf statistics of a state, plus the tail ratio when a reference
/// is given.
pub fn monitor_bounds(field: &Field2D, tail: Option<&TailReference>) -> BoundMonitor {
    let density = rho(field);
    let tail_ratio = tail.map_or(f64::NAN, |tail| {
        let nt = field.grid.ntheta;
        let mut worst = 0.0f64;
        for row in field.values.chunks_exact(nt) {
            for j in tail.j_mid..nt - 1 {
                if tail.weights[j] > 1e-300 {
                    worst = worst.max(row[j] / tail.weights[j]);
                }
            }
        }
        worst
    });
    BoundMonitor {
        time: field.time,
        sup_n: field.sup(),
        sup_rho: density.values.iter().cloned().fold(0.0, f64::max),
        min_n: field.min(),
        tail_ratio,
    }
}

/// A running simulation owning its state and precomputed operators.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    field: Field2D,
    step_index: usize,
    diffusion: Diffusion,
    /// `exp((1 − m(θ_j)) dt / 2)`
    growth_half: Vec<f64>,
    rho: Vec<f64>,
    scratch: Vec<f64>,
    warnings: Vec<String>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        let warnings = config.validate()?;
        let field = init_field(&config)?;
        Self::with_field(config, field, warnings)
    }

    /// Starts from a given state instead of the initial box.
    pub fn from_field(config: SimConfig, field: Field2D) -> Result<Self> {
        let warnings = config.validate()?;
        if field.grid != config.grid {
            return Err(Error::config("field grid differs from the configured grid"));
        }
        Self::with_field(config, field, warnings)
    }

    fn with_field(config: SimConfig, field: Field2D, warnings: Vec<String>) -> Result<Self> {
        let g = config.grid;
        let growth_half = (0..g.ntheta)
            .map(|j| {
                if config.reaction {
                    ((1.0 - config.tradeoff.m(g.theta(j))) * 0.5 * config.dt).exp()
                } else {
                    1.0
                }
            })
            .collect();
        let rho = rho(&field).values;
        Ok(Self {
            diffusion: Diffusion::new(&g, config.dt, config.scheme),
            config,
            field,
            step_index: 0,
            growth_half,
            rho,
            scratch: Vec::new(),
            warnings,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn field(&self) -> &Field2D {
        &self.field
    }

    pub fn time(&self) -> f64 {
        self.field.time
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn density(&self) -> Density1D {
        Profile1D {
            origin: self.config.grid.x_min,
            spacing: self.config.grid.dx(),
            values: self.rho.clone(),
            time: self.field.time,
        }
    }

    fn react_half(&mut self) {
        let nt = self.config.grid.ntheta;
        let dt = self.config.dt;
        let crowding = self.config.reaction && !self.config.linearized;
        let growth = &self.growth_half;
        for (row, &r) in self.field.values.chunks_exact_mut(nt).zip(&self.rho) {
            let crowd = if crowding { (-0.5 * r * dt).exp() } else { 1.0 };
            for (v, &g) in row.iter_mut().zip(growth) {
                *v *= g * crowd;
            }
        }
    }

    fn refresh_rho(&mut self) {
        let h = self.config.grid.dtheta();
        let nt = self.config.grid.ntheta;
        for (r, row) in self.rho.iter_mut().zip(self.field.values.chunks_exact(nt)) {
            *r = crate::numerics::trapezoid(row, h);
        }
    }

    /// Advances one step of size `dt`.
    pub fn step(&mut self) -> Result<()> {
        self.react_half();
        self.diffusion.apply(&mut self.field.values, &mut self.scratch);
        self.refresh_rho();
        self.react_half();
        self.refresh_rho();
        self.step_index += 1;
        self.field.time = self.step_index as f64 * self.config.dt;
        if self.rho.iter().any(|r| !r.is_finite()) || self.field.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                step: self.step_index,
                time: self.field.time,
            });
        }
        Ok(())
    }

    /// Runs to `t_final`, calling `observer` at `t = 0`, every
    /// `snapshot_every` steps and at the final step.
    pub fn run_observed(&mut self, mut observer: impl FnMut(&Field2D, &Density1D)) -> Result<()> {
        let steps = self.config.steps();
        observer(&self.field, &self.density());
        while self.step_index < steps {
            self.step()?;
            if self.step_index % self.config.snapshot_every == 0 || self.step_index == steps {
                observer(&self.field, &self.density());
            }
        }
        Ok(())
    }
}

/// Recorded history of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Full fields of the kept snapshots.
    pub snapshots: Vec<Field2D>,
    pub densities: Vec<Density1D>,
    /// `max_x n(·, θ)` per snapshot.
    pub trait_marginals: Vec<Profile1D>,
    pub fronts: FrontTrace,
    pub monitors: Vec<BoundMonitor>,
    /// First snapshot time at which the `ρ = 1e−3` level came within
    /// `10 dx` of `x_max`; later results are not trustworthy.
    pub invalid_after: Option<f64>,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn is_valid_at(&self, t: f64) -> bool {
        self.invalid_after.is_none_or(|t0| t < t0)
    }

    /// Front trace at another threshold.
    pub fn trace_at(&self, threshold: f64) -> FrontTrace {
        FrontTrace::from_profiles(&self.densities, &self.trait_marginals, threshold, self.fronts.theta_min)
    }
}

/// Integrates `config` from the initial box to `t_final`.
pub fn run(config: &SimConfig) -> Result<RunOutput> {
    run_keeping(config, |_| config.store_fields)
}

/// As [`run`], storing the full field of the snapshots selected by `keep`.
pub fn run_keeping(config: &SimConfig, mut keep: impl FnMut(&Field2D) -> bool) -> Result<RunOutput> {
    let mut sim = Simulation::new(config.clone())?;
    let tail = TailReference::new(&config.tradeoff, &config.grid)?;
    let g = config.grid;
    let edge = g.x_max - 10.0 * g.dx();
    let mut out = RunOutput {
        snapshots: Vec::new(),
        densities: Vec::new(),
        trait_marginals: Vec::new(),
        fronts: FrontTrace::new(config.front_threshold, g.theta_min),
        monitors: Vec::new(),
        invalid_after: None,
        warnings: sim.warnings().to_vec(),
    };
    sim.run_observed(|field, density| {
        let marginal = field.trait_marginal();
        out.fronts.push(
            field.time,
            fronts::front_position(density, config.front_threshold),
            fronts::trait_front(&marginal, config.front_threshold),
        );
        out.monitors.push(monitor_bounds(field, Some(&tail)));
        if out.invalid_after.is_none() && fronts::front_position(density, BOUNDARY_LEVEL).is_some_and(|x| x >= edge) {
            out.invalid_after = Some(field.time);
            out.warnings.push(format!(
                "front reached the x boundary at t = {}; later results are invalid",
                field.time
            ));
        }
        if keep(field) {
            out.snapshots.push(field.clone());
        }
        out.densities.push(density.clone());
        out.trait_marginals.push(marginal);
    })?;
    Ok(out)
}
