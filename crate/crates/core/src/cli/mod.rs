//! Subcommands of the `canetoad` binary.

mod output;
mod plots;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use canetoad::action::{self, Endpoints, PathBudget};
use canetoad::config::RunConfig;
use canetoad::fronts::{self, FitResult, FrontTrace};
use canetoad::pde::{self, Field2D, RunOutput, SimConfig};
use canetoad::spectral::{self, DispersionCurve, EigenPair, Normalization};
use canetoad::{classify_regime, Error, PhiProfile, Regime, Result};

use output::{num, opt, time_label, Csv, Meta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Spectrum,
    Simulate,
    Fronts,
    Action,
    Report,
}

/// Exit status, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    AcceptanceFailed,
    Numeric,
    Invalidated,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::AcceptanceFailed => 1,
            Status::Numeric => 2,
            Status::Invalidated => 3,
        }
    }

    fn of_error(e: &Error) -> Self {
        match e {
            Error::Domain(_) | Error::EtaUndefined => Status::Invalidated,
            _ => Status::Numeric,
        }
    }
}

struct Context {
    cfg: RunConfig,
    out: PathBuf,
    plots: bool,
    meta: Meta,
}

impl Context {
    fn new(cfg: RunConfig, out: PathBuf, plots: bool) -> Result<Self> {
        std::fs::create_dir_all(&out)?;
        let plots = plots || cfg.output.plots;
        Ok(Self {
            meta: Meta::of(&cfg),
            cfg,
            out,
            plots,
        })
    }

    fn path(&self, file: &str) -> PathBuf {
        self.out.join(file)
    }

    fn csv(&self, columns: &[&str]) -> Csv {
        Csv::new(&self.meta, columns)
    }
}

pub fn single(config: &Path, out: Option<PathBuf>, plots: bool, task: Task) -> Status {
    let cfg = match RunConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return Status::Numeric;
        }
    };
    let out = out.unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    let (status, text) = execute(cfg, out, plots, task);
    print!("{text}");
    status
}

/// Runs one task and returns its status with the text to print.
fn execute(cfg: RunConfig, out: PathBuf, plots: bool, task: Task) -> (Status, String) {
    let ctx = match Context::new(cfg, out, plots) {
        Ok(c) => c,
        Err(e) => return (Status::Numeric, format!("error: {e}\n")),
    };
    let result = match task {
        Task::Spectrum => spectrum(&ctx).map(|s| (Status::Ok, s.describe())),
        Task::Simulate => simulate(&ctx).map(|r| (r.status(), r.describe())),
        Task::Fronts => simulate(&ctx).and_then(|r| {
            let fits = fit_fronts(&ctx, &r.output)?;
            Ok((r.status(), format!("{}{}", r.describe(), fits.describe())))
        }),
        Task::Action => action_grid(&ctx).map(|a| (Status::Ok, a.describe())),
        Task::Report => report::run(&ctx),
    };
    match result {
        Ok(v) => v,
        Err(e) => (Status::of_error(&e), format!("error [{}]: {e}\n", ctx.cfg.name)),
    }
}

pub fn sweep(paths: &[PathBuf], out: &Path, plots: bool, jobs: usize) -> Status {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = match std::fs::read_dir(p) {
                Ok(rd) => rd
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|f| f.extension().is_some_and(|x| x == "toml"))
                    .collect(),
                Err(e) => {
                    eprintln!("error: {}: {e}", p.display());
                    return Status::Numeric;
                }
            };
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return Status::Numeric;
        }
    };
    let results: Vec<(PathBuf, String, Status, String)> = pool.install(|| {
        files
            .par_iter()
            .map(|f| match RunConfig::load(f) {
                Ok(cfg) => {
                    let name = cfg.name.clone();
                    let dir = out.join(&name);
                    let (status, text) = execute(cfg, dir, plots, Task::Report);
                    (f.clone(), name, status, text)
                }
                Err(e) => (
                    f.clone(),
                    String::new(),
                    Status::Numeric,
                    format!("error: {}: {e}\n", f.display()),
                ),
            })
            .collect()
    });
    let mut summary = String::from("# canetoad sweep\nconfig,name,exit_code\n");
    let mut worst = Status::Ok;
    for (file, name, status, text) in &results {
        print!("{text}");
        summary.push_str(&format!("{},{},{}\n", file.display(), name, status.code()));
        worst = worst.max(*status);
    }
    if let Err(e) = std::fs::create_dir_all(out).and_then(|_| std::fs::write(out.join("sweep.csv"), summary)) {
        eprintln!("error: {e}");
        return Status::Numeric;
    }
    worst
}

// ---------------------------------------------------------------- spectrum

struct SpectrumSummary {
    gamma: f64,
    /// Truncation behind `gamma` when the half-line value is not used.
    gamma_truncation: Option<f64>,
    regime: Regime,
    q: EigenPair,
    curve: Option<DispersionCurve>,
    note: String,
}

impl SpectrumSummary {
    fn describe(&self) -> String {
        let mut s = format!("gamma_inf = {:.6}", self.gamma);
        if let Some(b) = self.gamma_truncation {
            s.push_str(&format!(" (truncation b = {b})"));
        }
        s.push_str(&format!("\nregime: {}\n", self.regime));
        match &self.curve {
            Some(c) => s.push_str(&format!("c* = {:.6} at lambda* = {:.6}\n", c.c_star, c.lambda_star)),
            None => s.push_str("c* unavailable\n"),
        }
        if !self.note.is_empty() {
            s.push_str(&self.note);
            s.push('\n');
        }
        s
    }
}

fn spectrum(ctx: &Context) -> Result<SpectrumSummary> {
    let cfg = &ctx.cfg;
    let spec = cfg.tradeoff_spec()?;
    let n = cfg.spectral.n;
    let (gamma, gamma_truncation) = if spec.is_zero() {
        let b = cfg.spectral.b.unwrap_or(10.0);
        (
            spectral::ground_state_q(&spec, b, n, Normalization::SupOne)?.eigenvalue,
            Some(b),
        )
    } else {
        (spectral::gamma_infinity(&spec, cfg.spectral.tol)?, None)
    };
    let regime = classify_regime(&spec, gamma);
    let b = cfg.spectral.b.unwrap_or_else(|| spectral::default_truncation(&spec));
    let q = spectral::ground_state_q(&spec, b, n, Normalization::SupOne)?;
    let (curve, note) = match regime {
        Regime::Linear => (Some(spectral::minimal_speed(&spec, b, n)?), String::new()),
        Regime::Accelerating => (
            None,
            "accelerating regime: m(θ)/θ → 0, the traveling-wave spectral problem has no solution on the half-line"
                .to_string(),
        ),
        Regime::Extinction => (None, "extinction regime: gamma_inf <= 0".to_string()),
    };
    let s = SpectrumSummary {
        gamma,
        gamma_truncation,
        regime,
        q,
        curve,
        note,
    };

    let mut csv = ctx.csv(&["key", "value"]);
    csv.row(&["gamma_inf".to_string(), num(s.gamma)]);
    csv.row(&["gamma_truncation_b".to_string(), opt(s.gamma_truncation)]);
    csv.row(&["regime".to_string(), s.regime.to_string()]);
    let c = s.curve.as_ref();
    csv.row(&["c_star".to_string(), c.map_or("unavailable".into(), |c| num(c.c_star))]);
    csv.row(&[
        "lambda_star".to_string(),
        c.map_or(String::new(), |c| num(c.lambda_star)),
    ]);
    csv.row(&["critical_mu".to_string(), opt(spec.critical_mu())]);
    csv.row(&[
        "boundary_infimum".to_string(),
        c.map_or(String::new(), |c| c.boundary_infimum.to_string()),
    ]);
    csv.row(&["truncation_b".to_string(), num(b)]);
    csv.row(&["nodes".to_string(), n.to_string()]);
    csv.row(&["note".to_string(), s.note.clone()]);
    csv.write(&ctx.path("spectrum.csv"))?;

    let mut qcsv = ctx.csv(&["theta", "q"]);
    for (t, v) in s.q.grid.iter().zip(&s.q.eigenfunction) {
        qcsv.row(&[num(*t), num(*v)]);
    }
    qcsv.write(&ctx.path("q_profile.csv"))?;

    if let Some(c) = &s.curve {
        let mut d = ctx.csv(&["lambda", "c_lambda"]);
        for (l, v) in c.lambdas.iter().zip(&c.speeds) {
            d.row(&[num(*l), num(*v)]);
        }
        d.write(&ctx.path("dispersion.csv"))?;
    }
    if ctx.plots {
        let q: Vec<(f64, f64)> =
            s.q.grid
                .iter()
                .cloned()
                .zip(s.q.eigenfunction.iter().cloned())
                .collect();
        plots::lines(
            &ctx.path("q_profile.svg"),
            "ground state Q",
            ("θ", "Q"),
            &[("Q".into(), q)],
            false,
        )?;
        if let Some(c) = &s.curve {
            let pts: Vec<(f64, f64)> = c
                .lambdas
                .iter()
                .zip(&c.speeds)
                .filter(|(l, v)| **l <= 20.0 * c.lambda_star && **v <= 5.0 * c.c_star)
                .map(|(l, v)| (*l, *v))
                .collect();
            plots::lines(
                &ctx.path("dispersion.svg"),
                "dispersion relation",
                ("λ", "c_λ"),
                &[("c_λ".into(), pts)],
                false,
            )?;
        }
    }
    Ok(s)
}

// ---------------------------------------------------------------- simulate

/// Fields kept for plots are sampled on at most this many points per axis.
const SNAPSHOT_POINTS: (usize, usize) = (201, 121);

struct SimRun {
    sim: SimConfig,
    output: RunOutput,
    seconds: f64,
}

impl SimRun {
    fn status(&self) -> Status {
        if self.output.invalid_after.is_some() {
            Status::Invalidated
        } else {
            Status::Ok
        }
    }

    fn describe(&self) -> String {
        let o = &self.output;
        let mut s = format!(
            "simulated to t = {} with dt = {:.5} on {}x{} nodes in {:.1} s\n",
            self.sim.t_final, self.sim.dt, self.sim.grid.nx, self.sim.grid.ntheta, self.seconds
        );
        for w in &o.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        if let Some(m) = o.monitors.last() {
            s.push_str(&format!("final sup n = {:.4e}, sup rho = {:.4e}\n", m.sup_n, m.sup_rho));
        }
        s
    }
}

fn simulate(ctx: &Context) -> Result<SimRun> {
    let cfg = &ctx.cfg;
    let sim = cfg.sim_config()?;
    let half = 0.5 * sim.dt;
    let plot_times = cfg.sim.plot_times.clone();
    let start = Instant::now();
    let output = pde::run_keeping(&sim, |f| plot_times.iter().any(|t| (f.time - t).abs() <= half))?;
    let seconds = start.elapsed().as_secs_f64();

    let extra = &cfg.fronts.extra_thresholds;
    let traces: Vec<FrontTrace> = extra.iter().map(|&t| output.trace_at(t)).collect();
    let mut columns = vec!["t".to_string(), "x_front".into(), "theta_front".into()];
    for t in extra {
        columns.push(format!("x_front_{t}"));
        columns.push(format!("theta_front_{t}"));
    }
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut csv = ctx.csv(&refs);
    let f = &output.fronts;
    for k in 0..f.len() {
        let mut row = vec![num(f.times[k]), opt(f.x_front[k]), opt(f.theta_front[k])];
        for tr in &traces {
            row.push(opt(tr.x_front[k]));
            row.push(opt(tr.theta_front[k]));
        }
        csv.row(&row);
    }
    csv.write(&ctx.path("fronts.csv"))?;

    let mut mon = ctx.csv(&["t", "sup_n", "sup_rho", "min_n", "tail_ratio"]);
    for m in &output.monitors {
        mon.row(&[
            num(m.time),
            num(m.sup_n),
            num(m.sup_rho),
            num(m.min_n),
            num(m.tail_ratio),
        ]);
    }
    mon.write(&ctx.path("monitor.csv"))?;

    let mut overlay = Vec::new();
    for field in &output.snapshots {
        let label = time_label(field.time);
        let rho = output
            .densities
            .iter()
            .find(|d| (d.time - field.time).abs() <= half)
            .expect("a density is recorded with every snapshot");
        let mut r = ctx.csv(&["x", "rho"]);
        for (i, v) in rho.values.iter().enumerate() {
            r.row(&[num(rho.coordinate(i)), num(*v)]);
        }
        r.write(&ctx.path(&format!("rho_t{label}.csv")))?;
        write_snapshot(ctx, field, &label)?;
        overlay.push((
            format!("t = {label}"),
            rho.values
                .iter()
                .enumerate()
                .map(|(i, v)| (rho.coordinate(i), *v))
                .collect(),
        ));
        if ctx.plots {
            let title = format!("{}: n(t, x, θ) at t = {label}", cfg.name);
            plots::heatmap(field, &ctx.path(&format!("phase_t{label}.svg")), &title)?;
        }
    }
    if ctx.plots {
        plots::lines(
            &ctx.path("rho_overlay.svg"),
            "evolution of ρ",
            ("x", "ρ"),
            &overlay,
            false,
        )?;
        let xs: Vec<(f64, f64)> = f
            .times
            .iter()
            .zip(&f.x_front)
            .filter_map(|(t, x)| x.map(|x| (*t, x)))
            .collect();
        let ts: Vec<(f64, f64)> = f
            .times
            .iter()
            .zip(&f.theta_front)
            .filter_map(|(t, x)| x.map(|x| (*t, x)))
            .collect();
        plots::lines(
            &ctx.path("fronts_x.svg"),
            "space front",
            ("t", "x"),
            &[("x front".into(), xs)],
            false,
        )?;
        plots::lines(
            &ctx.path("fronts_theta.svg"),
            "trait front",
            ("t", "θ"),
            &[("θ front".into(), ts)],
            false,
        )?;
        let sup: Vec<(f64, f64)> = output.monitors.iter().map(|m| (m.time, m.sup_n)).collect();
        plots::lines(
            &ctx.path("sup_n.svg"),
            "sup n",
            ("t", "sup n"),
            &[("sup n".into(), sup)],
            true,
        )?;
    }
    Ok(SimRun { sim, output, seconds })
}

fn write_snapshot(ctx: &Context, field: &Field2D, label: &str) -> Result<()> {
    let g = field.grid;
    let sx = g.nx.div_ceil(SNAPSHOT_POINTS.0);
    let st = g.ntheta.div_ceil(SNAPSHOT_POINTS.1);
    let mut csv = ctx.csv(&["x", "theta", "n"]);
    for i in (0..g.nx).step_by(sx) {
        for j in (0..g.ntheta).step_by(st) {
            csv.row(&[num(g.x(i)), num(g.theta(j)), num(field.at(i, j))]);
        }
    }
    csv.write(&ctx.path(&format!("snapshot_t{label}.csv")))
}

// ---------------------------------------------------------------- fronts

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FitKind {
    Speed,
    Exponent,
    TraitExponent,
}

impl FitKind {
    fn name(self) -> &'static str {
        match self {
            FitKind::Speed => "speed",
            FitKind::Exponent => "space_exponent",
            FitKind::TraitExponent => "trait_exponent",
        }
    }
}

struct Fit {
    threshold: f64,
    kind: FitKind,
    result: Result<FitResult>,
}

struct FrontFits {
    fits: Vec<Fit>,
}

impl FrontFits {
    fn get(&self, threshold: f64, kind: FitKind) -> Option<&FitResult> {
        self.fits
            .iter()
            .find(|f| f.threshold == threshold && f.kind == kind)
            .and_then(|f| f.result.as_ref().ok())
    }

    fn describe(&self) -> String {
        let mut s = String::new();
        for f in &self.fits {
            match &f.result {
                Ok(r) => s.push_str(&format!(
                    "{} at level {}: {:.4} ± {:.1e} (R² = {:.4})\n",
                    f.kind.name(),
                    f.threshold,
                    r.value,
                    r.stderr,
                    r.r_squared
                )),
                Err(e) => s.push_str(&format!("{} at level {}: {e}\n", f.kind.name(), f.threshold)),
            }
        }
        s
    }
}

fn fit_fronts(ctx: &Context, output: &RunOutput) -> Result<FrontFits> {
    let cfg = &ctx.cfg;
    let window = cfg.fit_window();
    let mut thresholds = vec![cfg.fronts.threshold];
    thresholds.extend(cfg.fronts.extra_thresholds.iter().copied());
    let mut fits = Vec::new();
    for &thr in &thresholds {
        let trace = output.trace_at(thr);
        fits.push(Fit {
            threshold: thr,
            kind: FitKind::Speed,
            result: fronts::fit_speed(&trace, window),
        });
        fits.push(Fit {
            threshold: thr,
            kind: FitKind::Exponent,
            result: fronts::fit_exponent(&trace, window),
        });
        fits.push(Fit {
            threshold: thr,
            kind: FitKind::TraitExponent,
            result: fronts::fit_trait_exponent(&trace, window),
        });
    }
    let mut csv = ctx.csv(&[
        "threshold",
        "quantity",
        "value",
        "stderr",
        "intercept",
        "r_squared",
        "points",
        "t_lo",
        "t_hi",
        "error",
    ]);
    for f in &fits {
        match &f.result {
            Ok(r) => csv.row(&[
                num(f.threshold),
                f.kind.name().into(),
                num(r.value),
                num(r.stderr),
                num(r.intercept),
                num(r.r_squared),
                r.points.to_string(),
                num(r.window.t_lo),
                num(r.window.t_hi),
                String::new(),
            ]),
            Err(e) => csv.row(&[
                num(f.threshold),
                f.kind.name().into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                num(window.t_lo),
                num(window.t_hi),
                e.to_string(),
            ]),
        }
    }
    csv.write(&ctx.path("fits.csv"))?;
    Ok(FrontFits { fits })
}

// ---------------------------------------------------------------- action

const ACTION_TIMES: [f64; 5] = [10.0, 20.0, 30.0, 40.0, 50.0];
const ACTION_FACTORS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];

struct ActionPoint {
    t: f64,
    x: f64,
    zeta: f64,
    lower_bound: Option<f64>,
    phi_max: f64,
    first_integral_spread: f64,
    minima: usize,
}

struct ActionSummary {
    points: Vec<ActionPoint>,
    /// `max(1, max lower_bound/ζ)`; `None` without a lower bound.
    kappa: Option<f64>,
    budget: Option<PathBudget>,
    gamma: f64,
    note: String,
}

impl ActionSummary {
    fn describe(&self) -> String {
        let mut s = String::new();
        if !self.note.is_empty() {
            s.push_str(&self.note);
            s.push('\n');
        }
        if !self.points.is_empty() {
            s.push_str(&format!("action grid: {} points", self.points.len()));
            if let Some(k) = self.kappa {
                s.push_str(&format!(", kappa = {k:.4}"));
            }
            s.push('\n');
        }
        match &self.budget {
            Some(b) => s.push_str(&format!(
                "rectangular path at T = {}: net exponent {:.3} with a = {}, A = {}\n",
                b.horizon, b.net_exponent, b.a_underline, b.big_a
            )),
            None if self.gamma > 0.0 && !self.points.is_empty() => {
                s.push_str("rectangular path: no admissible parameters on the search grid\n")
            }
            None => {}
        }
        s
    }

    fn max_spread(&self) -> f64 {
        self.points.iter().map(|p| p.first_integral_spread).fold(0.0, f64::max)
    }

    fn min_phi_margin(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.zeta - p.phi_max)
            .fold(f64::INFINITY, f64::min)
    }
}

fn action_grid(ctx: &Context) -> Result<ActionSummary> {
    let cfg = &ctx.cfg;
    let spec = cfg.tradeoff_spec()?;
    let mut summary = ActionSummary {
        points: Vec::new(),
        kappa: None,
        budget: None,
        gamma: 0.0,
        note: String::new(),
    };
    let mut csv = ctx.csv(&[
        "t",
        "x",
        "theta",
        "zeta",
        "lower_bound",
        "ratio",
        "phi_max_trait",
        "max_trait",
        "first_integral_spread",
        "local_minima",
    ]);
    if spec.is_zero() {
        summary.note = "action grid skipped: eta is undefined without a trade-off".into();
        csv.write(&ctx.path("action.csv"))?;
        return Ok(summary);
    }
    let profile = PhiProfile::new(spec.clone());
    let a_bar = cfg.action.a_bar;
    let opts = cfg.action_options();
    let tmin = spec.theta_min();
    let has_bound = spec.decreasing_ratio_threshold().is_some();
    for &t in &ACTION_TIMES {
        let front = profile.eta(a_bar, t)?.powf(1.5);
        for &f in &ACTION_FACTORS {
            let x = f * front;
            let sol = action::minimize_action(&spec, &Endpoints::from_origin(&spec, t, x, tmin), &opts)?;
            let lower_bound = if has_bound {
                Some(action::zeta_lower_bound(&spec, t, x, tmin, a_bar)?)
            } else {
                None
            };
            let max_trait = sol.best.max_trait();
            let p = ActionPoint {
                t,
                x,
                zeta: sol.zeta,
                lower_bound,
                phi_max: profile.eval_phi(max_trait)?,
                first_integral_spread: sol.best.first_integral_spread(),
                minima: sol.distinct_minima().len(),
            };
            csv.row(&[
                num(t),
                num(x),
                num(tmin),
                num(p.zeta),
                opt(p.lower_bound),
                opt(p.lower_bound.map(|lb| lb / p.zeta)),
                num(p.phi_max),
                num(max_trait),
                num(p.first_integral_spread),
                p.minima.to_string(),
            ]);
            summary.points.push(p);
        }
    }
    csv.write(&ctx.path("action.csv"))?;
    if has_bound {
        let worst = summary
            .points
            .iter()
            .filter_map(|p| p.lower_bound.map(|lb| lb / p.zeta))
            .fold(1.0, f64::max);
        summary.kappa = Some(worst);
    }

    summary.gamma = spectral::gamma_infinity(&spec, cfg.spectral.tol)?;
    if summary.gamma > 0.0 && classify_regime(&spec, summary.gamma) == Regime::Accelerating {
        summary.budget =
            action::search_admissible(&spec, cfg.action.budget_horizon, summary.gamma, cfg.action.rho_bar)?;
        let mut b = ctx.csv(&["key", "value"]);
        if let Some(p) = &summary.budget {
            let rows: [(&str, f64); 17] = [
                ("horizon", p.horizon),
                ("a_underline", p.a_underline),
                ("big_a", p.big_a),
                ("h", p.h),
                ("lambda1", p.lambda1),
                ("rho_bar", p.rho_bar),
                ("eta", p.eta),
                ("c1", p.c1),
                ("t1", p.t1),
                ("cost_up", p.step_costs[0]),
                ("cost_right", p.step_costs[1]),
                ("cost_down", p.step_costs[2]),
                ("box_radius", p.box_radius),
                ("box_height", p.box_height),
                ("gamma_box", p.gamma_box),
                ("growth_credit", p.growth_credit),
                ("net_exponent", p.net_exponent),
            ];
            for (k, v) in rows {
                b.row(&[k.to_string(), num(v)]);
            }
            b.row(&["step_cap".to_string(), num(summary.gamma * p.horizon / 10.0)]);
        }
        b.write(&ctx.path("budget.csv"))?;
    }
    if ctx.plots && !summary.points.is_empty() {
        let series: Vec<(String, Vec<(f64, f64)>)> = ACTION_TIMES
            .iter()
            .map(|&t| {
                let pts = summary
                    .points
                    .iter()
                    .filter(|p| p.t == t)
                    .map(|p| (p.x, p.zeta))
                    .collect();
                (format!("t = {t}"), pts)
            })
            .collect();
        plots::lines(
            &ctx.path("action.svg"),
            "minimal action ζ(t, x, θ̲)",
            ("x", "ζ"),
            &series,
            false,
        )?;
    }
    Ok(summary)
}
