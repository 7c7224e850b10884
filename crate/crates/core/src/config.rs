//! Plain-text run configuration: TOML with one section per module.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::action::{ActionOptions, DEFAULT_NODES, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::fronts::{FitWindow, DEFAULT_THRESHOLD, TRANSIENT_FRACTION};
use crate::model::{TradeoffKind, TradeoffSpec};
use crate::pde::{DiffusionScheme, GridSpec, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubTradeoff {
    PowerLaw { c: f64, p: f64 },
    LogPower { c: f64, p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TradeoffConfig {
    PowerLaw {
        c: f64,
        p: f64,
        theta_min: f64,
    },
    LogPower {
        c: f64,
        p: f64,
        theta_min: f64,
    },
    LinearPlus {
        mu: f64,
        theta_min: f64,
        sub: Option<SubTradeoff>,
    },
    Zero {
        theta_min: f64,
    },
    /// Knots `[θ, m]`, the first one at `(θ̲, 0)`.
    Tabulated {
        theta_min: f64,
        knots: Vec<[f64; 2]>,
    },
}

impl TradeoffConfig {
    pub fn theta_min(&self) -> f64 {
        match self {
            TradeoffConfig::PowerLaw { theta_min, .. }
            | TradeoffConfig::LogPower { theta_min, .. }
            | TradeoffConfig::LinearPlus { theta_min, .. }
            | TradeoffConfig::Zero { theta_min }
            | TradeoffConfig::Tabulated { theta_min, .. } => *theta_min,
        }
    }

    pub fn build(&self) -> Result<TradeoffSpec> {
        match self {
            TradeoffConfig::PowerLaw { c, p, theta_min } => TradeoffSpec::power_law(*c, *p, *theta_min),
            TradeoffConfig::LogPower { c, p, theta_min } => TradeoffSpec::log_power(*c, *p, *theta_min),
            TradeoffConfig::LinearPlus { mu, theta_min, sub } => {
                let sub = sub.as_ref().map(|s| match *s {
                    SubTradeoff::PowerLaw { c, p } => TradeoffKind::PowerLaw { c, p },
                    SubTradeoff::LogPower { c, p } => TradeoffKind::LogPower { c, p },
                });
                TradeoffSpec::linear_plus(*mu, sub, *theta_min)
            }
            TradeoffConfig::Zero { theta_min } => TradeoffSpec::zero(*theta_min),
            TradeoffConfig::Tabulated { theta_min, knots } => {
                TradeoffSpec::tabulated(knots.iter().map(|k| (k[0], k[1])).collect(), *theta_min)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub theta_max: f64,
    pub nx: usize,
    pub ntheta: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    #[default]
    BackwardEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    /// `None` picks the stability bound, shrunk so that snapshots fall on
    /// whole steps.
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Time between recorded snapshots.
    pub snapshot_interval: f64,
    pub linearized: bool,
    pub c0: f64,
    pub scheme: SchemeConfig,
    /// Times of the phase-space heatmaps.
    pub plot_times: Vec<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            dt: None,
            t_final: 60.0,
            snapshot_interval: 0.5,
            linearized: false,
            c0: 1.0,
            scheme: SchemeConfig::default(),
            plot_times: vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSection {
    /// Truncation height above `θ̲`; `None` uses the trade-off's default.
    pub b: Option<f64>,
    pub n: usize,
    pub tol: f64,
}

impl Default for SpectralSection {
    fn default() -> Self {
        Self {
            b: None,
            n: 2048,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontsSection {
    pub threshold: f64,
    /// Fit window as fractions of `t_final`.
    pub window: [f64; 2],
    /// Extra levels reported for robustness.
    pub extra_thresholds: Vec<f64>,
}

impl Default for FrontsSection {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            window: [TRANSIENT_FRACTION, 1.0],
            extra_thresholds: vec![1e-1, 1e-3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActionSection {
    pub nodes: usize,
    pub restarts: usize,
    pub seed: u64,
    pub a_bar: f64,
    /// Horizon of the rectangular-path budget.
    pub budget_horizon: f64,
    /// Uniform bound on `ρ` used by the budget.
    pub rho_bar: f64,
}

impl Default for ActionSection {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            a_bar: 0.5,
            budget_horizon: 200.0,
            rho_bar: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: String,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            plots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub tradeoff: TradeoffConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub fronts: FrontsSection,
    #[serde(default)]
    pub action: ActionSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.tradeoff.build()?;
        cfg.grid_spec()?;
        if !(cfg.sim.t_final > 0.0 && cfg.sim.snapshot_interval > 0.0) {
            return Err(Error::config("t_final and snapshot_interval must be positive"));
        }
        let [lo, hi] = cfg.fronts.window;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::config(format!(
                "fit window fractions {lo}, {hi} are not in [0, 1]"
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// The configuration with defaults filled in, as TOML.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn tradeoff_spec(&self) -> Result<TradeoffSpec> {
        self.tradeoff.build()
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = &self.grid;
        GridSpec::new(g.x_min, g.x_max, self.tradeoff.theta_min(), g.theta_max, g.nx, g.ntheta)
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut cfg = SimConfig::new(self.grid_spec()?, self.tradeoff_spec()?, 0.0, self.sim.t_final);
        cfg.linearized = self.sim.linearized;
        cfg.c0 = self.sim.c0;
        cfg.front_threshold = self.fronts.threshold;
        cfg.scheme = match self.sim.scheme {
            SchemeConfig::BackwardEuler => DiffusionScheme::BackwardEuler,
            SchemeConfig::CrankNicolson => DiffusionScheme::CrankNicolson,
        };
        let interval = self.sim.snapshot_interval;
        let dt = self.sim.dt.unwrap_or_else(|| cfg.max_dt());
        if !(dt > 0.0) {
            return Err(Error::config(format!("dt must be positive, got {dt}")));
        }
        cfg.snapshot_every = (interval / dt - 1e-9).ceil().max(1.0) as usize;
        cfg.dt = if self.sim.dt.is_some() {
            dt
        } else {
            interval / cfg.snapshot_every as f64
        };
        Ok(cfg)
    }

    pub fn fit_window(&self) -> FitWindow {
        let t = self.sim.t_final;
        FitWindow::new(self.fronts.window[0] * t, self.fronts.window[1] * t)
    }

    pub fn action_options(&self) -> ActionOptions {
        ActionOptions {
            nodes: self.action.nodes,
            restarts: self.action.restarts,
            seed: self.action.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
[tradeoff]
kind = "power_law"
c = 1.0
p = 0.5
theta_min = 1.0
[grid]
x_min = -10.0
x_max = 50.0
theta_max = 21.0
nx = 121
ntheta = 81
"#;

    #[test]
    fn defaults_are_applied() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.sim, SimSection::default());
        assert_eq!(cfg.action.nodes, DEFAULT_NODES);
        let sim = cfg.sim_config().unwrap();
        assert!(sim.dt <= sim.max_dt());
        let per_snapshot = sim.dt * sim.snapshot_every as f64;
        assert!((per_snapshot - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hash_ignores_formatting_but_not_values() {
        let a = RunConfig::parse(MINIMAL).unwrap();
        let b = RunConfig::parse(&format!("# comment\n{MINIMAL}")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::parse(&MINIMAL.replace("p = 0.5", "p = 0.25")).unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(RunConfig::parse(&a.canonical()).unwrap(), a);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("name = 1"), Err(Error::Parse(_))));
        let unknown = MINIMAL.replace("nx = 121", "nx = 121\nny = 3");
        assert!(matches!(RunConfig::parse(&unknown), Err(Error::Parse(_))));
        let negative = MINIMAL.replace("c = 1.0", "c = -1.0");
        assert!(matches!(RunConfig::parse(&negative), Err(Error::Config(_))));
    }

    #[test]
    fn linear_plus_and_table() {
        let text = MINIMAL.replace(
            "kind = \"power_law\"\nc = 1.0\np = 0.5",
            "kind = \"linear_plus\"\nmu = 0.5\nsub = { kind = \"power_law\", c = 1.0, p = 0.5 }",
        );
        let spec = RunConfig::parse(&text).unwrap().tradeoff_spec().unwrap();
        assert!((spec.m(2.0) - (0.25 + (2f64.sqrt() - 1.0))).abs() < 1e-12);
        let text = MINIMAL.replace(
            "kind = \"power_law\"\nc = 1.0\np = 0.5",
            "kind = \"tabulated\"\nknots = [[1.0, 0.0], [2.0, 1.0], [4.0, 3.0]]",
        );
        let spec = RunConfig::parse(&text).unwrap().tradeoff_spec().unwrap();
        assert!((spec.m(2.0) - 1.0).abs() < 1e-12);
    }
}
