//! Simulation and analysis tools for the cane-toads reaction–diffusion–mutation
//! equation with a mortality trade-off,
//!
//! ```text
//! n_t = θ n_xx + n_θθ + n (1 − m(θ) − ρ),    ρ(t, x) = ∫ n(t, x, θ) dθ,
//! ```
//!
//! posed on `x ∈ ℝ`, `θ > θ̲` with a Neumann condition at `θ̲`.

pub mod action;
pub mod config;
pub mod error;
pub mod fronts;
pub mod geometry;
pub mod model;
pub mod numerics;
pub mod pde;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{classify_regime, PhiProfile, Regime, RegimeLimit, TradeoffKind, TradeoffSpec};
