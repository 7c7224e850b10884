//! Pass/fail table for one configuration.

use std::fmt::Write as _;

use canetoad::{Regime, Result, TradeoffKind};

use super::{action_grid, fit_fronts, simulate, spectrum, Context, FitKind, Status};

/// Tolerance on the ratio of measured to spectral speed.
const SPEED_TOL: f64 = 0.1;
const SPACE_EXPONENT_TOL: f64 = 0.15;
const TRAIT_EXPONENT_TOL: f64 = 0.1;
const EXTINCTION_TIME: f64 = 80.0;
const EXTINCTION_LEVEL: f64 = 1e-3;
const MONOTONE_AFTER: f64 = 5.0;
const BOUND_FACTOR: f64 = 3.0;
const KAPPA_MAX: f64 = 10.0;
const PHI_SLACK: f64 = 1e-6;
const SPREAD_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "info",
        }
    }
}

struct Row {
    criterion: String,
    measured: String,
    target: String,
    verdict: Verdict,
}

fn row(criterion: &str, measured: String, target: &str, verdict: Verdict) -> Row {
    Row {
        criterion: criterion.into(),
        measured,
        target: target.into(),
        verdict,
    }
}

pub(super) fn run(ctx: &Context) -> Result<(Status, String)> {
    let cfg = &ctx.cfg;
    let spec = cfg.tradeoff_spec()?;
    let spectrum = spectrum(ctx)?;
    let sim = simulate(ctx)?;
    let fits = fit_fronts(ctx, &sim.output)?;
    let action = action_grid(ctx)?;
    let out = &sim.output;
    let thr = cfg.fronts.threshold;
    let mut rows = Vec::new();

    rows.push(row(
        "regime",
        format!("{} (gamma_inf = {:.5})", spectrum.regime, spectrum.gamma),
        "",
        Verdict::Info,
    ));
    rows.push(match out.invalid_after {
        None => row(
            "run stays inside the domain",
            "yes".into(),
            "no boundary contact",
            Verdict::Pass,
        ),
        Some(t) => row(
            "run stays inside the domain",
            format!("front reached x_max at t = {t}"),
            "no boundary contact",
            Verdict::Fail,
        ),
    });

    if let Some(curve) = &spectrum.curve {
        let measured = fits.get(thr, FitKind::Speed);
        rows.push(match measured {
            Some(f) => {
                let ratio = f.value / curve.c_star;
                row(
                    "front speed / c*",
                    format!("{:.4} / {:.4} = {:.4}", f.value, curve.c_star, ratio),
                    "|ratio - 1| <= 0.1",
                    Verdict::from((ratio - 1.0).abs() <= SPEED_TOL),
                )
            }
            None => row("front speed / c*", "no fit".into(), "|ratio - 1| <= 0.1", Verdict::Fail),
        });
    }

    let p = match spec.kind() {
        TradeoffKind::PowerLaw { p, .. } if *p < 1.0 => Some(*p),
        TradeoffKind::Zero => Some(0.0),
        _ => None,
    };
    if spectrum.regime == Regime::Accelerating {
        let space = p.map(|p| 3.0 / (2.0 + p));
        let trait_target = p.map(|p| 2.0 / (2.0 + p));
        let target = space.map_or(String::new(), |v| format!("{v:.4} ± {SPACE_EXPONENT_TOL}"));
        rows.push(match (fits.get(thr, FitKind::Exponent), space) {
            (Some(f), Some(v)) => row(
                "space exponent",
                format!("{:.4} ± {:.1e}", f.value, f.stderr),
                &target,
                Verdict::from((f.value - v).abs() <= SPACE_EXPONENT_TOL),
            ),
            (Some(f), None) => row("space exponent", format!("{:.4}", f.value), "", Verdict::Info),
            (None, _) => row("space exponent", "no fit".into(), &target, Verdict::Fail),
        });
        let target = trait_target.map_or(String::new(), |v| format!("{v:.4} ± {TRAIT_EXPONENT_TOL}"));
        let checked = cfg.sim.linearized && trait_target.is_some();
        rows.push(match (fits.get(thr, FitKind::TraitExponent), trait_target) {
            (Some(f), Some(v)) if checked => row(
                "trait exponent",
                format!("{:.4} ± {:.1e}", f.value, f.stderr),
                &target,
                Verdict::from((f.value - v).abs() <= TRAIT_EXPONENT_TOL),
            ),
            (Some(f), _) => row(
                "trait exponent",
                format!("{:.4} ± {:.1e}", f.value, f.stderr),
                if checked { &target } else { "checked on linearized runs" },
                Verdict::Info,
            ),
            (None, _) => row(
                "trait exponent",
                "no fit".into(),
                &target,
                if checked { Verdict::Fail } else { Verdict::Info },
            ),
        });
        let spread: Vec<String> = cfg
            .fronts
            .extra_thresholds
            .iter()
            .map(|&t| match fits.get(t, FitKind::Exponent) {
                Some(f) => format!("{t}: {:.4}", f.value),
                None => format!("{t}: no fit"),
            })
            .collect();
        rows.push(row(
            "space exponent at other levels",
            spread.join(", "),
            "",
            Verdict::Info,
        ));
    }

    if spectrum.regime == Regime::Extinction {
        let mon = &out.monitors;
        let at = mon.iter().find(|m| m.time >= EXTINCTION_TIME - 1e-9);
        rows.push(match at {
            Some(m) => row(
                "sup n at t = 80",
                format!("{:.3e}", m.sup_n),
                "< 1e-3",
                Verdict::from(m.sup_n < EXTINCTION_LEVEL),
            ),
            None => row("sup n at t = 80", "run ends earlier".into(), "< 1e-3", Verdict::Fail),
        });
        let tail: Vec<f64> = mon
            .iter()
            .filter(|m| m.time >= MONOTONE_AFTER)
            .map(|m| m.sup_n)
            .collect();
        let increases = tail.windows(2).filter(|w| w[1] > w[0]).count();
        rows.push(row(
            "sup n decreasing after t = 5",
            format!("{increases} increases"),
            "0 increases",
            Verdict::from(increases == 0 && !tail.is_empty()),
        ));
    }

    if !cfg.sim.linearized {
        let mon = &out.monitors;
        let reference = mon
            .iter()
            .min_by(|a, b| (a.time - 5.0).abs().partial_cmp(&(b.time - 5.0).abs()).unwrap())
            .filter(|m| (m.time - 5.0).abs() <= 0.5);
        let peak = mon
            .iter()
            .filter(|m| m.time >= 1.0)
            .map(|m| m.sup_rho)
            .fold(0.0, f64::max);
        rows.push(match reference {
            Some(r) => row(
                "sup rho on [1, T] / sup rho(5)",
                format!("{:.4}", peak / r.sup_rho),
                "<= 3",
                Verdict::from(peak <= BOUND_FACTOR * r.sup_rho),
            ),
            None => row(
                "sup rho on [1, T] / sup rho(5)",
                "run ends before t = 5".into(),
                "<= 3",
                Verdict::Info,
            ),
        });
    }

    if let Some(kappa) = action.kappa {
        rows.push(row(
            "action sandwich kappa",
            format!("{kappa:.4}"),
            "<= 10",
            Verdict::from(kappa <= KAPPA_MAX),
        ));
    }
    if !action.points.is_empty() {
        let margin = action.min_phi_margin();
        rows.push(row(
            "min (zeta - Phi(max trait))",
            format!("{margin:.4}"),
            ">= -1e-6",
            Verdict::from(margin >= -PHI_SLACK),
        ));
        let spread = action.max_spread();
        rows.push(row(
            "first integral spread",
            format!("{spread:.2e}"),
            "<= 1e-5",
            Verdict::from(spread <= SPREAD_TOL),
        ));
        let multi = action.points.iter().filter(|p| p.minima > 1).count();
        rows.push(row(
            "grid points with several local minima",
            multi.to_string(),
            "",
            Verdict::Info,
        ));
    }
    if action.gamma > 0.0 && spectrum.regime == Regime::Accelerating && !action.points.is_empty() {
        rows.push(match &action.budget {
            Some(b) => row(
                "rectangular path budget closes",
                format!(
                    "net exponent {:.3} (a = {}, A = {})",
                    b.net_exponent, b.a_underline, b.big_a
                ),
                "steps <= gamma T / 10, net > 0",
                Verdict::Pass,
            ),
            None => row(
                "rectangular path budget closes",
                "no admissible parameters".into(),
                "",
                Verdict::Fail,
            ),
        });
    }

    let failed = rows.iter().any(|r| r.verdict == Verdict::Fail);
    let mut csv = ctx.csv(&["criterion", "measured", "target", "verdict"]);
    for r in &rows {
        csv.row(&[r.criterion.as_str(), &r.measured, &r.target, r.verdict.label()]);
    }
    csv.write(&ctx.path("report.csv"))?;

    let w0 = rows.iter().map(|r| r.criterion.chars().count()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.measured.chars().count()).max().unwrap_or(0);
    let mut text = format!("== {} (config sha256 {})\n", cfg.name, &ctx.meta.hash[..12]);
    text.push_str(&sim.describe());
    for r in &rows {
        let pad0 = w0 - r.criterion.chars().count();
        let pad1 = w1 - r.measured.chars().count();
        let line = format!(
            "{}  {}{}  {}{}  {}",
            r.verdict.label(),
            r.criterion,
            " ".repeat(pad0),
            r.measured,
            " ".repeat(pad1),
            r.target
        );
        writeln!(text, "{}", line.trim_end()).unwrap();
    }
    writeln!(text, "overall: {}", if failed { "FAIL" } else { "PASS" }).unwrap();
    std::fs::write(ctx.path("report.txt"), &text)?;
    Ok((if failed { Status::AcceptanceFailed } else { Status::Ok }, text))
}
