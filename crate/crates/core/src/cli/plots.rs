//! SVG figures.

use std::path::Path;

use plotters::prelude::*;

use canetoad::pde::Field2D;
use canetoad::{Error, Result};

const SIZE: (u32, u32) = (900, 600);
const MAX_CELLS: (usize, usize) = (240, 160);
/// Decades of `n` shown in heatmaps.
const DECADES: f64 = 4.0;

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(format!("plot: {e}")))
}

/// `log10 n` on `(x, θ)`, relative to the field's maximum.
pub fn heatmap(field: &Field2D, path: &Path, title: &str) -> Result<()> {
    let g = field.grid;
    let sup = field.sup().max(f64::MIN_POSITIVE);
    let sx = g.nx.div_ceil(MAX_CELLS.0);
    let st = g.ntheta.div_ceil(MAX_CELLS.1);
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(g.x_min..g.x_max, g.theta_min..g.theta_max)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .disable_mesh()
        .x_desc("x")
        .y_desc("θ")
        .draw()
        .map_err(plot_err)?;
    let (hx, ht) = (g.dx() * sx as f64, g.dtheta() * st as f64);
    let cells = (0..g.nx)
        .step_by(sx)
        .flat_map(|i| (0..g.ntheta).step_by(st).map(move |j| (i, j)));
    chart
        .draw_series(cells.filter_map(|(i, j)| {
            let v = field.at(i, j) / sup;
            if v <= 10f64.powf(-DECADES) {
                return None;
            }
            let color = ViridisRGB::get_color_normalized(v.log10(), -DECADES, 0.0);
            let (x, t) = (g.x(i), g.theta(j));
            Some(Rectangle::new([(x, t), (x + hx, t + ht)], color.filled()))
        }))
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

/// Curves on common axes; `log_y` plots `log10 y`.
pub fn lines(
    path: &Path,
    title: &str,
    labels: (&str, &str),
    series: &[(String, Vec<(f64, f64)>)],
    log_y: bool,
) -> Result<()> {
    let map = |y: f64| if log_y { y.max(1e-300).log10() } else { y };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().map(|&(x, y)| (x, map(y))))
        .collect();
    if pts.is_empty() {
        return Ok(());
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, (y0 - pad)..(y1 + pad))
        .map_err(plot_err)?;
    let ylabel = if log_y {
        format!("log10 {}", labels.1)
    } else {
        labels.1.to_string()
    };
    chart
        .configure_mesh()
        .x_desc(labels.0)
        .y_desc(ylabel)
        .draw()
        .map_err(plot_err)?;
    for (k, (name, s)) in series.iter().enumerate() {
        let color = Palette99::pick(k).to_rgba();
        chart
            .draw_series(LineSeries::new(
                s.iter().map(|&(x, y)| (x, map(y))),
                color.stroke_width(2),
            ))
            .map_err(plot_err)?
            .label(name.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    if series.len() > 1 {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
    }
    root.present().map_err(plot_err)?;
    Ok(())
}
