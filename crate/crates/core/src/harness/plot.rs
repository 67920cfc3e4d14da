//! Self-contained SVG line charts of sweep results: one curve per series on
//! a log-x sample-size axis with a shaded ±1 standard deviation band.

use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::harness::{mean_std, paired_diffs_at_best, trial_values, MetricField, SweepResult};

/// What to plot against the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// robust test MSE − standard test MSE, each at its own best λ.
    Tradeoff,
    TestMse,
    GenGap,
    Norm,
    RobustTrainMse,
    RobustTestMse,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Tradeoff => "tradeoff",
            Quantity::TestMse => "test_mse",
            Quantity::GenGap => "gen_gap",
            Quantity::Norm => "norm",
            Quantity::RobustTrainMse => "robust_train_mse",
            Quantity::RobustTestMse => "robust_test_mse",
        }
    }

    fn field(&self) -> Option<MetricField> {
        match self {
            Quantity::Tradeoff => None,
            Quantity::TestMse => Some(MetricField::TestMse),
            Quantity::GenGap => Some(MetricField::GenGap),
            Quantity::Norm => Some(MetricField::Norm),
            Quantity::RobustTrainMse => Some(MetricField::RobustTrainMse),
            Quantity::RobustTestMse => Some(MetricField::RobustTestMse),
        }
    }

    fn title(&self) -> &'static str {
        match self {
            Quantity::Tradeoff => "Test MSE difference (robust - standard) at best lambda",
            Quantity::TestMse => "Test MSE at best lambda",
            Quantity::GenGap => "Generalization gap at best lambda",
            Quantity::Norm => "Squared norm at best lambda",
            Quantity::RobustTrainMse => "Robust train MSE at best lambda",
            Quantity::RobustTestMse => "Robust test MSE at best lambda",
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tradeoff" => Ok(Quantity::Tradeoff),
            "test_mse" => Ok(Quantity::TestMse),
            "gen_gap" => Ok(Quantity::GenGap),
            "norm" => Ok(Quantity::Norm),
            "robust_train_mse" => Ok(Quantity::RobustTrainMse),
            "robust_test_mse" => Ok(Quantity::RobustTestMse),
            other => Err(Error::Config(format!(
                "unknown quantity '{other}' (expected one of tradeoff, test_mse, gen_gap, norm, robust_train_mse, robust_test_mse)"
            ))),
        }
    }
}

struct Series {
    name: String,
    color: &'static str,
    /// (n, mean, std) per sample size, ascending n.
    points: Vec<(usize, f64, f64)>,
}

fn estimator_color(kind: EstimatorKind) -> &'static str {
    match kind {
        EstimatorKind::Standard => "#1f77b4",
        EstimatorKind::Robust => "#d62728",
        EstimatorKind::Augmented => "#2ca02c",
        EstimatorKind::Rst => "#9467bd",
    }
}

fn sample_sizes(result: &SweepResult) -> Vec<usize> {
    let mut ns: Vec<usize> = Vec::new();
    for r in &result.records {
        if !ns.contains(&r.n) {
            ns.push(r.n);
        }
    }
    ns.sort_unstable();
    ns
}

fn build_series(result: &SweepResult, quantity: Quantity) -> Result<Vec<Series>> {
    let ns = sample_sizes(result);
    if ns.is_empty() {
        return Err(Error::Config("no records to plot".to_string()));
    }
    match quantity.field() {
        None => {
            // Tradeoff: paired per-trial robust − standard differences.
            let mut points = Vec::new();
            for &n in &ns {
                let diffs = paired_diffs_at_best(
                    result,
                    EstimatorKind::Robust,
                    EstimatorKind::Standard,
                    n,
                    MetricField::TestMse,
                )?;
                let (mean, std) = mean_std(&diffs);
                points.push((n, mean, std));
            }
            Ok(vec![Series {
                name: "robust - standard".to_string(),
                color: estimator_color(EstimatorKind::Robust),
                points,
            }])
        }
        Some(field) => {
            let mut estimators: Vec<EstimatorKind> = Vec::new();
            for r in &result.records {
                if !estimators.contains(&r.estimator_kind) {
                    estimators.push(r.estimator_kind);
                }
            }
            let mut series = Vec::new();
            for est in estimators {
                let mut points = Vec::new();
                for &n in &ns {
                    let Some(lambda) = result.best_lambda_for(est, n) else {
                        continue;
                    };
                    let values: Vec<f64> = trial_values(&result.records, est, n, lambda, field)
                        .into_iter()
                        .map(|(_, v)| v)
                        .collect();
                    if values.is_empty() {
                        continue;
                    }
                    let (mean, std) = mean_std(&values);
                    points.push((n, mean, std));
                }
                if !points.is_empty() {
                    series.push(Series {
                        name: est.to_string(),
                        color: estimator_color(est),
                        points,
                    });
                }
            }
            if series.is_empty() {
                return Err(Error::Config("no series to plot".to_string()));
            }
            Ok(series)
        }
    }
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 42.0;
const MARGIN_BOTTOM: f64 = 56.0;

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.abs().log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e4 || a < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn render_svg(title: &str, series: &[Series]) -> String {
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    for s in series {
        for &(n, mean, std) in &s.points {
            let x = (n as f64).log10();
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(mean - std);
            y_max = y_max.max(mean + std);
        }
    }
    // Degenerate ranges still render.
    if x_max - x_min < 1e-9 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    y_min = y_min.min(0.0); // anchor zero so signs are readable
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let pad = 0.06 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |n: usize| MARGIN_LEFT + ((n as f64).log10() - x_min) / (x_max - x_min) * plot_w;
    let sy = |v: f64| MARGIN_TOP + (y_max - v) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        r#"<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    ));
    svg.push('\n');
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        title
    ));
    svg.push('\n');

    // axes
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    svg.push_str(&format!(
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>"#
    ));
    svg.push_str(&format!(
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>"#
    ));
    svg.push('\n');

    // x ticks at the sample sizes present
    let mut ns: Vec<usize> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(n, _, _)| n))
        .collect();
    ns.sort_unstable();
    ns.dedup();
    for &n in &ns {
        let x = sx(n);
        svg.push_str(&format!(
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}" stroke="black" stroke-width="1"/>"#,
            y0 + 5.0
        ));
        svg.push_str(&format!(
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{n}</text>"#,
            y0 + 20.0
        ));
    }
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">training samples n (log scale)</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    ));
    svg.push('\n');

    // y ticks
    let step = nice_step((y_max - y_min) / 5.0);
    let mut tick = (y_min / step).ceil() * step;
    while tick <= y_max {
        let y = sy(tick);
        svg.push_str(&format!(
            r#"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="black" stroke-width="1"/>"#,
            x0 - 5.0
        ));
        svg.push_str(&format!(
            r##"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#dddddd" stroke-width="0.5"/>"##
        ));
        svg.push_str(&format!(
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 9.0,
            y + 4.0,
            format_tick(tick)
        ));
        tick += step;
    }
    svg.push('\n');

    // zero reference line
    if y_min < 0.0 && y_max > 0.0 {
        let y = sy(0.0);
        svg.push_str(&format!(
            r##"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>"##
        ));
        svg.push('\n');
    }

    // shaded ±1 std bands, then lines on top
    for s in series {
        let mut band = String::from("M");
        for &(n, mean, std) in &s.points {
            band.push_str(&format!(" {} {}", sx(n), sy(mean + std)));
        }
        for &(n, mean, std) in s.points.iter().rev() {
            band.push_str(&format!(" L {} {}", sx(n), sy(mean - std)));
        }
        band.push_str(" Z");
        svg.push_str(&format!(
            r#"<path d="{band}" fill="{}" fill-opacity="0.15" stroke="none"/>"#,
            s.color
        ));
        svg.push('\n');
    }
    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(n, mean, _)| format!("{},{}", sx(n), sy(mean)))
            .collect();
        svg.push_str(&format!(
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            pts.join(" "),
            s.color
        ));
        svg.push('\n');
        for &(n, mean, _) in &s.points {
            svg.push_str(&format!(
                r#"<circle cx="{}" cy="{}" r="2.5" fill="{}"/>"#,
                sx(n),
                sy(mean),
                s.color
            ));
        }
        svg.push('\n');
    }

    // legend
    for (k, s) in series.iter().enumerate() {
        let ly = MARGIN_TOP + 14.0 + 18.0 * k as f64;
        svg.push_str(&format!(
            r#"<rect x="{}" y="{}" width="14" height="6" fill="{}"/>"#,
            x0 + 10.0,
            ly - 5.0,
            s.color
        ));
        svg.push_str(&format!(
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            x0 + 30.0,
            ly + 2.0,
            s.name
        ));
        svg.push('\n');
    }

    svg.push_str("</svg>\n");
    svg
}

/// Render the selected quantity to an SVG file.
pub fn emit_plot(result: &SweepResult, quantity: Quantity, path: &Path) -> Result<()> {
    let svg = render_plot_svg(result, quantity)?;
    std::fs::write(path, svg).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// The SVG document as a string (used by [`emit_plot`] and by tests that
/// inspect the output).
pub fn render_plot_svg(result: &SweepResult, quantity: Quantity) -> Result<String> {
    let series = build_series(result, quantity)?;
    Ok(render_svg(quantity.title(), &series))
}
