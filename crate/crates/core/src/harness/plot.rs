//! Self-contained SVG figures.
//!
//! Every series is drawn as a `<polyline class="series">` over a
//! `<polygon class="band">` spanning mean ± one standard error. Axis ticks are
//! `<g class="xtick" data-value="…">` / `<g class="ytick" …>` groups.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::aggregate::{log_length_curve, summarize};
use super::runner::ExperimentResult;
use crate::control::{Algorithm, UpdateMode};
use crate::error::{Error, Result};
use crate::fmt::format_g17;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Final-quartile reward against `β₀`, one series per learner.
    Sensitivity,
    /// `ln(episode length)` against episode, one series per result.
    LearningCurve,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sensitivity" => Ok(PlotKind::Sensitivity),
            "learning_curve" => Ok(PlotKind::LearningCurve),
            _ => Err(Error::config(format!(
                "unsupported plot kind {s:?}; expected sensitivity or learning_curve"
            ))),
        }
    }
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::Sensitivity => "sensitivity",
            PlotKind::LearningCurve => "learning_curve",
        }
    }
}

struct Series {
    label: String,
    color: &'static str,
    dash: Option<&'static str>,
    points: Vec<(f64, f64, f64)>,
}

fn color(algorithm: Algorithm, mode: UpdateMode) -> &'static str {
    match (algorithm, mode) {
        (Algorithm::QLearning, UpdateMode::Standard) => "#1f77b4",
        (Algorithm::QLearning, UpdateMode::Implicit) => "#ff7f0e",
        (Algorithm::Sarsa, UpdateMode::Standard) => "#2ca02c",
        (Algorithm::Sarsa, UpdateMode::Implicit) => "#d62728",
    }
}

fn learner_label(algorithm: Algorithm, mode: UpdateMode) -> String {
    let a = match algorithm {
        Algorithm::QLearning => "Q-learning",
        Algorithm::Sarsa => "SARSA",
    };
    match mode {
        UpdateMode::Standard => a.to_string(),
        UpdateMode::Implicit => format!("implicit {a}"),
    }
}

fn sensitivity_series(results: &[ExperimentResult]) -> Vec<Series> {
    let mut out: Vec<(Algorithm, UpdateMode, Series)> = Vec::new();
    for r in results {
        let row = summarize(r);
        let idx = match out.iter().position(|(a, m, _)| *a == r.algorithm && *m == r.mode) {
            Some(i) => i,
            None => {
                out.push((
                    r.algorithm,
                    r.mode,
                    Series {
                        label: learner_label(r.algorithm, r.mode),
                        color: color(r.algorithm, r.mode),
                        dash: None,
                        points: Vec::new(),
                    },
                ));
                out.len() - 1
            }
        };
        out[idx].2.points.push((r.beta0, row.mean, row.stderr));
    }
    out.into_iter()
        .map(|(_, _, mut s)| {
            s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
            s
        })
        .collect()
}

fn learning_series(results: &[ExperimentResult]) -> Vec<Series> {
    const DASHES: [Option<&str>; 4] = [None, Some("6 3"), Some("2 2"), Some("8 3 2 3")];
    let mut betas: Vec<f64> = results.iter().map(|r| r.beta0).collect();
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    results
        .iter()
        .map(|r| {
            let b = betas.iter().position(|x| *x == r.beta0).unwrap_or(0);
            Series {
                label: format!("{}, β₀ = {}", learner_label(r.algorithm, r.mode), tick_label(r.beta0)),
                color: color(r.algorithm, r.mode),
                dash: DASHES[b % DASHES.len()],
                points: log_length_curve(r)
                    .into_iter()
                    .enumerate()
                    .map(|(e, (m, se))| ((e + 1) as f64, m, se))
                    .collect(),
            }
        })
        .collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).clamp(0, 6) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the figure as SVG markup.
pub fn render_plot(results: &[ExperimentResult], kind: PlotKind) -> Result<String> {
    if results.is_empty() || results.iter().all(|r| r.runs.is_empty()) {
        return Err(Error::domain("nothing to plot"));
    }
    let series = match kind {
        PlotKind::Sensitivity => sensitivity_series(results),
        PlotKind::LearningCurve => learning_series(results),
    };
    let finite = |v: &f64| v.is_finite();
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(finite).collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2]))
        .filter(finite)
        .collect();
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::domain("no finite values to plot"));
    }
    let (mut x0, mut x1) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (mut y0, mut y1) = (ys.iter().copied().fold(f64::INFINITY, f64::min), ys.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let env = results[0].env;
    let (title, xlabel, ylabel) = match kind {
        PlotKind::Sensitivity => (
            format!("{env}: step-size sensitivity"),
            "step size β₀",
            "mean cumulative reward, final 25% of episodes",
        ),
        PlotKind::LearningCurve => (format!("{env}: learning curves"), "episode", "ln(episode length)"),
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(&title));
    let _ = writeln!(
        svg,
        r#"<rect class="frame" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    let xticks: Vec<f64> = match kind {
        PlotKind::Sensitivity => {
            let mut t = xs.clone();
            t.sort_by(f64::total_cmp);
            t.dedup();
            t
        }
        PlotKind::LearningCurve => {
            let n = 6usize;
            let mut t: Vec<f64> = (0..n).map(|i| (x0 + (x1 - x0) * i as f64 / (n - 1) as f64).round()).collect();
            t.dedup();
            t
        }
    };
    for t in &xticks {
        let x = sx(*t);
        let _ = writeln!(
            svg,
            r#"<g class="xtick" data-value="{}"><line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text></g>"#,
            format_g17(*t),
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            tick_label(*t)
        );
    }
    for i in 0..5 {
        let v = y0 + (y1 - y0) * i as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r#"<g class="ytick" data-value="{}"><line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text></g>"#,
            format_g17(v),
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 18.0, escape(xlabel));
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(ylabel)
    );

    for (i, s) in series.iter().enumerate() {
        let pts: Vec<&(f64, f64, f64)> = s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        let upper = pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1 + p.2)));
        let lower = pts.iter().rev().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1 - p.2)));
        let band: Vec<String> = upper.chain(lower).collect();
        let line: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let dash = s.dash.map_or(String::new(), |d| format!(r#" stroke-dasharray="{d}""#));
        let _ = writeln!(
            svg,
            r#"<polygon class="band" points="{}" fill="{}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" "),
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<polyline class="series" points="{}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#,
            line.join(" "),
            s.color
        );
        let ly = TOP + 12.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text></g>"#,
            lx + 22.0,
            s.color,
            lx + 28.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(results: &[ExperimentResult], kind: PlotKind, path: &Path) -> Result<()> {
    let svg = render_plot(results, kind)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
