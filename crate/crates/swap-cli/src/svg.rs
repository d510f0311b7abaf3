//! Minimal SVG renderings of the sweep results: a log-log hardness/cost
//! scatter with the bound curves, and the two `(s, j)` heatmaps. Display
//! only; no interactivity, no plotting dependency.

use std::fmt::Write;

use swap_core::bounds::corollary_boundary_j;
use swap_core::zone::{ZoneCell, ZoneClass};

use crate::experiment::{HardnessRow, POLICIES};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn policy_color(policy: &str) -> &'static str {
    match policy {
        "swap" => "#2c7fb8",
        "strong" => "#d95f02",
        _ => "#7570b3",
    }
}

struct LogFrame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl LogFrame {
    fn from_points(points: impl Iterator<Item = (f64, f64)>) -> Option<Self> {
        let mut x0 = f64::INFINITY;
        let mut x1 = f64::NEG_INFINITY;
        let mut y0 = f64::INFINITY;
        let mut y1 = f64::NEG_INFINITY;
        for (x, y) in points {
            if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
                x0 = x0.min(x.log10());
                x1 = x1.max(x.log10());
                y0 = y0.min(y.log10());
                y1 = y1.max(y.log10());
            }
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return None;
        }
        // Pad a little so extreme points do not sit on the frame.
        let pad = |lo: &mut f64, hi: &mut f64| {
            if *hi - *lo < 1e-9 {
                *lo -= 0.5;
                *hi += 0.5;
            } else {
                let p = (*hi - *lo) * 0.05;
                *lo -= p;
                *hi += p;
            }
        };
        pad(&mut x0, &mut x1);
        pad(&mut y0, &mut y1);
        Some(Self { x0, x1, y0, y1 })
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x.log10() - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y.log10() - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn decades(lo: f64, hi: f64) -> Vec<i32> {
        (lo.ceil() as i32..=hi.floor() as i32).collect()
    }
}

fn svg_open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{}" y="24" font-size="15" text-anchor="middle">{title}</text>"##,
        WIDTH / 2.0
    );
}

fn axes(out: &mut String, frame: &LogFrame, x_label: &str, y_label: &str) {
    let x_axis_y = HEIGHT - MARGIN_BOTTOM;
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN_LEFT}" y1="{x_axis_y}" x2="{}" y2="{x_axis_y}" stroke="black"/>
<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{x_axis_y}" stroke="black"/>"##,
        WIDTH - MARGIN_RIGHT
    );
    for d in LogFrame::decades(frame.x0, frame.x1) {
        let x = frame.px(10f64.powi(d));
        let _ = writeln!(
            out,
            r##"<line x1="{x}" y1="{x_axis_y}" x2="{x}" y2="{}" stroke="black"/>
<line x1="{x}" y1="{MARGIN_TOP}" x2="{x}" y2="{x_axis_y}" stroke="#eeeeee"/>
<text x="{x}" y="{}" font-size="11" text-anchor="middle">1e{d}</text>"##,
            x_axis_y + 6.0,
            x_axis_y + 20.0
        );
    }
    for d in LogFrame::decades(frame.y0, frame.y1) {
        let y = frame.py(10f64.powi(d));
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{y}" x2="{MARGIN_LEFT}" y2="{y}" stroke="black"/>
<line x1="{MARGIN_LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="#eeeeee"/>
<text x="{}" y="{}" font-size="11" text-anchor="end">1e{d}</text>"##,
            MARGIN_LEFT - 6.0,
            WIDTH - MARGIN_RIGHT,
            MARGIN_LEFT - 10.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{}" y="{}" font-size="13" text-anchor="middle">{x_label}</text>
<text x="18" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">{y_label}</text>"##,
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 18.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

/// Log-log scatter of per-trial empirical cost against instance hardness,
/// with the per-policy theoretical bound curves drawn above the cloud.
pub fn hardness_scatter(rows: &[HardnessRow]) -> String {
    let mut out = String::new();
    svg_open(&mut out, "Empirical cost vs hardness (log-log), with theoretical bounds");
    let all_points = rows.iter().flat_map(|r| {
        [
            Some((r.hardness, r.cost)),
            r.bound.map(|b| (r.hardness, b)),
        ]
        .into_iter()
        .flatten()
    });
    let Some(frame) = LogFrame::from_points(all_points) else {
        out.push_str("<text x=\"40\" y=\"60\" font-size=\"12\">no finite positive data</text></svg>");
        return out;
    };
    axes(&mut out, &frame, "hardness H", "total cost");
    for policy in POLICIES {
        let color = policy_color(policy);
        // Empirical cloud.
        for r in rows.iter().filter(|r| r.policy == policy) {
            if r.hardness > 0.0 && r.hardness.is_finite() && r.cost > 0.0 {
                let _ = writeln!(
                    out,
                    r##"<circle cx="{:.2}" cy="{:.2}" r="2.4" fill="{color}" fill-opacity="0.45"/>"##,
                    frame.px(r.hardness),
                    frame.py(r.cost)
                );
            }
        }
        // Bound curve, sorted by hardness.
        let mut curve: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.policy == policy)
            .filter_map(|r| r.bound.map(|b| (r.hardness, b)))
            .filter(|(h, b)| *h > 0.0 && h.is_finite() && *b > 0.0 && b.is_finite())
            .collect();
        curve.sort_by(|a, b| a.0.total_cmp(&b.0));
        curve.dedup_by(|a, b| a.0 == b.0);
        if curve.len() >= 2 {
            let path: Vec<String> = curve
                .iter()
                .map(|(h, b)| format!("{:.2},{:.2}", frame.px(*h), frame.py(*b)))
                .collect();
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 3"/>"##,
                path.join(" ")
            );
        }
    }
    // Legend.
    let lx = WIDTH - MARGIN_RIGHT + 14.0;
    for (i, policy) in POLICIES.iter().enumerate() {
        let y = MARGIN_TOP + 20.0 * i as f64 + 10.0;
        let _ = writeln!(
            out,
            r##"<circle cx="{lx}" cy="{y}" r="4" fill="{}"/>
<text x="{}" y="{}" font-size="12">{policy}</text>"##,
            policy_color(policy),
            lx + 10.0,
            y + 4.0
        );
    }
    let y = MARGIN_TOP + 20.0 * POLICIES.len() as f64 + 10.0;
    let _ = writeln!(
        out,
        r##"<line x1="{}" y1="{y}" x2="{lx}" y2="{y}" stroke="#555555" stroke-dasharray="6 3"/>
<text x="{}" y="{}" font-size="12">bound</text>
</svg>"##,
        lx - 6.0,
        lx + 10.0,
        y + 4.0
    );
    out
}

struct GridLayout {
    s_values: Vec<f64>,
    j_values: Vec<f64>,
    cell_w: f64,
    cell_h: f64,
}

impl GridLayout {
    fn new(cells: &[ZoneCell]) -> Self {
        let mut s_values: Vec<f64> = cells.iter().map(|c| c.s).collect();
        s_values.sort_by(f64::total_cmp);
        s_values.dedup();
        let mut j_values: Vec<f64> = cells.iter().map(|c| c.j).collect();
        j_values.sort_by(f64::total_cmp);
        j_values.dedup();
        let cell_w = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / s_values.len() as f64;
        let cell_h = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / j_values.len() as f64;
        Self {
            s_values,
            j_values,
            cell_w,
            cell_h,
        }
    }

    fn x(&self, s: f64) -> f64 {
        let i = self.s_values.iter().position(|&v| v == s).unwrap_or(0);
        MARGIN_LEFT + i as f64 * self.cell_w
    }

    /// j increases upward.
    fn y(&self, j: f64) -> f64 {
        let i = self.j_values.iter().position(|&v| v == j).unwrap_or(0);
        HEIGHT - MARGIN_BOTTOM - (i as f64 + 1.0) * self.cell_h
    }

    fn axis_labels(&self, out: &mut String) {
        for (i, s) in self.s_values.iter().enumerate() {
            let _ = writeln!(
                out,
                r##"<text x="{}" y="{}" font-size="11" text-anchor="middle">{s}</text>"##,
                MARGIN_LEFT + (i as f64 + 0.5) * self.cell_w,
                HEIGHT - MARGIN_BOTTOM + 16.0
            );
        }
        for (i, j) in self.j_values.iter().enumerate() {
            let _ = writeln!(
                out,
                r##"<text x="{}" y="{}" font-size="11" text-anchor="end">{j}</text>"##,
                MARGIN_LEFT - 8.0,
                HEIGHT - MARGIN_BOTTOM - (i as f64 + 0.5) * self.cell_h + 4.0
            );
        }
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="13" text-anchor="middle">information gain s</text>
<text x="18" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">pull cost j</text>"##,
            (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            HEIGHT - 18.0,
            HEIGHT / 2.0,
            HEIGHT / 2.0
        );
    }
}

fn zone_color(class: ZoneClass) -> &'static str {
    match class {
        ZoneClass::SwapBest => "#2e7d32",
        ZoneClass::BeatsOne => "#7f1d1d",
        ZoneClass::Worst => "#bdbdbd",
        ZoneClass::Inconclusive => "#f5f5f5",
    }
}

/// Heatmap of where the mixed policy beat both, one, or neither
/// single-strength specialization.
pub fn zone_heatmap(cells: &[ZoneCell]) -> String {
    let mut out = String::new();
    svg_open(&mut out, "Mixed-policy optimal zone");
    let layout = GridLayout::new(cells);
    for cell in cells {
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white"/>"##,
            layout.x(cell.s),
            layout.y(cell.j),
            layout.cell_w,
            layout.cell_h,
            zone_color(cell.class)
        );
    }
    layout.axis_labels(&mut out);
    let lx = WIDTH - MARGIN_RIGHT + 14.0;
    for (i, (class, label)) in [
        (ZoneClass::SwapBest, "beats both"),
        (ZoneClass::BeatsOne, "beats one"),
        (ZoneClass::Worst, "beats neither"),
        (ZoneClass::Inconclusive, "inconclusive"),
    ]
    .iter()
    .enumerate()
    {
        let y = MARGIN_TOP + 20.0 * i as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{lx}" y="{y}" width="12" height="12" fill="{}"/>
<text x="{}" y="{}" font-size="12">{label}</text>"##,
            zone_color(*class),
            lx + 18.0,
            y + 10.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap of mean-cost advantage of strong-only over weak-only pulls
/// (green where strong pulls win), with the analytic boundary on `j`
/// overlaid for the instance's scaled hardness.
pub fn strong_vs_weak_heatmap(cells: &[ZoneCell], n: usize, h_tilde: f64, delta: f64) -> String {
    let mut out = String::new();
    svg_open(&mut out, "Strong-only vs weak-only mean cost");
    let layout = GridLayout::new(cells);
    let max_mag = cells
        .iter()
        .filter_map(|c| Some((c.mean_cost_weak? / c.mean_cost_strong?).ln().abs()))
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    for cell in cells {
        let fill = match (cell.mean_cost_strong, cell.mean_cost_weak) {
            (Some(st), Some(wk)) => {
                let ratio = (wk / st).ln();
                let t = (ratio.abs() / max_mag).clamp(0.0, 1.0);
                let alpha = 0.15 + 0.85 * t;
                if ratio >= 0.0 {
                    format!("rgba(46,125,50,{alpha:.3})")
                } else {
                    format!("rgba(183,28,28,{alpha:.3})")
                }
            }
            _ => "#f5f5f5".to_string(),
        };
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white"/>"##,
            layout.x(cell.s),
            layout.y(cell.j),
            layout.cell_w,
            layout.cell_h,
            fill
        );
    }
    // Analytic boundary on j below which strong-only cannot lose, clipped to
    // the plotted j range.
    if h_tilde.is_finite() {
        let j_max = *layout.j_values.last().expect("non-empty grid");
        let points: Vec<String> = layout
            .s_values
            .iter()
            .map(|&s| {
                let b = corollary_boundary_j(s, n, h_tilde, delta).min(j_max);
                let x = layout.x(s) + layout.cell_w / 2.0;
                // Snap to the first plotted j row at or above the boundary.
                let y = match layout.j_values.iter().position(|&v| v >= b) {
                    Some(i) => HEIGHT - MARGIN_BOTTOM - (i as f64 + 0.5) * layout.cell_h,
                    None => MARGIN_TOP,
                };
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#1565c0" stroke-width="2"/>"##,
            points.join(" ")
        );
    }
    layout.axis_labels(&mut out);
    let lx = WIDTH - MARGIN_RIGHT + 14.0;
    let _ = writeln!(
        out,
        r##"<rect x="{lx}" y="{MARGIN_TOP}" width="12" height="12" fill="rgba(46,125,50,0.8)"/>
<text x="{}" y="{}" font-size="12">strong cheaper</text>
<rect x="{lx}" y="{}" width="12" height="12" fill="rgba(183,28,28,0.8)"/>
<text x="{}" y="{}" font-size="12">weak cheaper</text>
<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="#1565c0" stroke-width="2"/>
<text x="{}" y="{}" font-size="12">boundary j</text>
</svg>"##,
        lx + 18.0,
        MARGIN_TOP + 10.0,
        MARGIN_TOP + 20.0,
        lx + 18.0,
        MARGIN_TOP + 30.0,
        MARGIN_TOP + 46.0,
        lx + 12.0,
        MARGIN_TOP + 46.0,
        lx + 18.0,
        MARGIN_TOP + 50.0
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::HardnessRow;

    fn zone_fixture() -> Vec<ZoneCell> {
        vec![
            ZoneCell {
                s: 2.0,
                j: 1.0,
                mean_cost_swap: Some(100.0),
                mean_cost_strong: Some(120.0),
                mean_cost_weak: Some(200.0),
                class: ZoneClass::SwapBest,
            },
            ZoneCell {
                s: 5.0,
                j: 1.0,
                mean_cost_swap: Some(150.0),
                mean_cost_strong: Some(90.0),
                mean_cost_weak: Some(200.0),
                class: ZoneClass::BeatsOne,
            },
            ZoneCell {
                s: 2.0,
                j: 3.0,
                mean_cost_swap: None,
                mean_cost_strong: None,
                mean_cost_weak: None,
                class: ZoneClass::Inconclusive,
            },
            ZoneCell {
                s: 5.0,
                j: 3.0,
                mean_cost_swap: Some(300.0),
                mean_cost_strong: Some(250.0),
                mean_cost_weak: Some(200.0),
                class: ZoneClass::Worst,
            },
        ]
    }

    #[test]
    fn scatter_renders_points_curve_and_legend() {
        let rows: Vec<HardnessRow> = (0..6)
            .map(|i| HardnessRow {
                s: 5.0,
                j: 2.0,
                trial: i,
                policy: "swap",
                hardness: 10.0 + i as f64 * 17.0,
                h_tilde: 10.0,
                cost: 40.0 + i as f64,
                bound: Some(5000.0 + i as f64 * 100.0),
                converged: true,
            })
            .collect();
        let svg = hardness_scatter(&rows);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("bound"));
    }

    #[test]
    fn scatter_survives_empty_and_degenerate_input() {
        assert!(hardness_scatter(&[]).trim_end().ends_with("</svg>"));
        let rows = vec![HardnessRow {
            s: 1.0,
            j: 1.0,
            trial: 0,
            policy: "weak",
            hardness: f64::INFINITY,
            h_tilde: f64::INFINITY,
            cost: 10.0,
            bound: None,
            converged: false,
        }];
        assert!(hardness_scatter(&rows).trim_end().ends_with("</svg>"));
    }

    #[test]
    fn heatmaps_render_one_rect_per_cell() {
        let cells = zone_fixture();
        let zone = zone_heatmap(&cells);
        assert_eq!(
            zone.matches("<rect").count(),
            cells.len() + 5,
            "cells plus background plus legend swatches"
        );
        let sw = strong_vs_weak_heatmap(&cells, 8, 61.11, 0.1);
        assert!(sw.contains("<polyline"), "boundary overlay missing");
        assert!(sw.trim_end().ends_with("</svg>"));
    }
}
