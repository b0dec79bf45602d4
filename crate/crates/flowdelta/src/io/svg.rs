//! Self-contained SVG plots on a fixed 800×600 view box.
//!
//! Plots are drawn only from CSV rows, so re-reading a CSV reproduces the
//! same picture byte for byte.

use std::fmt::Write as _;

use super::table::{join_label, CurveRow, ProfileRow, RegionRow};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 40.0;
const LEGEND_WIDTH: f64 = 150.0;
const FONT: &str = "font-family=\"sans-serif\" font-size=\"12\"";
const LINE_COLOR: &str = "#1f4e99";
const AXIS_COLOR: &str = "#333333";
const PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5",
    "#ffed6f",
];
const OVERLAY_COLORS: [&str; 6] = ["#000000", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Clone, Copy)]
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xlo: f64,
    xhi: f64,
    ylo: f64,
    yhi: f64,
}

impl Frame {
    fn new(x0: f64, y0: f64, w: f64, h: f64, (xlo, xhi): (f64, f64), (ylo, yhi): (f64, f64)) -> Self {
        let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let (xlo, xhi) = pad(xlo, xhi);
        let (ylo, yhi) = pad(ylo, yhi);
        Self { x0, y0, w, h, xlo, xhi, ylo, yhi }
    }

    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xlo) / (self.xhi - self.xlo) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.ylo) / (self.yhi - self.ylo) * self.h
    }

    fn axes(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"{AXIS_COLOR}\"/>",
            self.x0, self.y0, self.w, self.h
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let (xv, yv) = (self.xlo + f * (self.xhi - self.xlo), self.ylo + f * (self.yhi - self.ylo));
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{}</text>",
                self.px(xv),
                self.y0 + self.h + 14.0,
                tick(xv)
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" {FONT}>{}</text>",
                self.x0 - 4.0,
                self.py(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{}</text>",
            self.x0 + self.w / 2.0,
            self.y0 + self.h + 30.0,
            esc(xlabel)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\" {FONT}>{}</text>",
            self.x0 - 46.0,
            self.y0 + self.h / 2.0,
            self.x0 - 46.0,
            self.y0 + self.h / 2.0,
            esc(ylabel)
        );
    }

    fn polyline(&self, out: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str, width: f64, dash: bool) {
        let mut d = String::new();
        for (x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            let _ = write!(d, "{:.2},{:.2} ", self.px(x), self.py(y));
        }
        if d.is_empty() {
            return;
        }
        let dash = if dash { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width:.2}\"{dash}/>",
            d.trim_end()
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(out, "<text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" {FONT}>{}</text>", WIDTH / 2.0, esc(title));
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// `ρ` and `ũ` against `x`, one line per snapshot, later times thicker.
pub fn profile_svg(rows: &[ProfileRow], title: &str) -> String {
    let mut times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    times.dedup();
    let mut out = String::new();
    header(&mut out, title);
    let xr = range(rows.iter().map(|r| r.x));
    let gap = 30.0;
    let h = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM - gap - 16.0) / 2.0;
    let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let panels: [(&str, fn(&ProfileRow) -> f64, f64); 2] =
        [("rho", |r| r.rho, MARGIN_TOP), ("u_tilde", |r| r.u_tilde, MARGIN_TOP + h + gap + 16.0)];
    for (label, get, y0) in panels {
        let f = Frame::new(MARGIN_LEFT, y0, w, h, xr, range(rows.iter().map(get)));
        f.axes(&mut out, "x", label);
        let nt = times.len().max(1);
        for (k, t) in times.iter().enumerate() {
            let width = 0.5 + 2.0 * k as f64 / nt as f64;
            f.polyline(&mut out, rows.iter().filter(|r| r.t == *t).map(|r| (r.x, get(r))), LINE_COLOR, width, false);
        }
    }
    out.push_str("</svg>\n");
    out
}

fn steps(mut v: Vec<f64>) -> (Vec<f64>, f64) {
    v.sort_by(f64::total_cmp);
    v.dedup();
    let d = if v.len() > 1 { v[1] - v[0] } else { 1.0 };
    (v, d)
}

/// Region grid as colored cells with boundary curves on top.
pub fn state_space_svg(cells: &[RegionRow], curves: &[CurveRow], title: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (rhos, dr) = steps(cells.iter().map(|c| c.rho).collect());
    let (us, du) = steps(cells.iter().map(|c| c.u_tilde).collect());
    let xr = (rhos.first().map_or(0.0, |r| r - dr / 2.0).max(0.0), rhos.last().map_or(1.0, |r| r + dr / 2.0));
    let yr = (us.first().map_or(0.0, |u| u - du / 2.0), us.last().map_or(1.0, |u| u + du / 2.0));
    let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT - LEGEND_WIDTH;
    let f = Frame::new(MARGIN_LEFT, MARGIN_TOP, w, HEIGHT - MARGIN_TOP - MARGIN_BOTTOM, xr, yr);
    let mut labels: Vec<String> = cells.iter().map(|c| join_label(&c.region, &c.subregion)).collect();
    labels.sort();
    labels.dedup();
    let color = |l: &str| PALETTE[labels.iter().position(|x| x == l).unwrap_or(0) % PALETTE.len()];
    for c in cells {
        let (x0, x1) = (f.px(c.rho - dr / 2.0), f.px(c.rho + dr / 2.0));
        let (y0, y1) = (f.py(c.u_tilde + du / 2.0), f.py(c.u_tilde - du / 2.0));
        let _ = writeln!(
            out,
            "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
            x1 - x0,
            y1 - y0,
            color(&join_label(&c.region, &c.subregion))
        );
    }
    f.axes(&mut out, "rho", "u_tilde");
    let mut names: Vec<&str> = Vec::new();
    for c in curves {
        if !names.contains(&c.curve.as_str()) {
            names.push(&c.curve);
        }
    }
    for (k, name) in names.iter().enumerate() {
        let pts: Vec<(f64, f64)> = curves.iter().filter(|c| c.curve == *name).map(|c| (c.rho, c.u_tilde)).collect();
        let col = OVERLAY_COLORS[k % OVERLAY_COLORS.len()];
        let dashed = name.starts_with("asymptote") || *name == "degenerate_line" || *name == "rho_bar";
        if *name == "overcompressive_frontier" {
            for (x, y) in pts {
                let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.2\" fill=\"{col}\"/>", f.px(x), f.py(y));
            }
        } else {
            f.polyline(&mut out, pts.into_iter(), col, 1.5, dashed);
        }
    }
    let lx = MARGIN_LEFT + w + 14.0;
    let mut ly = MARGIN_TOP + 6.0;
    for l in &labels {
        let _ = writeln!(out, "<rect x=\"{lx:.2}\" y=\"{ly:.2}\" width=\"12\" height=\"12\" fill=\"{}\" stroke=\"{AXIS_COLOR}\"/>", color(l));
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" {FONT}>{}</text>", lx + 18.0, ly + 10.0, esc(l));
        ly += 18.0;
    }
    ly += 8.0;
    for (k, name) in names.iter().enumerate() {
        let col = OVERLAY_COLORS[k % OVERLAY_COLORS.len()];
        let _ = writeln!(out, "<line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{col}\" stroke-width=\"1.5\"/>", ly + 6.0, lx + 12.0, ly + 6.0);
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" {FONT}>{}</text>", lx + 18.0, ly + 10.0, esc(name));
        ly += 18.0;
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_view_box_and_escaping() {
        let rows = vec![
            ProfileRow { t: 1.0, x: -1.0, xt: -1.0, rho: 1.0, u_tilde: 0.0, u_phys: 0.0 },
            ProfileRow { t: 1.0, x: 1.0, xt: 1.0, rho: 2.0, u_tilde: 1.0, u_phys: 1.0 },
        ];
        let s = profile_svg(&rows, "a < b & c");
        assert!(s.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\""));
        assert!(s.contains("a &lt; b &amp; c"));
        assert!(s.ends_with("</svg>\n"));
    }

    #[test]
    fn one_legend_entry_per_label() {
        let cells = vec![
            RegionRow { rho: 1.0, u_tilde: 0.0, region: "I".into(), subregion: "a".into() },
            RegionRow { rho: 2.0, u_tilde: 0.0, region: "IV".into(), subregion: String::new() },
            RegionRow { rho: 1.0, u_tilde: 1.0, region: "I".into(), subregion: "a".into() },
        ];
        let s = state_space_svg(&cells, &[], "map");
        assert_eq!(s.matches(">I_a</text>").count(), 1);
        assert_eq!(s.matches(">IV</text>").count(), 1);
    }
}
