//! Profile output: CSV rows and an SVG step plot.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;

use super::profile::ProfileCurve;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 280.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;
const LEGEND_H: f64 = 22.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// `tau,solver,kappa,fraction` rows.
pub fn write_csv<W: Write>(curves: &[ProfileCurve], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["tau", "solver", "kappa", "fraction"])?;
    for c in curves {
        for (kappa, frac) in c.fraction.iter().enumerate() {
            wr.write_record([
                c.tau.to_string(),
                c.solver.clone(),
                kappa.to_string(),
                frac.to_string(),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Distinct τ values in first-seen order.
fn taus(curves: &[ProfileCurve]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for c in curves {
        if !out.contains(&c.tau) {
            out.push(c.tau);
        }
    }
    out
}

fn solvers(curves: &[ProfileCurve]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in curves {
        if !out.contains(&c.solver) {
            out.push(c.solver.clone());
        }
    }
    out
}

/// One panel per τ with a step polyline per solver.
pub fn svg(curves: &[ProfileCurve]) -> String {
    let panels = taus(curves);
    let names = solvers(curves);
    let width = PANEL_W * panels.len().max(1) as f64;
    let height = PANEL_H + LEGEND_H * names.len() as f64 + 8.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    for (p, &tau) in panels.iter().enumerate() {
        let x0 = p as f64 * PANEL_W + MARGIN_L;
        let y0 = MARGIN_T;
        let panel: Vec<&ProfileCurve> = curves.iter().filter(|c| c.tau == tau).collect();
        let kmax = panel
            .iter()
            .map(|c| c.fraction.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
            .max(1) as f64;
        let _ = writeln!(s, r#"<g class="panel" data-tau="{tau}">"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">τ = {tau:e}</text>"#,
            x0 + plot_w / 2.0
        );
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.1}" y="{y0:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#444"/>"##
        );
        for t in 0..=4 {
            let frac = t as f64 / 4.0;
            let y = y0 + plot_h * (1.0 - frac);
            let _ = writeln!(
                s,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="#444"/><text x="{:.1}" y="{:.1}" text-anchor="end">{frac}</text>"##,
                x0 - 4.0,
                x0 - 6.0,
                y + 4.0
            );
            let kappa = (kmax * frac).round();
            let x = x0 + plot_w * kappa / kmax;
            let _ = writeln!(
                s,
                r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#444"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{kappa}</text>"##,
                y0 + plot_h,
                y0 + plot_h + 4.0,
                y0 + plot_h + 16.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">groups of (n+1) evaluations</text>"#,
            x0 + plot_w / 2.0,
            y0 + plot_h + 34.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">portion of τ-solved instances</text>"#,
            x0 - 36.0,
            y0 + plot_h / 2.0,
            x0 - 36.0,
            y0 + plot_h / 2.0
        );
        for c in panel {
            let color =
                COLORS[names.iter().position(|n| *n == c.solver).unwrap_or(0) % COLORS.len()];
            let mut pts = String::new();
            let mut prev: Option<f64> = None;
            for (kappa, &frac) in c.fraction.iter().enumerate() {
                let x = x0 + plot_w * kappa as f64 / kmax;
                if let Some(py) = prev {
                    let _ = write!(pts, "{x:.2},{py:.2} ");
                }
                let y = y0 + plot_h * (1.0 - frac);
                let _ = write!(pts, "{x:.2},{y:.2} ");
                prev = Some(y);
            }
            let _ = writeln!(
                s,
                r#"<polyline data-solver="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                escape(&c.solver),
                pts.trim_end()
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, name) in names.iter().enumerate() {
        let y = PANEL_H + LEGEND_H * i as f64 + 8.0;
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{MARGIN_L}" y1="{y}" x2="{:.1}" y2="{y}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            MARGIN_L + 24.0,
            MARGIN_L + 30.0,
            y + 4.0,
            escape(name)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(tau: f64, solver: &str, fraction: Vec<f64>) -> ProfileCurve {
        ProfileCurve {
            tau,
            solver: solver.into(),
            fraction,
            k: vec![],
        }
    }

    #[test]
    fn csv_rows() {
        let cs = vec![
            curve(0.1, "a", vec![0.0, 0.5, 1.0]),
            curve(0.1, "b", vec![0.0, 0.0, 0.0]),
        ];
        let mut out = Vec::new();
        write_csv(&cs, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "tau,solver,kappa,fraction");
        assert_eq!(lines[2], "0.1,a,1,0.5");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn svg_escapes_names() {
        let s = svg(&[curve(0.1, "a<b", vec![0.0, 1.0])]);
        assert!(s.contains("a&lt;b"));
        assert!(!s.contains("a<b"));
    }
}
