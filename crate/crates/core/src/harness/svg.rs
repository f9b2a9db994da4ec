//! Minimal SVG line charts with shaded confidence bands.

use std::fmt::Write as _;

pub struct Series<'a> {
    pub label: &'a str,
    pub mean: &'a [f64],
    /// Half-width of the band; empty for no band.
    pub half_width: &'a [f64],
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let n = series.iter().map(|s| s.mean.len()).max().unwrap_or(0).max(2);
    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for (i, &m) in s.mean.iter().enumerate() {
            let h = s.half_width.get(i).copied().and_then(finite).unwrap_or(0.0);
            if let Some(m) = finite(m) {
                lo = lo.min(m - h);
                hi = hi.max(m + h);
            }
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let px = |i: usize| PAD + (W - 2.0 * PAD) * i as f64 / (n - 1) as f64;
    let py = |v: f64| H - PAD - (H - 2.0 * PAD) * (v - lo) / (hi - lo);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<path d="M{PAD},{PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 16.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (v, anchor) in [(lo, "end"), (hi, "end")] {
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="{anchor}">{v:.3e}</text>"#, PAD - 4.0, py(v) + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{PAD}" y="{}" text-anchor="middle">0</text>"#, H - PAD + 16.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W - PAD, H - PAD + 16.0, n - 1);

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<(usize, f64)> = s.mean.iter().enumerate().filter_map(|(i, &m)| finite(m).map(|m| (i, m))).collect();
        if pts.is_empty() {
            continue;
        }
        if !s.half_width.is_empty() {
            let mut d = String::new();
            for (j, &(i, m)) in pts.iter().enumerate() {
                let h = s.half_width.get(i).copied().and_then(finite).unwrap_or(0.0);
                let _ = write!(d, "{}{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, px(i), py(m + h));
            }
            for &(i, m) in pts.iter().rev() {
                let h = s.half_width.get(i).copied().and_then(finite).unwrap_or(0.0);
                let _ = write!(d, "L{:.2},{:.2} ", px(i), py(m - h));
            }
            let _ = writeln!(out, r#"<path d="{}Z" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, d);
        }
        let line: Vec<String> = pts.iter().map(|&(i, m)| format!("{:.2},{:.2}", px(i), py(m))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.join(" ")
        );
        let ly = PAD + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            W - PAD - 120.0,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_band_and_line() {
        let svg = line_chart(
            "fitness",
            "generation",
            "m",
            &[Series {
                label: "neat <fd>",
                mean: &[0.0, 1.0, 2.0],
                half_width: &[0.1, 0.1, f64::NAN],
            }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("fill-opacity"));
        assert!(svg.contains("neat &lt;fd&gt;"));
        assert!(!svg.contains("NaN"));
    }
}
