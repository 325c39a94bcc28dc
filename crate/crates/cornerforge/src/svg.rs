//! Self-contained SVG line plot of repeatability curves.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Plots `(count, repeatability)` series on fixed axes `[0, x_max] × [0, 1]`.
pub fn curve_plot(series: &[(String, Vec<(usize, f64)>)], x_max: usize) -> String {
    let sx = |x: f64| PAD + x / x_max.max(1) as f64 * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y.clamp(0.0, 1.0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{l} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        l = PAD,
        t = PAD,
        b = H - PAD,
        r = W - PAD
    );
    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v}</text>"#, PAD - 6.0, sy(v) + 4.0);
        let xv = x_max as f64 * v;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xv}</text>"#, sx(xv), H - PAD + 16.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">features per frame</text>"#, W / 2.0, H - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">repeatability</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (k, (name, pts)) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2} {:.2}", if i == 0 { 'M' } else { 'L' }, sx(x as f64), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, d.join(" "));
        let ly = PAD + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{colour}">{}</text>"#,
            W - PAD - 120.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_path_per_series() {
        let svg = curve_plot(
            &[("a<b".into(), vec![(0, 0.0), (100, 0.5)]), ("c".into(), vec![(0, 0.0), (100, 1.0)])],
            2000,
        );
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("stroke-width").count(), 2);
        assert!(svg.contains("a&lt;b"));
    }
}
