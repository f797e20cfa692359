use std::fmt::Write as _;

const W: f64 = 800.0;
const H: f64 = 400.0;
const PAD: f64 = 40.0;

/// Plain SVG 1.1: a polyline of (t, Z(t)) with circles at the zeros.
pub fn z_plot(title: &str, samples: &[(f64, f64)], zeros: &[f64]) -> String {
    let (t0, t1) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let ymax = samples.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let span = (t1 - t0).max(f64::MIN_POSITIVE);
    let x = |t: f64| PAD + (t - t0) / span * (W - 2.0 * PAD);
    let y = |v: f64| H / 2.0 - v / ymax * (H / 2.0 - PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{0}" x2="{1}" y2="{0}" stroke="gray"/>"#, H / 2.0, W - PAD);
    let pts: Vec<String> = samples.iter().map(|&(t, v)| format!("{:.2},{:.2}", x(t), y(v))).collect();
    let _ = writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="1" points="{}"/>"#, pts.join(" "));
    for &g in zeros {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="red"/>"#, x(g), H / 2.0);
    }
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="12">t = {t0:.2}</text>"#, H - 10.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">t = {t1:.2}</text>"#, W - PAD, H - 10.0);
    let _ = writeln!(s, r#"<text x="{PAD}" y="20" font-size="14">{}</text>"#, escape(title));
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
