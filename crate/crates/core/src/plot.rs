//! Dependency-free SVG space-time heatmap.

use std::fmt::Write;

const VIRIDIS: [(u8, u8, u8); 8] = [
    (68, 1, 84),
    (70, 50, 127),
    (54, 92, 141),
    (39, 127, 142),
    (31, 161, 135),
    (74, 194, 109),
    (159, 218, 58),
    (253, 231, 37),
];

pub const WIDTH: usize = 512;
pub const HEIGHT: usize = 256;
const MAX_ROWS: usize = 128;

/// Linear interpolation through the 8-stop ramp, `s` clamped to [0, 1].
pub fn color(s: f64) -> (u8, u8, u8) {
    let s = if s.is_finite() {
        s.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let pos = s * (VIRIDIS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(VIRIDIS.len() - 2);
    let f = pos - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |p: u8, q: u8| (p as f64 + f * (q as f64 - p as f64)).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Time runs left to right over a 512×256 plot area, x bottom to top.
pub fn heatmap_svg(snapshots: &[(f64, Vec<f64>)], length: f64, title: &str) -> String {
    let (ml, mt, mb, mr) = (56usize, 28usize, 40usize, 70usize);
    let mut s = String::new();
    let w = WIDTH + ml + mr;
    let h = HEIGHT + mt + mb;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{ml}" y="18">{}</text>"#, escape(title));
    if snapshots.is_empty() || snapshots[0].1.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let t_end = snapshots.last().unwrap().0;
    let (lo, hi) = snapshots
        .iter()
        .flat_map(|(_, u)| u.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let nx = snapshots[0].1.len();
    let rows = nx.min(MAX_ROWS);
    let cols = snapshots.len();
    let cw = WIDTH as f64 / cols as f64;
    let rh = HEIGHT as f64 / rows as f64;
    for (c, (_, u)) in snapshots.iter().enumerate() {
        for r in 0..rows {
            // average the nodes falling in this row
            let a = r * nx / rows;
            let b = ((r + 1) * nx / rows).max(a + 1);
            let v = u[a..b].iter().sum::<f64>() / (b - a) as f64;
            let (cr, cg, cb) = color((v - lo) / span);
            let x = ml as f64 + c as f64 * cw;
            let y = (mt + HEIGHT) as f64 - (r + 1) as f64 * rh;
            let _ = writeln!(
                s,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#{cr:02x}{cg:02x}{cb:02x}"/>"##,
                cw + 0.05,
                rh + 0.05
            );
        }
    }
    let base = mt + HEIGHT;
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#,
        ml + WIDTH / 2,
        base + 34
    );
    let _ = writeln!(
        s,
        r#"<text x="{ml}" y="{}" text-anchor="middle">0</text>"#,
        base + 16
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        ml + WIDTH,
        base + 16,
        fmt_num(t_end)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">x</text>"#,
        ml - 34,
        mt + HEIGHT / 2
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{base}" text-anchor="end">0</text>"#,
        ml - 6
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        ml - 6,
        mt + 10,
        fmt_num(length)
    );
    // colour bar
    let bx = ml + WIDTH + 16;
    for k in 0..32 {
        let (cr, cg, cb) = color(k as f64 / 31.0);
        let y = base as f64 - (k + 1) as f64 * HEIGHT as f64 / 32.0;
        let _ = writeln!(
            s,
            r##"<rect x="{bx}" y="{y:.2}" width="12" height="{:.2}" fill="#{cr:02x}{cg:02x}{cb:02x}"/>"##,
            HEIGHT as f64 / 32.0 + 0.05
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">{}</text>"#,
        bx + 15,
        mt + 10,
        fmt_num(hi)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{base}">{}</text>"#,
        bx + 15,
        fmt_num(lo)
    );
    s.push_str("</svg>\n");
    s
}

fn fmt_num(v: f64) -> String {
    format!("{:.4}", v)
        .trim_end_matches('0')
        .trim_end_matches('.')
        .to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_endpoints() {
        assert_eq!(color(0.0), VIRIDIS[0]);
        assert_eq!(color(1.0), VIRIDIS[7]);
        assert_eq!(color(f64::NAN), VIRIDIS[0]);
        assert_eq!(color(2.0), VIRIDIS[7]);
    }

    #[test]
    fn svg_cell_count() {
        let snaps: Vec<(f64, Vec<f64>)> =
            (0..10).map(|k| (k as f64, vec![k as f64; 300])).collect();
        let svg = heatmap_svg(&snaps, 3.0, "u<x>");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("u&lt;x&gt;"));
        assert_eq!(svg.matches("<rect").count(), 1 + 10 * MAX_ROWS + 32);
    }
}
