//! Minimal deterministic SVG output: variation profiles as line charts and
//! covers of line or grid windows as colored bar/rectangle diagrams.

use std::fmt::Write as _;

use crate::cover::Cover;
use crate::oscillation::VariationProfile;

const PALETTE: [&str; 8] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2", "#eeca3b", "#9d755d",
];

fn svg_header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Line chart of a variation profile: N on the horizontal axis, the rolling
/// supremum on the vertical axis.
pub fn profile_svg(profile: &VariationProfile) -> String {
    let width = 640.0;
    let height = 360.0;
    let margin = 48.0;
    let mut out = svg_header(width, height);
    let xs: Vec<f64> = profile.entries.iter().map(|(n, _)| *n).collect();
    let ys: Vec<f64> = profile.entries.iter().map(|(_, v)| *v).collect();
    let x_max = xs.iter().copied().fold(1.0f64, f64::max);
    let y_max = ys.iter().copied().fold(1e-12f64, f64::max);
    let to_px = |n: f64, v: f64| {
        let x = margin + (n / x_max) * (width - 2.0 * margin);
        let y = height - margin - (v / y_max) * (height - 2.0 * margin);
        (x, y)
    };
    let _ = writeln!(
        out,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = margin,
        b = height - margin,
        r = width - margin,
        t = margin,
    );
    let points: Vec<String> = profile
        .entries
        .iter()
        .map(|&(n, v)| {
            let (x, y) = to_px(n, v);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        out,
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
        PALETTE[0],
        points.join(" ")
    );
    for &(n, v) in &profile.entries {
        let (x, y) = to_px(n, v);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{}\"/>", PALETTE[0]);
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.0}\" y=\"{:.0}\" font-size=\"12\">radius {}</text>",
        margin,
        margin - 12.0,
        profile.r
    );
    out.push_str("</svg>\n");
    out
}

/// Cover diagram. Line spaces draw one horizontal bar row per member; grid
/// spaces draw run-length rectangles per member. Other spaces get a
/// membership matrix.
pub fn cover_svg(cover: &Cover) -> String {
    let space = cover.space();
    if let Some(coords) = space.line_coords() {
        let lo = *coords.iter().min().unwrap_or(&0);
        let hi = *coords.iter().max().unwrap_or(&0);
        let span = (hi - lo).max(1) as f64;
        let width = 720.0;
        let row_h = 16.0;
        let margin = 24.0;
        let height = margin * 2.0 + row_h * cover.member_count() as f64;
        let mut out = svg_header(width, height);
        for (mi, member) in cover.members().iter().enumerate() {
            let color = PALETTE[mi % PALETTE.len()];
            let y = margin + mi as f64 * row_h;
            // merge consecutive coordinates into bars
            let mut xs: Vec<i64> = member.iter().map(|&p| coords[p]).collect();
            xs.sort_unstable();
            let mut run: Option<(i64, i64)> = None;
            let mut bars = Vec::new();
            for x in xs {
                run = match run {
                    Some((a, b)) if x == b + 1 => Some((a, x)),
                    Some((a, b)) => {
                        bars.push((a, b));
                        Some((x, x))
                    }
                    None => Some((x, x)),
                };
            }
            if let Some(r) = run {
                bars.push(r);
            }
            for (a, b) in bars {
                let x0 = margin + ((a - lo) as f64 / span) * (width - 2.0 * margin);
                let x1 = margin + ((b - lo + 1) as f64 / span) * (width - 2.0 * margin);
                let _ = writeln!(
                    out,
                    "<rect x=\"{x0:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                     fill=\"{color}\" fill-opacity=\"0.8\"/>",
                    y + 2.0,
                    (x1 - x0).max(1.0),
                    row_h - 4.0,
                );
            }
        }
        out.push_str("</svg>\n");
        return out;
    }
    if let Some(coords) = space.grid_coords() {
        let x_lo = coords.iter().map(|c| c.0).min().unwrap_or(0);
        let x_hi = coords.iter().map(|c| c.0).max().unwrap_or(0);
        let y_lo = coords.iter().map(|c| c.1).min().unwrap_or(0);
        let y_hi = coords.iter().map(|c| c.1).max().unwrap_or(0);
        let cell = (600.0 / ((x_hi - x_lo + 1).max(y_hi - y_lo + 1)) as f64).clamp(1.0, 16.0);
        let margin = 16.0;
        let width = margin * 2.0 + cell * (x_hi - x_lo + 1) as f64;
        let height = margin * 2.0 + cell * (y_hi - y_lo + 1) as f64;
        let mut out = svg_header(width, height);
        for (mi, member) in cover.members().iter().enumerate() {
            let color = PALETTE[mi % PALETTE.len()];
            // run-length encode each row of the member
            let mut rows: std::collections::BTreeMap<i64, Vec<i64>> = Default::default();
            for &p in member {
                let (x, y) = coords[p];
                rows.entry(y).or_default().push(x);
            }
            for (y, mut xs) in rows {
                xs.sort_unstable();
                let mut run: Option<(i64, i64)> = None;
                let mut bars = Vec::new();
                for x in xs {
                    run = match run {
                        Some((a, b)) if x == b + 1 => Some((a, x)),
                        Some((a, b)) => {
                            bars.push((a, b));
                            Some((x, x))
                        }
                        None => Some((x, x)),
                    };
                }
                if let Some(r) = run {
                    bars.push(r);
                }
                for (a, b) in bars {
                    let _ = writeln!(
                        out,
                        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{cell:.2}\" \
                         fill=\"{color}\" fill-opacity=\"0.45\"/>",
                        margin + (a - x_lo) as f64 * cell,
                        margin + (y - y_lo) as f64 * cell,
                        (b - a + 1) as f64 * cell,
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        return out;
    }
    // fallback: membership matrix, one row per member, one column per point
    let n = space.len();
    let cell = (700.0 / n.max(1) as f64).clamp(2.0, 14.0);
    let margin = 16.0;
    let width = margin * 2.0 + cell * n as f64;
    let height = margin * 2.0 + cell * cover.member_count() as f64;
    let mut out = svg_header(width, height);
    for (mi, member) in cover.members().iter().enumerate() {
        let color = PALETTE[mi % PALETTE.len()];
        for &p in member {
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" \
                 fill=\"{color}\" fill-opacity=\"0.8\"/>",
                margin + p as f64 * cell,
                margin + mi as f64 * cell,
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
