//! Mutual-information region plots along the normalization line.

use std::fmt::Write;

use anyhow::Result;
use povmw::tasks::{
    mi_on_line, mi_threshold_crossing, region_classify, Region, RegionPoint, RegionTask,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionRow {
    pub x: f64,
    pub y: f64,
    pub mi: f64,
    pub region: Region,
}

/// `points` evenly spaced x values on [0, 1/k] plus the exact region
/// boundaries and the one-bit crossing, sorted.
pub fn region_rows(task: RegionTask, points: usize) -> Result<Vec<RegionRow>> {
    let xmax = task.x_max();
    let points = points.max(2);
    let mut xs: Vec<f64> = (0..points)
        .map(|i| xmax * i as f64 / (points - 1) as f64)
        .collect();
    xs.extend(task.boundaries());
    xs.push(mi_threshold_crossing(task));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.into_iter()
        .map(|x| {
            let pt = RegionPoint::on_line(task, x);
            Ok(RegionRow {
                x,
                y: pt.y,
                mi: mi_on_line(task, x),
                region: region_classify(&pt)?,
            })
        })
        .collect()
}

pub fn region_csv(rows: &[RegionRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "MI", "region"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.x),
            format!("{:.16e}", r.y),
            format!("{:.16e}", r.mi),
            r.region.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 760.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 520.0;

fn color(r: Region) -> &'static str {
    match r {
        Region::R1 => "#1b9e77",
        Region::R2 => "#d95f02",
        Region::R3 => "#7570b3",
        Region::R4 => "#e7298a",
    }
}

/// Plot x coordinate of a line parameter.
pub fn px(task: RegionTask, x: f64) -> f64 {
    LEFT + (RIGHT - LEFT) * x / task.x_max()
}

/// MI against x, colored by region, with the two region boundaries and the
/// one-bit crossing marked. Boundary lines carry their exact x in `data-x`.
pub fn region_svg(task: RegionTask, rows: &[RegionRow]) -> String {
    let k = task.k();
    let mi_max = rows.iter().map(|r| r.mi).fold(1.0f64, f64::max) * 1.05;
    let py = |mi: f64| BOTTOM - (BOTTOM - TOP) * mi / mi_max;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">G(2,2,{k}): mutual information along x + {}y = 1/{k}</text>"#,
        WIDTH / 2.0,
        k - 1
    );
    // axes
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{LEFT}" y2="{TOP}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">x</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="25" y="{}" text-anchor="middle" transform="rotate(-90 25 {})">MI (bits)</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="{}" text-anchor="middle">0</text>"#,
        BOTTOM + 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{RIGHT}" y="{}" text-anchor="middle">1/{k}</text>"#,
        BOTTOM + 18.0
    );
    // one-bit level
    let _ = writeln!(
        s,
        r##"<line class="mi-one" x1="{LEFT}" y1="{y:.3}" x2="{RIGHT}" y2="{y:.3}" stroke="#999" stroke-dasharray="2,3"/>"##,
        y = py(1.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.3}" text-anchor="end">1</text>"#,
        LEFT - 6.0,
        py(1.0) + 4.0
    );
    // curve, one polyline per run of equal region
    let mut start = 0;
    for i in 1..=rows.len() {
        if i == rows.len() || rows[i].region != rows[start].region {
            let end = i.min(rows.len() - 1);
            let pts: Vec<String> = rows[start..=end]
                .iter()
                .map(|r| format!("{:.3},{:.3}", px(task, r.x), py(r.mi)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="region-{}" fill="none" stroke="{}" stroke-width="3" points="{}"/>"#,
                rows[start].region,
                color(rows[start].region),
                pts.join(" ")
            );
            start = i;
        }
    }
    let k2 = k * k;
    for (x, label) in task
        .boundaries()
        .into_iter()
        .zip([format!("x = 1/{k2}"), format!("x = 2/{k2}")])
    {
        let xp = px(task, x);
        let _ = writeln!(
            s,
            r#"<line class="boundary" data-x="{x:e}" x1="{xp:.3}" y1="{TOP}" x2="{xp:.3}" y2="{BOTTOM}" stroke="black" stroke-dasharray="6,4"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{xp:.3}" y="{}" text-anchor="middle">{label}</text>"#,
            TOP - 6.0
        );
    }
    let xc = mi_threshold_crossing(task);
    let xp = px(task, xc);
    let _ = writeln!(
        s,
        r##"<line class="crossing" data-x="{xc:e}" x1="{xp:.3}" y1="{TOP}" x2="{xp:.3}" y2="{BOTTOM}" stroke="#e7298a" stroke-dasharray="2,2"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{}" text-anchor="start" fill="{}">MI = 1 at x = {xc:.6}</text>"#,
        xp + 4.0,
        BOTTOM - 8.0,
        color(Region::R4)
    );
    // legend
    for (i, r) in [Region::R1, Region::R2, Region::R3, Region::R4]
        .into_iter()
        .enumerate()
    {
        let y = TOP + 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="12" height="12" fill="{}"/>"#,
            RIGHT - 60.0,
            y - 10.0,
            color(r)
        );
        let _ = writeln!(s, r#"<text x="{}" y="{y}">{r}</text>"#, RIGHT - 42.0);
    }
    s.push_str("</svg>\n");
    s
}

/// `data-x` values of the boundary lines in an SVG produced by
/// [`region_svg`].
pub fn boundary_positions(svg: &str) -> Vec<f64> {
    svg.lines()
        .filter(|l| l.contains(r#"class="boundary""#))
        .filter_map(|l| {
            let rest = l.split("data-x=\"").nth(1)?;
            rest.split('"').next()?.parse().ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_include_exact_boundaries() {
        let rows = region_rows(RegionTask::K3, 11).unwrap();
        assert!(rows.iter().any(|r| r.x == 1.0 / 9.0));
        assert!(rows.iter().any(|r| r.x == 2.0 / 9.0));
        assert_eq!(rows[0].region, Region::R1);
        assert!((rows[0].mi - 0.584963).abs() < 1e-6);
    }

    #[test]
    fn svg_boundaries_round_trip() {
        for task in [RegionTask::K3, RegionTask::K4] {
            let svg = region_svg(task, &region_rows(task, 51).unwrap());
            assert!(svg.contains(r#"viewBox="0 0 800 600""#));
            assert_eq!(boundary_positions(&svg), task.boundaries().to_vec());
        }
    }
}
