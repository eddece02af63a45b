//! SVG frames of rasterized slices with witness positions overlaid.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{WitnessPath, WitnessSample};
use crate::error::Result;
use crate::rasterize::{rasterize_fiber, GridSpec};
use crate::scenario::Scenario;

const COVERED: &str = "#9e9e9e";
const UNCOVERED: &str = "#ffffff";
const BOUNDARY: &str = "#d62728";
const PALETTE: &[&str] = &[
    "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22",
];

/// The latest sample of `w` at or before `t`; on a circle, times before the
/// first sample are read one period later.
pub fn sample_at(w: &WitnessPath, t: f64, circle: bool) -> Option<&WitnessSample> {
    let first = w.samples.first()?.t;
    let t = if circle && t < first { t + 1.0 } else { t };
    w.samples.iter().take_while(|smp| smp.t <= t).last()
}

/// One frame: covered cells gray, uncovered cells white, covered-boundary
/// cells red, and a dot for every witness.
pub fn render_frame(
    s: &Scenario,
    g: &GridSpec,
    t: f64,
    witnesses: &[WitnessPath],
) -> Result<String> {
    let f = rasterize_fiber(s, t, g)?;
    let (nx, ny) = (g.nx, g.ny);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {nx} {ny}" width="{}" height="{}" shape-rendering="crispEdges">"#,
        nx * 4,
        ny * 4
    );
    let _ = writeln!(out, "<title>t = {t}</title>");
    for j in 0..ny {
        let y = ny - 1 - j;
        let mut i = 0;
        while i < nx {
            let idx = g.index(i, j);
            let fill = if f.covered_boundary[idx] {
                Some(BOUNDARY)
            } else if f.covered[idx] {
                Some(COVERED)
            } else if f.uncovered[idx] {
                Some(UNCOVERED)
            } else {
                None
            };
            let mut run = 1;
            while i + run < nx {
                let k = g.index(i + run, j);
                let same = (f.covered_boundary[k], f.covered[k], f.uncovered[k])
                    == (f.covered_boundary[idx], f.covered[idx], f.uncovered[idx]);
                if !same {
                    break;
                }
                run += 1;
            }
            if let Some(fill) = fill {
                let _ = writeln!(
                    out,
                    r#"<rect x="{i}" y="{y}" width="{run}" height="1" fill="{fill}"/>"#
                );
            }
            i += run;
        }
    }
    let circle = s.time_base.is_circle();
    for (k, w) in witnesses.iter().enumerate() {
        if let Some(smp) = sample_at(w, t, circle) {
            let cx = (smp.position[0] - g.origin[0]) / g.cell_size;
            let cy = ny as f64 - (smp.position[1] - g.origin[1]) / g.cell_size;
            let _ = writeln!(
                out,
                r#"<circle cx="{cx}" cy="{cy}" r="1.5" fill="{}"/>"#,
                PALETTE[k % PALETTE.len()]
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes `frame_<k>.svg` for every requested time into `dir`.
pub fn render_frames(
    s: &Scenario,
    g: &GridSpec,
    times: &[f64],
    witnesses: &[WitnessPath],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if times.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir)?;
    times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let path = dir.join(format!("frame_{k}.svg"));
            std::fs::write(&path, render_frame(s, g, t, witnesses)?)?;
            Ok(path)
        })
        .collect()
}
