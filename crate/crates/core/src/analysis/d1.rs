use super::{direct::run_direct, AnalysisOptions};
use crate::components::label_grid;
use crate::error::{EvasionError, Result};
use crate::rasterize::{adjacency_of, rasterize_fiber, GridSpec, Region};
use crate::scenario::Scenario;
use crate::zigzag::{region_slot, EventType};

/// Whether the two pieces of the fence collar count as covered components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FenceConvention {
    #[default]
    CountCollar,
    ExcludeCollar,
}

/// Closed-form component count on a line: covered components at time 0,
/// minus one, minus the number of closing events.
pub fn d1_count(
    s: &Scenario,
    g: &GridSpec,
    fence: FenceConvention,
    opts: &AnalysisOptions,
) -> Result<u64> {
    if s.dimension != 1 {
        return Err(EvasionError::Precondition(
            "the closed form needs a one-dimensional scenario".into(),
        ));
    }
    if s.time_base.is_circle() {
        return Err(EvasionError::Precondition(
            "the closed form needs an interval time base".into(),
        ));
    }
    let f0 = rasterize_fiber(s, 0.0, g)?;
    let lab = label_grid(&f0.covered, g.nx, g.ny, adjacency_of(Region::Covered).0);
    let collar = s.domain.radius - s.fence_width;
    let mut in_collar = vec![false; lab.count];
    for idx in 0..g.len() {
        if let Some(l) = lab.label(idx) {
            if (g.cell_center(idx)[0] - s.domain.center[0]).abs() >= collar {
                in_collar[l] = true;
            }
        }
    }
    let c0 = match fence {
        FenceConvention::CountCollar => lab.count,
        FenceConvention::ExcludeCollar => in_collar.iter().filter(|&&c| !c).count(),
    };
    let run = run_direct(s, g, opts)?;
    check_no_transient_pockets(&run)?;
    let closings = run
        .events
        .events
        .iter()
        .filter(|e| e.type_x == EventType::D)
        .count();
    (c0 as i64 - 1 - closings as i64).try_into().map_err(|_| {
        EvasionError::Precondition(format!(
            "{c0} covered components at time 0 and {closings} closing events give a negative count"
        ))
    })
}

// a pocket that opens after time 0 and later closes breaks the closed form
fn check_no_transient_pockets(run: &super::DirectAnalysis) -> Result<()> {
    let d = &run.zigzags.diagrams[region_slot(Region::Uncovered)];
    let mut old: Vec<bool> = vec![true; d.fiber_sizes[0]];
    for i in 0..d.cobordism_count() {
        let mut cob_old = vec![false; d.cobordism_sizes[i]];
        for (x, &u) in d.left_maps[i].iter().enumerate() {
            cob_old[u] |= old[x];
        }
        let mut reaches_right = vec![false; d.cobordism_sizes[i]];
        for &u in &d.right_maps[i] {
            reaches_right[u] = true;
        }
        if (0..d.cobordism_sizes[i]).any(|u| !reaches_right[u] && !cob_old[u]) {
            return Err(EvasionError::Precondition(format!(
                "a pocket opened after time 0 closes before {}",
                run.zigzags.samples[i + 1]
            )));
        }
        old = d.right_maps[i].iter().map(|&u| cob_old[u]).collect();
    }
    Ok(())
}
