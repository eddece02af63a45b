use rayon::prelude::*;

use super::{AnalysisOptions, AnalysisReport, FiberDiagnostic, Mode};
use crate::components::label_grid;
use crate::error::{EvasionError, Result};
use crate::rasterize::{
    adjacency_of, rasterize_fiber, slice_times, FiberComplex, GridSpec, Region,
};
use crate::scenario::Scenario;

fn grow(g: &GridSpec, sl: &FiberComplex, prev: &[bool]) -> Vec<bool> {
    let mut reach = vec![false; g.len()];
    let mut stack: Vec<usize> = (0..g.len())
        .filter(|&c| prev[c] && sl.uncovered[c])
        .collect();
    for &c in &stack {
        reach[c] = true;
    }
    while let Some(c) = stack.pop() {
        for m in g.neighbors4(c) {
            if sl.uncovered[m] && !reach[m] {
                reach[m] = true;
                stack.push(m);
            }
        }
    }
    reach
}

/// Brute-force reachability over `slices` uniform time slices: entry
/// `[a][b]` says whether some time-monotone path of uncovered cells leads
/// from component `a` at time 0 to component `b` at the final time (time 0
/// again on a circle).
pub fn oracle_reachability(s: &Scenario, g: &GridSpec, slices: usize) -> Result<Vec<Vec<bool>>> {
    if slices < 2 {
        return Err(EvasionError::Precondition(
            "the oracle needs at least two slices".into(),
        ));
    }
    let fibers = slice_times(0.0, 1.0, slices)
        .into_par_iter()
        .map(|t| rasterize_fiber(s, t, g))
        .collect::<Result<Vec<_>>>()?;
    let adj = adjacency_of(Region::Uncovered).0;
    let start = label_grid(&fibers[0].uncovered, g.nx, g.ny, adj);
    let last = fibers.len() - 1;
    let end = if s.time_base.is_circle() {
        start.clone()
    } else {
        label_grid(&fibers[last].uncovered, g.nx, g.ny, adj)
    };
    Ok(start
        .members()
        .into_par_iter()
        .map(|cells| {
            let mut reach = vec![false; g.len()];
            for c in cells {
                reach[c] = true;
            }
            for sl in &fibers[1..] {
                reach = grow(g, sl, &reach);
            }
            let mut row = vec![false; end.count];
            for (c, &r) in reach.iter().enumerate() {
                if let (true, Some(b)) = (r, end.label(c)) {
                    row[b] = true;
                }
            }
            row
        })
        .collect())
}

pub fn reachable_pairs(m: &[Vec<bool>]) -> usize {
    m.iter().flatten().filter(|&&r| r).count()
}

pub fn analyze_oracle(
    s: &Scenario,
    g: &GridSpec,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let m = oracle_reachability(s, g, opts.oracle_slices)?;
    let exists = if s.time_base.is_circle() {
        (0..m.len()).any(|a| m[a][a])
    } else {
        m.iter().flatten().any(|&r| r)
    };
    let fibers = [0.0, 1.0]
        .iter()
        .map(|&t| {
            let f = rasterize_fiber(s, t, g)?;
            Ok(FiberDiagnostic {
                t,
                pi0: label_grid(&f.uncovered, g.nx, g.ny, adjacency_of(Region::Uncovered).0).count,
                b1: Some(f.b1()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalysisReport {
        mode: Mode::Oracle,
        dimension: s.dimension,
        exists,
        limit_cardinality: None,
        limit_elements: Vec::new(),
        witnesses: Vec::new(),
        fibers,
        events: Vec::new(),
        truncated_elements: false,
        truncated_witnesses: false,
        reachability: Some(m),
    })
}
