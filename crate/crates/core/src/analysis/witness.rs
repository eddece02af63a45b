use std::collections::{HashMap, VecDeque};

use super::AnalysisOptions;
use crate::components::Labeling;
use crate::error::{EvasionError, Result};
use crate::rasterize::{rasterize_cobordism, rasterize_fiber, FiberComplex, GridSpec, Region};
use crate::scenario::{Point, Scenario};
use crate::zigzag::{build_zigzags, detect_events_with, interleave, region_slot, Zigzags};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSample {
    pub t: f64,
    pub cell: usize,
    /// Center of `cell`.
    pub position: Point,
    /// Time of the slice in which `cell` is uncovered.
    pub slice_time: f64,
}

/// A time-monotone path of uncovered cells realizing one limit element.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPath {
    pub element: Vec<usize>,
    pub samples: Vec<WitnessSample>,
}

const START: usize = usize::MAX;
const TEMPORAL: usize = usize::MAX - 1;
const UNSEEN: usize = usize::MAX - 2;

// breadth-first flood of `free` from `seeds`, recording parents
fn flood(g: &GridSpec, free: &[bool], parent: &mut [usize], queue: &mut VecDeque<usize>) {
    while let Some(c) = queue.pop_front() {
        for m in g.neighbors4(c) {
            if free[m] && parent[m] == UNSEEN {
                parent[m] = c;
                queue.push_back(m);
            }
        }
    }
}

// path of (slice, cell) from `seed` in the first slice to a cell labeled
// `target` in the last one, moving forward in time or sideways within a slice
fn sweep(
    g: &GridSpec,
    slices: &[FiberComplex],
    seed: usize,
    end: &Labeling,
    target: usize,
) -> Option<Vec<(usize, usize)>> {
    let n = g.len();
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(slices.len());
    for (k, sl) in slices.iter().enumerate() {
        let mut parent = vec![UNSEEN; n];
        let mut queue = VecDeque::new();
        if k == 0 {
            if sl.uncovered[seed] {
                parent[seed] = START;
                queue.push_back(seed);
            }
        } else {
            let prev = &parents[k - 1];
            for c in 0..n {
                if sl.uncovered[c] && prev[c] != UNSEEN {
                    parent[c] = TEMPORAL;
                    queue.push_back(c);
                }
            }
        }
        if queue.is_empty() {
            return None;
        }
        flood(g, &sl.uncovered, &mut parent, &mut queue);
        parents.push(parent);
    }
    let last = slices.len() - 1;
    // the flood keeps each arrival's component, so a cell entered from the
    // previous slice exists whenever any reached cell has the target label
    let entered = if last == 0 { START } else { TEMPORAL };
    let stop = (0..n).find(|&c| parents[last][c] == entered && end.label(c) == Some(target))?;
    let mut path = vec![(last, stop)];
    let (mut k, mut c) = (last, stop);
    loop {
        match parents[k][c] {
            START => break,
            TEMPORAL => k -= 1,
            p => c = p,
        }
        path.push((k, c));
    }
    path.reverse();
    Some(path)
}

// shortest path between two cells of one uncovered component
fn planar_path(g: &GridSpec, free: &[bool], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent = vec![UNSEEN; g.len()];
    parent[from] = START;
    let mut queue = VecDeque::from([from]);
    flood(g, free, &mut parent, &mut queue);
    if parent[to] == UNSEEN {
        return None;
    }
    let mut path = vec![to];
    let mut c = to;
    while parent[c] != START {
        c = parent[c];
        path.push(c);
    }
    path.reverse();
    Some(path)
}

/// Builds a witness for `element` from an already computed set of zigzags.
pub fn extract_witness_in(
    s: &Scenario,
    g: &GridSpec,
    z: &Zigzags,
    element: &[usize],
    opts: &AnalysisOptions,
) -> Result<WitnessPath> {
    let slot = region_slot(Region::Uncovered);
    let d = &z.diagrams[slot];
    if !d.is_element(element) {
        return Err(EvasionError::Precondition(format!(
            "{element:?} is not a limit element"
        )));
    }
    let labels = &z.fiber_labels[slot];
    let n = z.cobordisms.len();
    let start = labels[0].representatives()[element[0]];
    let mut segments: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut seed = start;
    for i in 0..n {
        let j = d.right_fiber(i);
        let (a, b) = z.cobordisms[i].interval;
        let base = z.cobordisms[i].slices.len();
        let mut fine = base;
        let path = loop {
            let rasterized;
            let slices = if fine == base {
                &z.cobordisms[i].slices
            } else {
                rasterized = rasterize_cobordism(s, a, b, &g.with_fine_samples(fine))?;
                &rasterized.slices
            };
            if let Some(p) = sweep(g, slices, seed, &labels[j], element[j]) {
                break p
                    .into_iter()
                    .map(|(k, c)| (slices[k].time, c))
                    .collect::<Vec<_>>();
            }
            if fine >= opts.max_fine_samples {
                return Err(EvasionError::NoMonotoneLift(format!(
                    "element {element:?} has no monotone path over [{a}, {b}] with {fine} slices"
                )));
            }
            fine = (fine * 2).min(opts.max_fine_samples.max(base));
        };
        seed = path.last().expect("nonempty path").1;
        for (t, c) in path {
            match segments.last_mut() {
                Some((st, cells)) if *st == t => {
                    if cells.last() != Some(&c) {
                        cells.push(c);
                    }
                }
                _ => segments.push((t, vec![c])),
            }
        }
    }
    if z.shape == crate::limit::Shape::Circle {
        // start from the arrival cell so the loop closes at s_0
        let cells = &mut segments[0].1;
        let exit = *cells.last().expect("nonempty path");
        *cells = planar_path(g, &z.fibers[0].uncovered, seed, exit).ok_or_else(|| {
            EvasionError::NoMonotoneLift(format!("cannot close the loop for element {element:?}"))
        })?;
    }
    Ok(WitnessPath {
        element: element.to_vec(),
        samples: micro_times(g, &segments),
    })
}

// spreads the cells of each slice over the gap to the next slice
fn micro_times(g: &GridSpec, segments: &[(f64, Vec<usize>)]) -> Vec<WitnessSample> {
    let mut out = Vec::new();
    for (k, (t, cells)) in segments.iter().enumerate() {
        let gap = match (segments.get(k + 1), k.checked_sub(1)) {
            (Some((next, _)), _) => next - t,
            (None, Some(p)) => t - segments[p].0,
            (None, None) => 1.0,
        };
        let step = gap / (cells.len() + 1) as f64;
        for (m, &c) in cells.iter().enumerate() {
            out.push(WitnessSample {
                t: t + m as f64 * step,
                cell: c,
                position: g.cell_center(c),
                slice_time: *t,
            });
        }
    }
    out
}

/// Runs the direct pipeline far enough to extract a witness for `element`.
pub fn extract_witness(
    s: &Scenario,
    g: &GridSpec,
    element: &[usize],
    opts: &AnalysisOptions,
) -> Result<WitnessPath> {
    let events = detect_events_with(s, g, &opts.events)?;
    let samples = interleave(&events, s.time_base);
    let z = build_zigzags(s, &samples, g)?;
    extract_witness_in(s, g, &z, element, opts)
}

/// Checks that every sample sits in a cell uncovered at its slice time, that
/// consecutive cells coincide or share a face, and that time increases.
pub fn verify_witness(
    s: &Scenario,
    g: &GridSpec,
    w: &WitnessPath,
) -> std::result::Result<(), String> {
    let mut cache: HashMap<u64, FiberComplex> = HashMap::new();
    for (k, smp) in w.samples.iter().enumerate() {
        let key = smp.slice_time.to_bits();
        if !cache.contains_key(&key) {
            let f = rasterize_fiber(s, smp.slice_time, g).map_err(|e| e.to_string())?;
            cache.insert(key, f);
        }
        if !cache[&key].uncovered[smp.cell] {
            return Err(format!(
                "sample {k} at t = {} sits in a covered cell",
                smp.t
            ));
        }
        if let Some(prev) = k.checked_sub(1).map(|p| &w.samples[p]) {
            if !(smp.t > prev.t) {
                return Err(format!("time does not increase at sample {k}"));
            }
            if smp.cell != prev.cell && !g.neighbors4(prev.cell).any(|m| m == smp.cell) {
                return Err(format!(
                    "sample {k} jumps from cell {} to cell {}",
                    prev.cell, smp.cell
                ));
            }
        }
    }
    Ok(())
}
