use num_traits::Zero;
use rayon::prelude::*;

use super::witness::extract_witness_in;
use super::{AnalysisOptions, AnalysisReport, FiberDiagnostic, Mode};
use crate::error::{EvasionError, Result};
use crate::limit::{inverse_limit, LimitResult};
use crate::rasterize::{GridSpec, Region};
use crate::scenario::Scenario;
use crate::zigzag::{
    build_zigzags, detect_events_with, events_per_cobordism, interleave, region_slot, EventList,
    EventType, Zigzags,
};

/// Everything the direct pipeline computes, for reuse by other modes.
#[derive(Debug, Clone)]
pub struct DirectAnalysis {
    pub events: EventList,
    pub cobordism_events: Vec<Option<usize>>,
    pub zigzags: Zigzags,
    pub limit: LimitResult,
}

// injective, and onto every element that the other map also misses
fn embeds_onto_ends(map: &[usize], other: &[usize], target: usize) -> bool {
    let mut seen = vec![false; target];
    if !map.iter().all(|&u| !std::mem::replace(&mut seen[u], true)) {
        return false;
    }
    for &u in other {
        if !seen[u] {
            return false;
        }
    }
    true
}

/// The fiber each cobordism retracts onto must embed bijectively; without an
/// event both must. Components meeting neither end fiber are ignored: they
/// carry no section and do not change the limit.
pub fn check_retractions(
    z: &Zigzags,
    events: &EventList,
    cobordism_events: &[Option<usize>],
) -> Result<()> {
    let d = &z.diagrams[region_slot(Region::Uncovered)];
    for (i, ev) in cobordism_events.iter().enumerate() {
        let size = d.cobordism_sizes[i];
        let left = embeds_onto_ends(&d.left_maps[i], &d.right_maps[i], size);
        let right = embeds_onto_ends(&d.right_maps[i], &d.left_maps[i], size);
        let ok = match ev.map(|e| events.events[e].type_x) {
            None => left && right,
            Some(EventType::D) => left,
            Some(EventType::N) => right,
        };
        if !ok {
            return Err(EvasionError::ResolutionTooCoarse(format!(
                "cobordism {i} over [{}, {}] does not retract onto its expected end",
                z.samples[i],
                z.samples[i + 1]
            )));
        }
    }
    Ok(())
}

/// Events, zigzags, and the limit. When some cobordism fails its retraction
/// check the event scan is repeated on a denser grid of times, up to
/// `opts.max_scan_samples`.
pub fn run_direct(s: &Scenario, g: &GridSpec, opts: &AnalysisOptions) -> Result<DirectAnalysis> {
    let mut events_opts = opts.events;
    loop {
        let events = detect_events_with(s, g, &events_opts)?;
        let samples = interleave(&events, s.time_base);
        let cobordism_events = events_per_cobordism(&events, &samples);
        let zigzags = build_zigzags(s, &samples, g)?;
        match check_retractions(&zigzags, &events, &cobordism_events) {
            Ok(()) => {
                let limit = inverse_limit(
                    &zigzags.diagrams[region_slot(Region::Uncovered)],
                    opts.element_cap,
                );
                return Ok(DirectAnalysis {
                    events,
                    cobordism_events,
                    zigzags,
                    limit,
                });
            }
            Err(e) if events_opts.scan_samples >= opts.max_scan_samples => return Err(e),
            Err(_) => {
                events_opts.scan_samples = (events_opts.scan_samples * 4).min(opts.max_scan_samples)
            }
        }
    }
}

pub(crate) fn fiber_diagnostics(z: &Zigzags) -> Vec<FiberDiagnostic> {
    z.fibers
        .iter()
        .zip(&z.fiber_labels[region_slot(Region::Uncovered)])
        .map(|(f, l)| FiberDiagnostic {
            t: f.time,
            pi0: l.count,
            b1: Some(f.b1()),
        })
        .collect()
}

pub fn analyze_direct(
    s: &Scenario,
    g: &GridSpec,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let run = run_direct(s, g, opts)?;
    let chosen = &run.limit.elements[..run.limit.elements.len().min(opts.witness_cap)];
    let witnesses = chosen
        .par_iter()
        .map(|el| extract_witness_in(s, g, &run.zigzags, el, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalysisReport {
        mode: Mode::Direct,
        dimension: s.dimension,
        exists: !run.limit.cardinality.is_zero(),
        truncated_witnesses: run.limit.elements.len() > witnesses.len(),
        limit_cardinality: Some(run.limit.cardinality.clone()),
        limit_elements: run.limit.elements.clone(),
        witnesses,
        fibers: fiber_diagnostics(&run.zigzags),
        events: run.events.events.clone(),
        truncated_elements: run.limit.truncated,
        reachability: None,
    })
}
