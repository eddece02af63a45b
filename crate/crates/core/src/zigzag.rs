//! Critical events of the uncovered region, interleaving sample times, and
//! the wide zigzag diagrams of components for the uncovered region, its
//! covered boundary, and the covered region.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::components::Labeling;
use crate::error::{EvasionError, Result};
use crate::limit::{Shape, ZigzagSetDiagram};
use crate::rasterize::{
    all_components, CobordismComplex, FiberComplex, GridSpec, Rasterizer, Region,
};
use crate::scenario::{Scenario, TimeBase};

/// Sign class of a boundary critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventType {
    N,
    D,
}

impl EventType {
    /// The same critical point read against the complementary region.
    pub fn swap(self) -> EventType {
        match self {
            EventType::N => EventType::D,
            EventType::D => EventType::N,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub window: (f64, f64),
    /// Grid coordinates `(i, j)` of the cell whose coverage flips.
    pub locus: (usize, usize),
    /// Type with respect to the uncovered region.
    pub type_x: EventType,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventList {
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventOptions {
    pub tol: f64,
    pub scan_samples: usize,
    /// Window width below which a located event is no longer refined.
    pub locus_width: f64,
}

impl Default for EventOptions {
    fn default() -> Self {
        EventOptions {
            tol: 1e-4,
            scan_samples: 512,
            locus_width: 1e-9,
        }
    }
}

type Signature = (usize, usize, usize);

fn signature(f: &FiberComplex) -> Signature {
    let [x, b, _] = all_components(f);
    (x.count, f.b1(), b.count)
}

fn signature_at(r: &Rasterizer, t: f64) -> Result<Signature> {
    Ok(signature(&r.fiber(t)?))
}

// a pocket on a line has two boundary points, so one event moves the boundary count by two
fn jump(a: Signature, b: Signature, boundary_step: usize) -> usize {
    a.0.abs_diff(b.0)
        .max(a.1.abs_diff(b.1))
        .max(a.2.abs_diff(b.2).div_ceil(boundary_step))
}

// windows of width ≤ tol inside [a, b] across which the signature changes
fn refine(
    r: &Rasterizer,
    tol: f64,
    boundary_step: usize,
    (a, sa): (f64, Signature),
    (b, sb): (f64, Signature),
    out: &mut Vec<(f64, f64)>,
) -> Result<()> {
    if b - a <= tol {
        if jump(sa, sb, boundary_step) > 1 {
            return Err(EvasionError::ResolutionTooCoarse(format!(
                "signature jumps from {sa:?} to {sb:?} within [{a}, {b}]"
            )));
        }
        out.push((a, b));
        return Ok(());
    }
    let m = 0.5 * (a + b);
    let sm = signature_at(r, m)?;
    if sm == sa {
        refine(r, tol, boundary_step, (m, sm), (b, sb), out)
    } else if sm == sb {
        refine(r, tol, boundary_step, (a, sa), (m, sm), out)
    } else {
        refine(r, tol, boundary_step, (a, sa), (m, sm), out)?;
        refine(r, tol, boundary_step, (m, sm), (b, sb), out)
    }
}

// shrinks a window while it still separates the two signatures
fn narrow(r: &Rasterizer, width: f64, (mut a, mut b): (f64, f64)) -> Result<(f64, f64)> {
    let sa = signature_at(r, a)?;
    let sb = signature_at(r, b)?;
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let sm = signature_at(r, m)?;
        if sm == sa {
            a = m;
        } else if sm == sb {
            b = m;
        } else {
            break;
        }
    }
    Ok((a, b))
}

/// Cells whose coverage differs between the two times, with the direction of the change.
fn flips(r: &Rasterizer, (a, b): (f64, f64)) -> Result<Vec<(usize, bool)>> {
    let fa = r.fiber(a)?;
    let fb = r.fiber(b)?;
    Ok((0..fa.uncovered.len())
        .filter(|&i| fa.uncovered[i] != fb.uncovered[i])
        .map(|i| (i, fa.uncovered[i]))
        .collect())
}

/// Type with respect to the uncovered region: `D` if the locus becomes covered
/// as time increases through the window, `N` if it becomes uncovered.
pub fn classify_event(
    s: &Scenario,
    g: &GridSpec,
    window: (f64, f64),
    locus: (usize, usize),
) -> Result<EventType> {
    classify_with(&Rasterizer::new(s, g), g, window, locus)
}

fn classify_with(
    r: &Rasterizer,
    g: &GridSpec,
    window: (f64, f64),
    locus: (usize, usize),
) -> Result<EventType> {
    let idx = g.index(locus.0, locus.1);
    let before = r.fiber(window.0)?.uncovered[idx];
    let after = r.fiber(window.1)?.uncovered[idx];
    match (before, after) {
        (true, false) => Ok(EventType::D),
        (false, true) => Ok(EventType::N),
        _ => Err(EvasionError::NotCoverageEvent(format!(
            "cell {locus:?} keeps its coverage over [{}, {}]",
            window.0, window.1
        ))),
    }
}

pub fn detect_events(s: &Scenario, g: &GridSpec, tol: f64) -> Result<EventList> {
    detect_events_with(
        s,
        g,
        &EventOptions {
            tol,
            ..EventOptions::default()
        },
    )
}

pub fn detect_events_with(s: &Scenario, g: &GridSpec, opts: &EventOptions) -> Result<EventList> {
    if !(opts.tol > 0.0) || opts.scan_samples < 1 {
        return Err(EvasionError::Precondition("tol must be positive".into()));
    }
    let r = Rasterizer::new(s, g);
    let n = opts.scan_samples;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let sigs = times
        .par_iter()
        .map(|&t| signature_at(&r, t))
        .collect::<Result<Vec<_>>>()?;
    let boundary_step = if s.dimension == 1 { 2 } else { 1 };
    let mut windows = Vec::new();
    for k in 0..n {
        if sigs[k] != sigs[k + 1] {
            refine(
                &r,
                opts.tol,
                boundary_step,
                (times[k], sigs[k]),
                (times[k + 1], sigs[k + 1]),
                &mut windows,
            )?;
        }
    }
    for w in windows.windows(2) {
        if w[1].0 - w[0].1 < opts.tol {
            return Err(EvasionError::SimultaneousEvents {
                t: w[0].1,
                tol: opts.tol,
            });
        }
    }
    if s.time_base.is_circle() {
        if let (Some(first), Some(last)) = (windows.first(), windows.last()) {
            if windows.len() > 1 && first.0 + 1.0 - last.1 < opts.tol {
                return Err(EvasionError::SimultaneousEvents {
                    t: last.1,
                    tol: opts.tol,
                });
            }
        }
    }
    let events = windows
        .into_par_iter()
        .map(|w| {
            let w = narrow(&r, opts.locus_width, w)?;
            let fl = flips(&r, w)?;
            let Some(&(first, dir)) = fl.first() else {
                return Err(EvasionError::NotCoverageEvent(format!(
                    "no cell flips over [{}, {}]",
                    w.0, w.1
                )));
            };
            if fl.iter().any(|&(_, d)| d != dir) {
                return Err(EvasionError::NotCoverageEvent(format!(
                    "cells flip in both directions over [{}, {}]",
                    w.0, w.1
                )));
            }
            let locus = g.coords(first);
            let type_x = classify_with(&r, g, w, locus)?;
            Ok(Event {
                window: w,
                locus,
                type_x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EventList { events })
}

const DYADIC: f64 = (1u64 << 20) as f64;

fn dyadic(t: f64) -> f64 {
    (t * DYADIC).round() / DYADIC
}

/// Sample times `s_0 < … < s_n` with one event between consecutive samples.
/// On a circle `s_n = s_0 + 1` denotes the same point as `s_0`.
pub fn interleave(events: &EventList, base: TimeBase) -> Vec<f64> {
    let ev = &events.events;
    let mid = |i: usize| dyadic(0.5 * (ev[i].window.1 + ev[i + 1].window.0));
    match base {
        TimeBase::Interval => {
            let mut out = vec![0.0];
            out.extend((0..ev.len().saturating_sub(1)).map(mid));
            out.push(1.0);
            out
        }
        TimeBase::Circle => {
            if ev.is_empty() {
                return vec![0.0, 1.0];
            }
            let wrap = dyadic(0.5 * (ev[ev.len() - 1].window.1 + ev[0].window.0 + 1.0));
            let wrap = if wrap >= 1.0 { wrap - 1.0 } else { wrap };
            let mut out: Vec<f64> = (0..ev.len() - 1).map(mid).collect();
            out.push(wrap);
            out.sort_by(f64::total_cmp);
            out.push(out[0] + 1.0);
            out
        }
    }
}

/// Rasterized fibers and cobordisms at the given samples, with the component
/// diagrams of all three regions.
#[derive(Debug, Clone)]
pub struct Zigzags {
    pub shape: Shape,
    pub samples: Vec<f64>,
    pub fibers: Vec<FiberComplex>,
    pub cobordisms: Vec<CobordismComplex>,
    pub fiber_labels: [Vec<Labeling>; 3],
    pub cobordism_labels: [Vec<Labeling>; 3],
    pub diagrams: [ZigzagSetDiagram; 3],
}

pub fn region_slot(r: Region) -> usize {
    match r {
        Region::Uncovered => 0,
        Region::CoveredBoundary => 1,
        Region::Covered => 2,
    }
}

// sends each fiber component to the spacetime component containing it; the
// fiber's labeled positions sit at offset `slice · stride` in the cobordism
fn inclusion(fl: &Labeling, cl: &Labeling, slice: usize) -> Result<Vec<usize>> {
    let stride = fl.labels.len();
    let mut out = vec![usize::MAX; fl.count];
    for (p, &x) in fl.labels.iter().enumerate() {
        if x == crate::components::NO_LABEL {
            continue;
        }
        let x = x as usize;
        let u = cl.label(slice * stride + p).ok_or_else(|| {
            EvasionError::IncompatibleDiagram(format!(
                "fiber position {p} lies in no cobordism component"
            ))
        })?;
        if out[x] == usize::MAX {
            out[x] = u;
        } else if out[x] != u {
            return Err(EvasionError::IncompatibleDiagram(format!(
                "fiber component {x} meets cobordism components {} and {u}",
                out[x]
            )));
        }
    }
    Ok(out)
}

pub fn build_zigzags(s: &Scenario, samples: &[f64], g: &GridSpec) -> Result<Zigzags> {
    let circle = s.time_base.is_circle();
    let n = samples.len() - 1;
    let nfib = if circle { n } else { n + 1 };
    let r = Rasterizer::new(s, g);
    let fibers = samples[..nfib]
        .par_iter()
        .map(|&t| r.fiber(t))
        .collect::<Result<Vec<_>>>()?;
    let cobordisms = (0..n)
        .map(|i| {
            r.cobordism(
                samples[i],
                samples[i + 1],
                g.slices_for(samples[i + 1] - samples[i]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let shape = if circle {
        Shape::Circle
    } else {
        Shape::Interval
    };
    let mut fiber_labels: [Vec<Labeling>; 3] = Default::default();
    let mut cobordism_labels: [Vec<Labeling>; 3] = Default::default();
    for ls in fibers.par_iter().map(all_components).collect::<Vec<_>>() {
        for (slot, l) in ls.into_iter().enumerate() {
            fiber_labels[slot].push(l);
        }
    }
    for ls in cobordisms
        .par_iter()
        .map(all_components)
        .collect::<Vec<_>>()
    {
        for (slot, l) in ls.into_iter().enumerate() {
            cobordism_labels[slot].push(l);
        }
    }
    let mut diagrams = Vec::with_capacity(3);
    for slot in 0..3 {
        let (fl, cl) = (&fiber_labels[slot], &cobordism_labels[slot]);
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for i in 0..n {
            let j = if circle { (i + 1) % n } else { i + 1 };
            let last = cobordisms[i].slices.len() - 1;
            left.push(inclusion(&fl[i], &cl[i], 0)?);
            right.push(inclusion(&fl[j], &cl[i], last)?);
        }
        diagrams.push(ZigzagSetDiagram::new(
            shape,
            fl.iter().map(|l| l.count).collect(),
            cl.iter().map(|l| l.count).collect(),
            left,
            right,
        )?);
    }
    let diagrams: [ZigzagSetDiagram; 3] = diagrams.try_into().expect("three regions");
    Ok(Zigzags {
        shape,
        samples: samples.to_vec(),
        fibers,
        cobordisms,
        fiber_labels,
        cobordism_labels,
        diagrams,
    })
}

pub fn build_zigzag(
    s: &Scenario,
    samples: &[f64],
    g: &GridSpec,
    region: Region,
) -> Result<ZigzagSetDiagram> {
    let mut z = build_zigzags(s, samples, g)?;
    Ok(std::mem::replace(
        &mut z.diagrams[region_slot(region)],
        ZigzagSetDiagram {
            shape: z.shape,
            fiber_sizes: Vec::new(),
            cobordism_sizes: Vec::new(),
            left_maps: Vec::new(),
            right_maps: Vec::new(),
        },
    ))
}

/// Index of the cobordism `[s_i, s_{i+1}]` containing each event.
pub fn events_per_cobordism(events: &EventList, samples: &[f64]) -> Vec<Option<usize>> {
    let n = samples.len() - 1;
    let mut out = vec![None; n];
    for (e, ev) in events.events.iter().enumerate() {
        let c = 0.5 * (ev.window.0 + ev.window.1);
        let hit = (0..n).find(|&i| {
            let (a, b) = (samples[i], samples[i + 1]);
            (a..=b).contains(&c) || (a..=b).contains(&(c + 1.0))
        });
        if let Some(i) = hit {
            out[i] = Some(e);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin_scenario;

    fn ev(a: f64, b: f64) -> Event {
        Event {
            window: (a, b),
            locus: (0, 0),
            type_x: EventType::D,
        }
    }

    #[test]
    fn interleave_interval() {
        let none = EventList::default();
        assert_eq!(interleave(&none, TimeBase::Interval), vec![0.0, 1.0]);
        let one = EventList {
            events: vec![ev(0.49, 0.51)],
        };
        assert_eq!(interleave(&one, TimeBase::Interval), vec![0.0, 1.0]);
        let two = EventList {
            events: vec![ev(0.29, 0.31), ev(0.69, 0.71)],
        };
        assert_eq!(interleave(&two, TimeBase::Interval), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn interleave_circle_wraps() {
        let two = EventList {
            events: vec![ev(0.1, 0.1001), ev(0.5, 0.5001)],
        };
        let s = interleave(&two, TimeBase::Circle);
        assert_eq!(s.len(), 3);
        assert!((s[0] - 0.30005).abs() < 1e-6);
        assert!((s[1] - 0.80005).abs() < 1e-6);
        assert_eq!(s[2], s[0] + 1.0);
        assert_eq!((s[2] - 1.0), s[0]);
        assert_eq!(
            interleave(&EventList::default(), TimeBase::Circle),
            vec![0.0, 1.0]
        );
    }

    #[test]
    fn static_scenarios_have_no_events() {
        for name in ["empty", "full"] {
            let s = builtin_scenario(name, 0).unwrap();
            let g = GridSpec::new(&s, 48, 8).unwrap();
            assert!(detect_events(&s, &g, 1e-4).unwrap().events.is_empty());
        }
    }

    #[test]
    fn split_has_one_pinching_event() {
        let s = builtin_scenario("split", 0).unwrap();
        let g = GridSpec::default_for(&s);
        let ev = detect_events(&s, &g, 1e-4).unwrap();
        assert_eq!(ev.events.len(), 1);
        let e = ev.events[0];
        assert!(e.window.1 - e.window.0 <= 1e-4);
        assert_eq!(e.type_x, EventType::D);
        assert_eq!(e.type_x.swap(), EventType::N);
    }

    #[test]
    fn close_has_a_closing_and_an_opening() {
        let s = builtin_scenario("close", 0).unwrap();
        let g = GridSpec::default_for(&s);
        let ev = detect_events(&s, &g, 1e-4).unwrap();
        let types: Vec<EventType> = ev.events.iter().map(|e| e.type_x).collect();
        assert_eq!(types, vec![EventType::D, EventType::N]);
        assert!(ev.events[0].window.1 < ev.events[1].window.0);
    }

    #[test]
    fn classification_needs_a_transition() {
        let s = builtin_scenario("empty", 0).unwrap();
        let g = GridSpec::new(&s, 32, 4).unwrap();
        let c = g.index(16, 16);
        let locus = g.coords(c);
        assert!(matches!(
            classify_event(&s, &g, (0.2, 0.3), locus),
            Err(EvasionError::NotCoverageEvent(_))
        ));
    }

    #[test]
    fn split_diagram_shapes() {
        let s = builtin_scenario("split", 0).unwrap();
        let g = GridSpec::default_for(&s);
        let samples = interleave(&detect_events(&s, &g, 1e-4).unwrap(), s.time_base);
        let z = build_zigzag(&s, &samples, &g, Region::Uncovered).unwrap();
        assert_eq!(z.fiber_sizes, vec![1, 2]);
        assert_eq!(z.cobordism_sizes, vec![1]);
    }

    #[test]
    fn empty_diagram_is_all_singletons() {
        let s = builtin_scenario("empty", 0).unwrap();
        let g = GridSpec::new(&s, 48, 16).unwrap();
        let samples = interleave(&detect_events(&s, &g, 1e-4).unwrap(), s.time_base);
        let z = build_zigzags(&s, &samples, &g).unwrap();
        for d in &z.diagrams {
            assert_eq!(d.fiber_sizes, vec![1, 1]);
            assert_eq!(d.cobordism_sizes, vec![1]);
            assert_eq!(d.left_maps, vec![vec![0]]);
        }
    }
}
