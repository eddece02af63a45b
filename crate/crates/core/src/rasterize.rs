//! Cell-center rasterization of the uncovered region, one time slice at a time.
//!
//! Cells are indexed row-major, `idx = j·nx + i`. The grid has one margin cell
//! outside the domain disk on every side, so the frame never meets the domain.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::components::{label_grid, label_stack, Adjacency, Labeling, Temporal};
use crate::error::{EvasionError, Result};
use crate::scenario::{Point, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub cell_size: f64,
    /// Lower-left corner of the bounding box.
    pub origin: Point,
    pub nx: usize,
    pub ny: usize,
    pub fine_time_samples: usize,
    /// Radius of the morphological opening applied to the uncovered region.
    pub smoothing_radius: f64,
}

pub const DEFAULT_RESOLUTION: usize = 128;
pub const DEFAULT_FINE_SAMPLES: usize = 256;
pub const MIN_COBORDISM_SLICES: usize = 16;

impl GridSpec {
    /// `resolution` cells across the domain diameter.
    pub fn new(s: &Scenario, resolution: usize, fine_time_samples: usize) -> Result<GridSpec> {
        if resolution < 2 {
            return Err(EvasionError::Precondition(
                "resolution must be at least 2".into(),
            ));
        }
        if fine_time_samples < 2 {
            return Err(EvasionError::Precondition(
                "fine_time_samples must be at least 2".into(),
            ));
        }
        let h = 2.0 * s.domain.radius / resolution as f64;
        let nx = resolution + 2;
        let (ny, oy) = if s.dimension == 2 {
            (nx, s.domain.center[1] - s.domain.radius - h)
        } else {
            (1, -0.5 * h)
        };
        Ok(GridSpec {
            cell_size: h,
            origin: [s.domain.center[0] - s.domain.radius - h, oy],
            nx,
            ny,
            fine_time_samples,
            smoothing_radius: 1.5 * h,
        })
    }

    /// Grid whose cell size is at most `cell_size`.
    pub fn with_cell_size(
        s: &Scenario,
        cell_size: f64,
        fine_time_samples: usize,
    ) -> Result<GridSpec> {
        if !(cell_size > 0.0) {
            return Err(EvasionError::Precondition(
                "cell_size must be positive".into(),
            ));
        }
        let resolution = (2.0 * s.domain.radius / cell_size).ceil() as usize;
        GridSpec::new(s, resolution.max(2), fine_time_samples)
    }

    pub fn default_for(s: &Scenario) -> GridSpec {
        GridSpec::new(s, DEFAULT_RESOLUTION, DEFAULT_FINE_SAMPLES).expect("default grid")
    }

    pub fn with_smoothing(mut self, radius: f64) -> GridSpec {
        self.smoothing_radius = radius;
        self
    }

    pub fn with_fine_samples(mut self, n: usize) -> GridSpec {
        self.fine_time_samples = n;
        self
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    /// Slices used for a cobordism of the given duration: the same spacing
    /// as `fine_time_samples` slices over the whole time base, with at least
    /// `MIN_COBORDISM_SLICES`.
    pub fn slices_for(&self, duration: f64) -> usize {
        let n = (self.fine_time_samples as f64 * duration).ceil() as usize + 1;
        n.clamp(
            MIN_COBORDISM_SLICES.min(self.fine_time_samples),
            self.fine_time_samples,
        )
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_center(&self, idx: usize) -> Point {
        let (i, j) = self.coords(idx);
        [
            self.origin[0] + (i as f64 + 0.5) * self.cell_size,
            self.origin[1] + (j as f64 + 0.5) * self.cell_size,
        ]
    }

    pub fn on_frame(&self, idx: usize) -> bool {
        let (i, j) = self.coords(idx);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Face neighbors inside the grid.
    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.coords(idx);
        let cand = [
            (i > 0).then(|| idx - 1),
            (i + 1 < self.nx).then(|| idx + 1),
            (j > 0).then(|| idx - self.nx),
            (j + 1 < self.ny).then(|| idx + self.nx),
        ];
        cand.into_iter().flatten()
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

const EPS: f64 = 1e-12;

/// Pointwise coverage test for one time instant.
///
/// Without smoothing a point is uncovered iff it lies strictly inside the
/// unfenced disk and strictly farther than `r` from every sensor. With
/// smoothing radius `ρ > 0` it is uncovered iff it lies within `ρ` of the set
/// `E` of points at distance `≥ r + ρ` from every sensor and `≤ R − w − ρ`
/// from the domain center, which is the opening of the unsmoothed region.
pub struct Coverage<'a> {
    center: Point,
    inner_radius: f64,
    r: f64,
    rho: f64,
    one_dimensional: bool,
    sensors: &'a [Point],
}

impl<'a> Coverage<'a> {
    pub fn new(s: &Scenario, rho: f64, sensors: &'a [Point]) -> Self {
        Coverage {
            center: s.domain.center,
            inner_radius: s.inner_radius(),
            r: s.sensing_radius,
            rho,
            one_dimensional: s.dimension == 1,
            sensors,
        }
    }

    pub fn is_uncovered(&self, p: Point) -> bool {
        if dist(p, self.center) >= self.inner_radius {
            return false;
        }
        let reach = self.r + 2.0 * self.rho;
        let mut near: Vec<Point> = Vec::new();
        for &s in self.sensors {
            let d = dist(p, s);
            if d <= self.r {
                return false;
            }
            if d < reach {
                near.push(s);
            }
        }
        if self.rho <= 0.0 {
            return true;
        }
        let r1 = self.r + self.rho;
        let big = self.inner_radius - self.rho;
        if big <= 0.0 {
            return false;
        }
        // sensors outside `near` are at least r + ρ away from every candidate
        let in_e = |q: Point| {
            dist(q, self.center) <= big + EPS && near.iter().all(|&s| dist(q, s) >= r1 - EPS)
        };
        let close = |q: Point| dist(p, q) <= self.rho + EPS && in_e(q);
        if in_e(p) {
            return true;
        }
        let mut circles: Vec<(Point, f64)> = near.iter().map(|&s| (s, r1)).collect();
        circles.push((self.center, big));
        if self.one_dimensional {
            return circles
                .iter()
                .any(|&(o, rad)| close([o[0] - rad, 0.0]) || close([o[0] + rad, 0.0]));
        }
        for &(o, rad) in &circles {
            let d = dist(p, o);
            if d > 0.0 {
                let u = [(p[0] - o[0]) / d, (p[1] - o[1]) / d];
                for sign in [1.0, -1.0] {
                    if close([o[0] + sign * rad * u[0], o[1] + sign * rad * u[1]]) {
                        return true;
                    }
                }
            }
        }
        for a in 0..circles.len() {
            for b in a + 1..circles.len() {
                for q in circle_intersections(circles[a], circles[b]) {
                    if close(q) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn circle_intersections((c0, r0): (Point, f64), (c1, r1): (Point, f64)) -> Vec<Point> {
    let d = dist(c0, c1);
    if d == 0.0 || d > r0 + r1 || d < (r0 - r1).abs() {
        return Vec::new();
    }
    let a = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
    let h = (r0 * r0 - a * a).max(0.0).sqrt();
    let m = [
        c0[0] + a * (c1[0] - c0[0]) / d,
        c0[1] + a * (c1[1] - c0[1]) / d,
    ];
    let off = [-(c1[1] - c0[1]) * h / d, (c1[0] - c0[0]) * h / d];
    vec![
        [m[0] + off[0], m[1] + off[1]],
        [m[0] - off[0], m[1] - off[1]],
    ]
}

/// One time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberComplex {
    pub time: f64,
    pub nx: usize,
    pub ny: usize,
    pub uncovered: Vec<bool>,
    /// Cells whose center lies in the closed domain disk and is not uncovered.
    pub covered: Vec<bool>,
    /// Covered cells with an uncovered face neighbor.
    pub covered_boundary: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Uncovered,
    CoveredBoundary,
    Covered,
}

impl FiberComplex {
    pub fn uncovered_count(&self) -> usize {
        self.uncovered.iter().filter(|&&u| u).count()
    }

    /// Number of bounded components of the complement of the uncovered cells.
    pub fn b1(&self) -> usize {
        let complement: Vec<bool> = self.uncovered.iter().map(|&u| !u).collect();
        bounded_components(&complement, self.nx, self.ny, Adjacency::Eight)
    }
}

/// Components of `mask` that avoid the grid frame.
pub(crate) fn bounded_components(mask: &[bool], nx: usize, ny: usize, adj: Adjacency) -> usize {
    let l = label_grid(mask, nx, ny, adj);
    let mut touches = vec![false; l.count];
    for (idx, &lab) in l.labels.iter().enumerate() {
        if lab == crate::components::NO_LABEL {
            continue;
        }
        let (i, j) = (idx % nx, idx / nx);
        if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
            touches[lab as usize] = true;
        }
    }
    touches.iter().filter(|&&t| !t).count()
}

/// Rasterizes slices of one scenario on one grid, reusing the coverage of the
/// sensor-free domain: only cells within reach of a sensor are re-evaluated.
pub struct Rasterizer<'a> {
    s: &'a Scenario,
    g: GridSpec,
    in_disk: Vec<bool>,
    template: Vec<bool>,
}

impl<'a> Rasterizer<'a> {
    pub fn new(s: &'a Scenario, g: &GridSpec) -> Self {
        let cov = Coverage::new(s, g.smoothing_radius, &[]);
        let n = g.len();
        let mut in_disk = vec![false; n];
        let mut template = vec![false; n];
        for idx in 0..n {
            let p = g.cell_center(idx);
            if dist(p, s.domain.center) <= s.domain.radius {
                in_disk[idx] = true;
                template[idx] = cov.is_uncovered(p);
            }
        }
        Rasterizer {
            s,
            g: *g,
            in_disk,
            template,
        }
    }

    pub fn fiber(&self, t: f64) -> Result<FiberComplex> {
        let (s, g) = (self.s, &self.g);
        let tn = s.time_base.normalize(t)?;
        let sensors = s.positions_at(tn)?;
        let cov = Coverage::new(s, g.smoothing_radius, &sensors);
        let mut uncovered = self.template.clone();
        // sensors farther than this from a point cannot affect it
        let reach = s.sensing_radius + 2.0 * g.smoothing_radius + EPS;
        let span = |lo: f64, hi: f64, origin: f64, cells: usize| {
            let a = ((lo - origin) / g.cell_size - 0.5).floor().max(0.0) as usize;
            let b = ((hi - origin) / g.cell_size - 0.5).ceil().max(0.0) as usize;
            (a, b.min(cells.saturating_sub(1)))
        };
        let mut dirty = vec![false; g.len()];
        for q in &sensors {
            let (i0, i1) = span(q[0] - reach, q[0] + reach, g.origin[0], g.nx);
            let (j0, j1) = span(q[1] - reach, q[1] + reach, g.origin[1], g.ny);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let idx = g.index(i, j);
                    if self.in_disk[idx] && !dirty[idx] {
                        dirty[idx] = true;
                        uncovered[idx] = cov.is_uncovered(g.cell_center(idx));
                    }
                }
            }
        }
        let covered: Vec<bool> = (0..g.len())
            .map(|idx| self.in_disk[idx] && !uncovered[idx])
            .collect();
        let covered_boundary = (0..g.len())
            .map(|idx| covered[idx] && g.neighbors4(idx).any(|m| uncovered[m]))
            .collect();
        Ok(FiberComplex {
            time: t,
            nx: g.nx,
            ny: g.ny,
            uncovered,
            covered,
            covered_boundary,
        })
    }

    pub fn cobordism(
        &self,
        t_a: f64,
        t_b: f64,
        fine_time_samples: usize,
    ) -> Result<CobordismComplex> {
        let s = self.s;
        if !(t_a < t_b) {
            return Err(EvasionError::DegenerateInterval { t_a, t_b });
        }
        if s.time_base.is_circle() {
            if !(t_b - t_a <= 1.0) || !t_a.is_finite() {
                return Err(EvasionError::DegenerateInterval { t_a, t_b });
            }
        } else {
            s.time_base.normalize(t_a)?;
            s.time_base.normalize(t_b)?;
        }
        let slices = slice_times(t_a, t_b, fine_time_samples)
            .into_par_iter()
            .map(|t| self.fiber(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(CobordismComplex {
            interval: (t_a, t_b),
            slices,
        })
    }
}

/// Rasterizes the slice at time `t`.
pub fn rasterize_fiber(s: &Scenario, t: f64, g: &GridSpec) -> Result<FiberComplex> {
    Rasterizer::new(s, g).fiber(t)
}

/// Uniformly spaced slices over `[t_a, t_b]`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct CobordismComplex {
    pub interval: (f64, f64),
    pub slices: Vec<FiberComplex>,
}

/// Slice times used for `[t_a, t_b]` with `n` samples.
pub fn slice_times(t_a: f64, t_b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                t_b
            } else {
                t_a + (t_b - t_a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Rasterizes `[t_a, t_b]`. On a circular base `t_b` may exceed 1 to denote a
/// wrapped arc.
pub fn rasterize_cobordism(
    s: &Scenario,
    t_a: f64,
    t_b: f64,
    g: &GridSpec,
) -> Result<CobordismComplex> {
    Rasterizer::new(s, g).cobordism(t_a, t_b, g.fine_time_samples)
}

impl CobordismComplex {
    pub fn nx(&self) -> usize {
        self.slices[0].nx
    }

    pub fn ny(&self) -> usize {
        self.slices[0].ny
    }

    pub fn layer(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn stacked(&self, f: impl Fn(&FiberComplex) -> &Vec<bool>) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.layer() * self.slices.len());
        for sl in &self.slices {
            out.extend_from_slice(f(sl));
        }
        out
    }
}

pub enum ComplexRef<'a> {
    Fiber(&'a FiberComplex),
    Cobordism(&'a CobordismComplex),
}

impl<'a> From<&'a FiberComplex> for ComplexRef<'a> {
    fn from(f: &'a FiberComplex) -> Self {
        ComplexRef::Fiber(f)
    }
}

impl<'a> From<&'a CobordismComplex> for ComplexRef<'a> {
    fn from(c: &'a CobordismComplex) -> Self {
        ComplexRef::Cobordism(c)
    }
}

/// Connectivity of the uncovered and covered regions: the uncovered region is
/// face-connected, the covered region is connected through corners.
pub fn adjacency_of(which: Region) -> (Adjacency, Temporal) {
    match which {
        Region::Uncovered => (Adjacency::Four, Temporal::SameCell),
        Region::Covered | Region::CoveredBoundary => (Adjacency::Eight, Temporal::SameOrEight),
    }
}

/// Number of face slots per cell: east, north, and towards the next slice.
pub const FACE_DIRS: usize = 3;

/// The two cells of face `f`, or `None` if the face leaves the grid.
pub fn face_cells(f: usize, nx: usize, ny: usize, nt: usize) -> Option<(usize, usize)> {
    let cell = f / FACE_DIRS;
    let layer = nx * ny;
    let (k, idx) = (cell / layer, cell % layer);
    let (i, j) = (idx % nx, idx / nx);
    match f % FACE_DIRS {
        0 if i + 1 < nx => Some((cell, cell + 1)),
        1 if j + 1 < ny => Some((cell, cell + nx)),
        2 if k + 1 < nt => Some((cell, cell + layer)),
        _ => None,
    }
}

// faces between an uncovered and a covered cell, grouped by the pair of
// components they separate
fn interface_labels(
    uncovered: &[bool],
    covered: &[bool],
    x: &Labeling,
    c: &Labeling,
    (nx, ny, nt): (usize, usize, usize),
) -> Labeling {
    let layer = nx * ny;
    let mut labels = vec![crate::components::NO_LABEL; uncovered.len() * FACE_DIRS];
    let mut pairs: std::collections::HashMap<(u32, u32), u32> = std::collections::HashMap::new();
    let mut last = ((u32::MAX, u32::MAX), 0u32);
    for a in 0..uncovered.len() {
        if !uncovered[a] && !covered[a] {
            continue;
        }
        let (k, idx) = (a / layer, a % layer);
        let (i, j) = (idx % nx, idx / nx);
        let nbrs = [
            (i + 1 < nx).then(|| a + 1),
            (j + 1 < ny).then(|| a + nx),
            (k + 1 < nt).then(|| a + layer),
        ];
        for (d, b) in nbrs.into_iter().enumerate() {
            let Some(b) = b else { continue };
            let key = if uncovered[a] && covered[b] {
                (x.labels[a], c.labels[b])
            } else if uncovered[b] && covered[a] {
                (x.labels[b], c.labels[a])
            } else {
                continue;
            };
            if key != last.0 {
                let next = pairs.len() as u32;
                last = (key, *pairs.entry(key).or_insert(next));
            }
            labels[a * FACE_DIRS + d] = last.1;
        }
    }
    Labeling {
        labels,
        count: pairs.len(),
    }
}

/// Canonical component labeling. For a cobordism, cell `k·nx·ny + idx` is cell
/// `idx` of slice `k`.
///
/// The covered boundary is labeled on faces rather than cells: face
/// `FACE_DIRS·cell + d` separates `cell` from its neighbor in direction `d`.
/// Its components are the interfaces between one uncovered component and one
/// covered component.
pub fn components<'a>(c: impl Into<ComplexRef<'a>>, which: Region) -> Labeling {
    let (spatial, temporal) = adjacency_of(which);
    match c.into() {
        ComplexRef::Fiber(f) => match which {
            Region::Uncovered => label_grid(&f.uncovered, f.nx, f.ny, spatial),
            Region::Covered => label_grid(&f.covered, f.nx, f.ny, spatial),
            Region::CoveredBoundary => {
                let x = components(f, Region::Uncovered);
                let c = components(f, Region::Covered);
                interface_labels(&f.uncovered, &f.covered, &x, &c, (f.nx, f.ny, 1))
            }
        },
        ComplexRef::Cobordism(cob) => {
            let dims = (cob.nx(), cob.ny(), cob.slices.len());
            let unc = cob.stacked(|f| &f.uncovered);
            let cov = cob.stacked(|f| &f.covered);
            match which {
                Region::Uncovered => label_stack(&unc, dims.0, dims.1, dims.2, spatial, temporal),
                Region::Covered => label_stack(&cov, dims.0, dims.1, dims.2, spatial, temporal),
                Region::CoveredBoundary => {
                    let x = components(cob, Region::Uncovered);
                    let c = components(cob, Region::Covered);
                    interface_labels(&unc, &cov, &x, &c, dims)
                }
            }
        }
    }
}

/// Labelings of the uncovered region, the covered boundary, and the covered
/// region, in that order, sharing the work between them.
pub fn all_components<'a>(c: impl Into<ComplexRef<'a>>) -> [Labeling; 3] {
    let c = c.into();
    let (x, cv) = match &c {
        ComplexRef::Fiber(f) => (
            components(*f, Region::Uncovered),
            components(*f, Region::Covered),
        ),
        ComplexRef::Cobordism(k) => (
            components(*k, Region::Uncovered),
            components(*k, Region::Covered),
        ),
    };
    let b = match c {
        ComplexRef::Fiber(f) => {
            interface_labels(&f.uncovered, &f.covered, &x, &cv, (f.nx, f.ny, 1))
        }
        ComplexRef::Cobordism(k) => interface_labels(
            &k.stacked(|f| &f.uncovered),
            &k.stacked(|f| &f.covered),
            &x,
            &cv,
            (k.nx(), k.ny(), k.slices.len()),
        ),
    };
    [x, b, cv]
}

/// Plain PBM text: `1` for cells that are not uncovered, top row first.
pub fn to_pbm(f: &FiberComplex) -> String {
    let mut out = format!("P1\n{} {}\n", f.nx, f.ny);
    for j in (0..f.ny).rev() {
        let row: Vec<&str> = (0..f.nx)
            .map(|i| if f.uncovered[j * f.nx + i] { "0" } else { "1" })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Writes `slice_<index>.pbm` for every slice of `c` into `dir`.
pub fn dump_pbm(c: &CobordismComplex, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (k, sl) in c.slices.iter().enumerate() {
        std::fs::write(dir.join(format!("slice_{k}.pbm")), to_pbm(sl))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{builtin_scenario, Domain, SensorTrack, TimeBase};

    fn static_center(r: f64) -> Scenario {
        Scenario {
            dimension: 2,
            domain: Domain {
                center: [0.0, 0.0],
                radius: 1.0,
            },
            sensing_radius: r,
            fence_width: 0.1,
            time_base: TimeBase::Interval,
            tracks: vec![SensorTrack::stationary([0.0, 0.0])],
        }
    }

    #[test]
    fn empty_scenario_uncovers_the_unfenced_disk() {
        let s = builtin_scenario("empty", 0).unwrap();
        let g = GridSpec::new(&s, 64, 4).unwrap().with_smoothing(0.0);
        let f = rasterize_fiber(&s, 0.3, &g).unwrap();
        for idx in 0..g.len() {
            let p = g.cell_center(idx);
            assert_eq!(f.uncovered[idx], p[0].hypot(p[1]) < 0.9, "cell {idx}");
        }
    }

    #[test]
    fn full_scenario_has_nothing_uncovered() {
        let s = builtin_scenario("full", 0).unwrap();
        let g = GridSpec::default_for(&s);
        for t in [0.0, 0.5, 1.0] {
            assert_eq!(rasterize_fiber(&s, t, &g).unwrap().uncovered_count(), 0);
        }
    }

    #[test]
    fn annulus_counts_match_direct_distance_evaluation() {
        let s = static_center(0.3);
        let g = GridSpec::new(&s, 100, 4).unwrap().with_smoothing(0.0);
        let f = rasterize_fiber(&s, 0.0, &g).unwrap();
        let mut expected = 0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let x = -1.0 - g.cell_size + (i as f64 + 0.5) * g.cell_size;
                let y = -1.0 - g.cell_size + (j as f64 + 0.5) * g.cell_size;
                let d = (x * x + y * y).sqrt();
                if d > 0.3 && d < 0.9 {
                    expected += 1;
                }
            }
        }
        assert_eq!(f.uncovered_count(), expected);
        assert_eq!(components(&f, Region::Uncovered).count, 1);
        assert_eq!(f.b1(), 1);
        // the island boundary and the fence edge
        assert_eq!(components(&f, Region::CoveredBoundary).count, 2);
    }

    #[test]
    fn smoothing_shrinks_but_keeps_convex_pockets() {
        let s = builtin_scenario("empty", 0).unwrap();
        let g = GridSpec::new(&s, 64, 4).unwrap();
        let smooth = rasterize_fiber(&s, 0.0, &g).unwrap();
        let exact = rasterize_fiber(&s, 0.0, &g.with_smoothing(0.0)).unwrap();
        assert_eq!(smooth, exact);
    }

    #[test]
    fn opening_removes_thin_necks() {
        // two sensors leaving a gap of width 0.02 between their disks
        let mut s = static_center(0.3);
        s.tracks = vec![
            SensorTrack::stationary([0.0, 0.31]),
            SensorTrack::stationary([0.0, -0.31]),
        ];
        let g = GridSpec::new(&s, 128, 4).unwrap();
        let exact = rasterize_fiber(&s, 0.0, &g.with_smoothing(0.0)).unwrap();
        let smooth = rasterize_fiber(&s, 0.0, &g).unwrap();
        let origin = g.index(g.nx / 2, g.ny / 2);
        assert!(exact.uncovered[origin]);
        assert!(!smooth.uncovered[origin]);
        // the region still connects around the two disks
        assert_eq!(components(&smooth, Region::Uncovered).count, 1);
        for idx in 0..g.len() {
            assert!(!smooth.uncovered[idx] || exact.uncovered[idx]);
        }
    }

    #[test]
    fn fiber_invariants_hold_on_builtins() {
        for name in ["split", "close", "annuli", "random"] {
            let s = builtin_scenario(name, 4).unwrap();
            let g = GridSpec::new(&s, 64, 4).unwrap();
            for t in [0.0, 0.37, 0.81, 1.0] {
                let f = rasterize_fiber(&s, t, &g).unwrap();
                for idx in 0..g.len() {
                    assert!(!(f.uncovered[idx] && f.covered[idx]));
                    if f.covered_boundary[idx] {
                        assert!(f.covered[idx]);
                        assert!(g.neighbors4(idx).any(|m| f.uncovered[m]));
                    }
                    let p = g.cell_center(idx);
                    assert_eq!(f.uncovered[idx] || f.covered[idx], p[0].hypot(p[1]) <= 1.0);
                }
            }
        }
    }

    #[test]
    fn static_cobordism_repeats_its_first_slice() {
        let s = static_center(0.4);
        let g = GridSpec::new(&s, 48, 5).unwrap();
        let c = rasterize_cobordism(&s, 0.2, 0.6, &g).unwrap();
        let first = rasterize_fiber(&s, 0.2, &g).unwrap();
        assert_eq!(c.slices.len(), 5);
        assert_eq!(c.slices[0].time, 0.2);
        assert_eq!(c.slices[4].time, 0.6);
        for sl in &c.slices {
            assert_eq!(sl.uncovered, first.uncovered);
        }
        assert!(matches!(
            rasterize_cobordism(&s, 0.5, 0.5, &g),
            Err(EvasionError::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn close_cobordism_has_an_empty_slice() {
        let s = builtin_scenario("close", 0).unwrap();
        let g = GridSpec::new(&s, 64, 32).unwrap();
        let c = rasterize_cobordism(&s, 0.3, 0.7, &g).unwrap();
        assert!(c.slices.iter().any(|sl| sl.uncovered_count() == 0));
    }

    #[test]
    fn split_cobordism_is_a_pair_of_pants() {
        let s = builtin_scenario("split", 0).unwrap();
        let g = GridSpec::new(&s, 96, 128).unwrap();
        let c = rasterize_cobordism(&s, 0.0, 1.0, &g).unwrap();
        let first = components(&c.slices[0], Region::Uncovered).count;
        let last = components(&c.slices[127], Region::Uncovered).count;
        assert_eq!((first, last), (1, 2));
        assert_eq!(components(&c, Region::Uncovered).count, 1);
    }

    #[test]
    fn pbm_layout() {
        let s = builtin_scenario("full", 0).unwrap();
        let g = GridSpec::new(&s, 4, 2).unwrap();
        let f = rasterize_fiber(&s, 0.0, &g).unwrap();
        let text = to_pbm(&f);
        assert!(text.starts_with("P1\n6 6\n"));
        assert_eq!(text.lines().count(), 8);
        let dir = tempfile::tempdir().unwrap();
        let c = rasterize_cobordism(&s, 0.0, 1.0, &g).unwrap();
        dump_pbm(&c, dir.path()).unwrap();
        assert!(dir.path().join("slice_1.pbm").exists());
    }
}
