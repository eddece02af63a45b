use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{direct::run_direct, AnalysisOptions, AnalysisReport, FiberDiagnostic, Mode};
use crate::components::{Labeling, NO_LABEL};
use crate::error::{EvasionError, Result};
use crate::limit::{
    dual_diagram, is_isomorphism, limit_of_algebras, pullback_partition, PartitionAlgebra, Shape,
    ZigzagAlgebraDiagram,
};
use crate::planar::alexander_image;
use crate::rasterize::{face_cells, GridSpec, Region};
use crate::scenario::Scenario;
use crate::zigzag::{region_slot, EventList, EventType, Zigzags};

/// What a boundary-only observer records: the covered-boundary zigzag, the
/// image partition of every fiber, and the event type of every cobordism with
/// respect to the covered region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryData {
    pub shape: Shape,
    pub sample_times: Vec<f64>,
    pub fiber_components: Vec<usize>,
    /// Blocks of each fiber's image partition, ordered by least element.
    pub image_partitions: Vec<Vec<Vec<usize>>>,
    pub cobordism_components: Vec<usize>,
    pub left_maps: Vec<Vec<usize>>,
    pub right_maps: Vec<Vec<usize>>,
    /// `None` marks a cobordism without an event.
    pub event_types_c: Vec<Option<EventType>>,
}

impl BoundaryData {
    pub fn validate(&self) -> Result<()> {
        let n = self.cobordism_components.len();
        let fibers = match self.shape {
            Shape::Interval => n + 1,
            Shape::Circle => n,
        };
        if self.sample_times.len() != n + 1 {
            return Err(EvasionError::invalid(
                "sample_times",
                format!("expected {} entries", n + 1),
            ));
        }
        if self.fiber_components.len() != fibers || self.image_partitions.len() != fibers {
            return Err(EvasionError::invalid(
                "fiber_components",
                format!("expected {fibers} fibers"),
            ));
        }
        if self.event_types_c.len() != n {
            return Err(EvasionError::invalid(
                "event_types_c",
                format!("expected {n} entries"),
            ));
        }
        for (i, blocks) in self.image_partitions.iter().enumerate() {
            PartitionAlgebra::from_blocks(self.fiber_components[i], blocks).map_err(|e| {
                EvasionError::invalid(format!("image_partitions[{i}]"), e.to_string())
            })?;
        }
        self.ground().map(|_| ())
    }

    fn ground(&self) -> Result<crate::limit::ZigzagSetDiagram> {
        crate::limit::ZigzagSetDiagram::new(
            self.shape,
            self.fiber_components.clone(),
            self.cobordism_components.clone(),
            self.left_maps.clone(),
            self.right_maps.clone(),
        )
    }
}

/// Boundary data of the zigzags computed by the direct pipeline.
pub fn extract_boundary_data_from(
    z: &Zigzags,
    events: &EventList,
    cobordism_events: &[Option<usize>],
) -> Result<BoundaryData> {
    let slot = region_slot(Region::CoveredBoundary);
    let d = &z.diagrams[slot];
    let image_partitions = z
        .fibers
        .iter()
        .zip(&z.fiber_labels[slot])
        .map(|(f, b)| Ok(alexander_image(&f.covered, b, f.nx, f.ny)?.blocks()))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryData {
        shape: z.shape,
        sample_times: z.samples.clone(),
        fiber_components: d.fiber_sizes.clone(),
        image_partitions,
        cobordism_components: d.cobordism_sizes.clone(),
        left_maps: d.left_maps.clone(),
        right_maps: d.right_maps.clone(),
        event_types_c: cobordism_events
            .iter()
            .map(|e| e.map(|k| events.events[k].type_x.swap()))
            .collect(),
    })
}

pub fn extract_boundary_data(
    s: &Scenario,
    g: &GridSpec,
    opts: &AnalysisOptions,
) -> Result<BoundaryData> {
    if s.dimension != 2 {
        return Err(EvasionError::Precondition(
            "boundary data needs a planar scenario".into(),
        ));
    }
    let run = run_direct(s, g, opts)?;
    extract_boundary_data_from(&run.zigzags, &run.events, &run.cobordism_events)
}

/// The algebra diagram determined by boundary data: image partitions on the
/// fibers, pulled back from the side each cobordism retracts onto.
pub fn reconstruct(bd: &BoundaryData) -> Result<ZigzagAlgebraDiagram> {
    bd.validate()?;
    let ground = bd.ground()?;
    let fiber_algebras = bd
        .image_partitions
        .iter()
        .zip(&bd.fiber_components)
        .map(|(blocks, &n)| PartitionAlgebra::from_blocks(n, blocks))
        .collect::<Result<Vec<_>>>()?;
    let cobordism_algebras = (0..bd.cobordism_components.len())
        .map(|i| {
            // type N for the covered region is type D for the uncovered one
            let (map, fiber) = match bd.event_types_c[i] {
                Some(EventType::D) => (&bd.right_maps[i], ground.right_fiber(i)),
                Some(EventType::N) | None => (&bd.left_maps[i], i),
            };
            pullback_partition(map, bd.cobordism_components[i], &fiber_algebras[fiber])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ZigzagAlgebraDiagram {
        shape: bd.shape,
        fiber_algebras,
        cobordism_algebras,
        left_maps: bd.left_maps.clone(),
        right_maps: bd.right_maps.clone(),
    })
}

pub fn analyze_boundary(bd: &BoundaryData, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let za = reconstruct(bd)?;
    let limit = limit_of_algebras(&za, opts.element_cap)?;
    let fibers = za
        .fiber_algebras
        .iter()
        .zip(&bd.sample_times)
        .map(|(a, &t)| FiberDiagnostic {
            t,
            pi0: a.block_count(),
            b1: None,
        })
        .collect();
    Ok(AnalysisReport {
        mode: Mode::Boundary,
        dimension: 2,
        exists: !limit.cardinality.is_zero(),
        limit_cardinality: Some(limit.cardinality),
        limit_elements: limit.elements,
        witnesses: Vec::new(),
        fibers,
        events: Vec::new(),
        truncated_elements: limit.truncated,
        truncated_witnesses: false,
        reachability: None,
    })
}

// uncovered component on the uncovered side of every boundary component
fn side_map(
    b: &Labeling,
    x: &Labeling,
    uncovered: impl Fn(usize) -> bool,
    dims: (usize, usize, usize),
) -> Vec<usize> {
    let mut out = vec![usize::MAX; b.count];
    for (f, &l) in b.labels.iter().enumerate() {
        if l == NO_LABEL || out[l as usize] != usize::MAX {
            continue;
        }
        let (a, c) = face_cells(f, dims.0, dims.1, dims.2).expect("interface face");
        let free = if uncovered(a) { a } else { c };
        out[l as usize] = x.label(free).expect("uncovered cell");
    }
    out
}

/// The natural maps from covered-boundary components to uncovered components,
/// per fiber and per cobordism.
pub fn boundary_to_uncovered(z: &Zigzags) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let (bs, xs) = (
        region_slot(Region::CoveredBoundary),
        region_slot(Region::Uncovered),
    );
    let fibers = z
        .fibers
        .iter()
        .enumerate()
        .map(|(i, f)| {
            side_map(
                &z.fiber_labels[bs][i],
                &z.fiber_labels[xs][i],
                |c| f.uncovered[c],
                (f.nx, f.ny, 1),
            )
        })
        .collect();
    let cobordisms = z
        .cobordisms
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let layer = c.layer();
            side_map(
                &z.cobordism_labels[bs][i],
                &z.cobordism_labels[xs][i],
                |cell| c.slices[cell / layer].uncovered[cell % layer],
                (c.nx(), c.ny(), c.slices.len()),
            )
        })
        .collect();
    (fibers, cobordisms)
}

/// Whether the dual of the reconstructed diagram is isomorphic to the direct
/// uncovered-component diagram through the natural maps.
pub fn verify_reconstruction(bd: &BoundaryData, z: &Zigzags) -> Result<bool> {
    let za = reconstruct(bd)?;
    let dual = dual_diagram(&za)?;
    let (fmaps, cmaps) = boundary_to_uncovered(z);
    let through = |algebras: &[PartitionAlgebra], maps: &[Vec<usize>]| -> Vec<Vec<usize>> {
        algebras
            .iter()
            .zip(maps)
            .map(|(a, m)| a.blocks().iter().map(|blk| m[blk[0]]).collect())
            .collect()
    };
    let fiber_maps = through(&za.fiber_algebras, &fmaps);
    let cobordism_maps = through(&za.cobordism_algebras, &cmaps);
    Ok(is_isomorphism(
        &dual,
        &z.diagrams[region_slot(Region::Uncovered)],
        &fiber_maps,
        &cobordism_maps,
    ))
}
