//! End-to-end pipelines and the report they produce.

mod boundary;
mod d1;
mod direct;
mod oracle;
mod witness;

pub use boundary::{
    analyze_boundary, boundary_to_uncovered, extract_boundary_data, extract_boundary_data_from,
    reconstruct, verify_reconstruction, BoundaryData,
};
pub use d1::{d1_count, FenceConvention};
pub use direct::{analyze_direct, check_retractions, run_direct, DirectAnalysis};
pub use oracle::{analyze_oracle, oracle_reachability, reachable_pairs};
pub use witness::{
    extract_witness, extract_witness_in, verify_witness, WitnessPath, WitnessSample,
};

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::error::Result;
use crate::rasterize::GridSpec;
use crate::scenario::Scenario;
use crate::zigzag::{Event, EventOptions, EventType};

/// Shown whenever some fiber has nontrivial or unknown first Betti number.
pub const LOWER_BOUND_BANNER: &str = "lower bound only";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub events: EventOptions,
    pub element_cap: usize,
    pub witness_cap: usize,
    /// Ceiling for slice doubling when a monotone lift is not found.
    pub max_fine_samples: usize,
    pub oracle_slices: usize,
    /// Ceiling for the event scan when a cobordism hides an undetected event.
    pub max_scan_samples: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            events: EventOptions::default(),
            element_cap: 10_000,
            witness_cap: 64,
            max_fine_samples: 4096,
            oracle_slices: 1024,
            max_scan_samples: 8192,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Direct,
    Boundary,
    Oracle,
}

impl Mode {
    pub fn parse(name: &str) -> Option<Mode> {
        match name {
            "direct" => Some(Mode::Direct),
            "boundary" => Some(Mode::Boundary),
            "oracle" => Some(Mode::Oracle),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::Boundary => "boundary",
            Mode::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberDiagnostic {
    pub t: f64,
    pub pi0: usize,
    /// Unknown in boundary mode.
    pub b1: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub mode: Mode,
    pub dimension: usize,
    pub exists: bool,
    /// `None` in oracle mode, which does not compute the limit.
    pub limit_cardinality: Option<BigUint>,
    pub limit_elements: Vec<Vec<usize>>,
    pub witnesses: Vec<WitnessPath>,
    pub fibers: Vec<FiberDiagnostic>,
    pub events: Vec<Event>,
    pub truncated_elements: bool,
    pub truncated_witnesses: bool,
    /// Oracle mode: start component × end component reachability.
    pub reachability: Option<Vec<Vec<bool>>>,
}

pub(crate) fn number(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

pub(crate) fn type_str(t: EventType) -> &'static str {
    match t {
        EventType::N => "N",
        EventType::D => "D",
    }
}

pub fn events_json(events: &[Event]) -> Value {
    Value::Array(
        events
            .iter()
            .map(|e| {
                json!({
                    "window": [e.window.0, e.window.1],
                    "locus": [e.locus.0, e.locus.1],
                    "type_X": type_str(e.type_x),
                })
            })
            .collect(),
    )
}

/// `{element, samples: [[t, position], …]}` with one coordinate per dimension.
pub fn witness_json(w: &WitnessPath, dimension: usize) -> Value {
    let samples: Vec<Value> = w
        .samples
        .iter()
        .map(|s| json!([s.t, &s.position[..dimension.min(2)]]))
        .collect();
    json!({"element": w.element, "samples": samples})
}

impl AnalysisReport {
    pub fn banner(&self) -> Option<&'static str> {
        self.fibers
            .iter()
            .any(|f| f.b1.map_or(true, |b| b > 0))
            .then_some(LOWER_BOUND_BANNER)
    }

    pub fn to_json(&self) -> Value {
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|w| witness_json(w, self.dimension))
            .collect();
        let fibers: Vec<Value> = self
            .fibers
            .iter()
            .map(|f| json!({"t": f.t, "pi0": f.pi0, "b1": f.b1}))
            .collect();
        let mut diagnostics = json!({
            "fibers": fibers,
            "events": events_json(&self.events),
            "bound": self.banner().unwrap_or("exact at grid scale"),
        });
        if let Some(r) = &self.reachability {
            diagnostics["reachability"] = json!(r);
        }
        json!({
            "mode": self.mode.as_str(),
            "exists": self.exists,
            "limit_cardinality": self.limit_cardinality.as_ref().map(number),
            "limit_elements": self.limit_elements,
            "witnesses": witnesses,
            "diagnostics": diagnostics,
            "truncated": {"elements": self.truncated_elements, "witnesses": self.truncated_witnesses},
        })
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Runs one analysis mode on a scenario. Boundary mode first records the
/// boundary data and then forgets the geometry.
pub fn analyze(
    s: &Scenario,
    g: &GridSpec,
    mode: Mode,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    match mode {
        Mode::Direct => analyze_direct(s, g, opts),
        Mode::Boundary => analyze_boundary(&extract_boundary_data(s, g, opts)?, opts),
        Mode::Oracle => analyze_oracle(s, g, opts),
    }
}
