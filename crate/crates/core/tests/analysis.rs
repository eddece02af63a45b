use evasion_core::analysis::{
    analyze, analyze_boundary, analyze_direct, d1_count, extract_boundary_data,
    oracle_reachability, reachable_pairs, reconstruct, run_direct, verify_witness, AnalysisOptions,
    FenceConvention, Mode, LOWER_BOUND_BANNER,
};
use evasion_core::components::label_grid;
use evasion_core::limit::{PartitionAlgebra, Shape};
use evasion_core::rasterize::{adjacency_of, rasterize_fiber, GridSpec, Region};
use evasion_core::scenario::{builtin_scenario, Domain, Scenario, SensorTrack, TimeBase};
use evasion_core::zigzag::EventType;
use num_bigint::BigUint;

fn opts() -> AnalysisOptions {
    AnalysisOptions::default()
}

fn builtin(name: &str) -> (Scenario, GridSpec) {
    let s = builtin_scenario(name, 0).unwrap();
    let g = GridSpec::default_for(&s);
    (s, g)
}

fn card(n: u32) -> Option<BigUint> {
    Some(BigUint::from(n))
}

fn line(tracks: Vec<SensorTrack>) -> Scenario {
    Scenario {
        dimension: 1,
        domain: Domain {
            center: [0.0, 0.0],
            radius: 1.0,
        },
        sensing_radius: 0.08,
        fence_width: 0.1,
        time_base: TimeBase::Interval,
        tracks,
    }
}

#[test]
fn split_has_two_witnesses_ending_in_different_pockets() {
    let (s, g) = builtin("split");
    let r = analyze_direct(&s, &g, &opts()).unwrap();
    assert!(r.exists);
    assert_eq!(r.limit_cardinality, card(2));
    assert_eq!(r.witnesses.len(), 2);
    let end = rasterize_fiber(&s, 1.0, &g).unwrap();
    let pockets = label_grid(
        &end.uncovered,
        g.nx,
        g.ny,
        adjacency_of(Region::Uncovered).0,
    );
    assert_eq!(pockets.count, 2);
    let mut ends = Vec::new();
    for w in &r.witnesses {
        verify_witness(&s, &g, w).unwrap();
        let last = w.samples.last().unwrap();
        assert_eq!(last.slice_time, 1.0);
        assert_eq!(w.samples[0].t, 0.0);
        ends.push(pockets.label(last.cell).unwrap());
    }
    ends.sort();
    assert_eq!(ends, vec![0, 1]);
}

#[test]
fn close_has_no_evasion_path_in_any_mode() {
    let (s, g) = builtin("close");
    for mode in [Mode::Direct, Mode::Boundary, Mode::Oracle] {
        let r = analyze(&s, &g, mode, &opts()).unwrap();
        assert!(!r.exists, "{}", mode.as_str());
        assert!(r.witnesses.is_empty());
    }
    assert_eq!(
        analyze_direct(&s, &g, &opts()).unwrap().limit_cardinality,
        card(0)
    );
}

#[test]
fn empty_and_full() {
    let (s, g) = builtin("empty");
    let r = analyze_direct(&s, &g, &opts()).unwrap();
    assert_eq!(r.limit_cardinality, card(1));
    let w = &r.witnesses[0];
    verify_witness(&s, &g, w).unwrap();
    assert!(w.samples.iter().all(|smp| smp.cell == w.samples[0].cell));
    assert!(r.banner().is_none());

    let (s, g) = builtin("full");
    let r = analyze_direct(&s, &g, &opts()).unwrap();
    assert_eq!(r.limit_cardinality, card(0));
    assert!(!analyze(&s, &g, Mode::Oracle, &opts()).unwrap().exists);
}

#[test]
fn annuli_elements_all_have_witnesses() {
    let (s, g) = builtin("annuli");
    let r = analyze_direct(&s, &g, &opts()).unwrap();
    assert!(r.exists);
    assert_eq!(
        BigUint::from(r.limit_elements.len()),
        r.limit_cardinality.clone().unwrap()
    );
    assert_eq!(r.witnesses.len(), r.limit_elements.len());
    for w in &r.witnesses {
        verify_witness(&s, &g, w).unwrap();
    }
    assert!(r.fibers.iter().any(|f| f.b1.unwrap() >= 1));
    assert_eq!(r.banner(), Some(LOWER_BOUND_BANNER));
    assert_eq!(r.to_json()["diagnostics"]["bound"], LOWER_BOUND_BANNER);
}

#[test]
fn split_boundary_data() {
    let (s, g) = builtin("split");
    let bd = extract_boundary_data(&s, &g, &opts()).unwrap();
    assert_eq!(bd.fiber_components.first(), Some(&1));
    assert_eq!(bd.fiber_components.last(), Some(&2));
    for (n, blocks) in bd.fiber_components.iter().zip(&bd.image_partitions) {
        assert_eq!(blocks.len(), *n);
    }
    let events: Vec<EventType> = bd.event_types_c.iter().flatten().copied().collect();
    assert_eq!(events, vec![EventType::N]);
    let r = analyze_boundary(&bd, &opts()).unwrap();
    assert_eq!(r.limit_cardinality, card(2));
    assert!(r.witnesses.is_empty());

    let text = serde_json::to_string(&bd).unwrap();
    let back: evasion_core::analysis::BoundaryData = serde_json::from_str(&text).unwrap();
    assert_eq!(back, bd);
}

#[test]
fn connected_cover_reconstructs_the_boundary_algebra() {
    let (s, g) = builtin("empty");
    let run = run_direct(&s, &g, &opts()).unwrap();
    let covered = &run.zigzags.diagrams[2];
    assert!(covered
        .fiber_sizes
        .iter()
        .chain(&covered.cobordism_sizes)
        .all(|&n| n == 1));
    let bd = extract_boundary_data(&s, &g, &opts()).unwrap();
    let za = reconstruct(&bd).unwrap();
    for (a, &n) in za.fiber_algebras.iter().zip(&bd.fiber_components) {
        assert_eq!(a, &PartitionAlgebra::discrete(n));
    }
    for (a, &n) in za.cobordism_algebras.iter().zip(&bd.cobordism_components) {
        assert_eq!(a, &PartitionAlgebra::discrete(n));
    }
}

#[test]
fn circle_witness_returns_to_its_start() {
    let s = Scenario {
        dimension: 2,
        domain: Domain {
            center: [0.0, 0.0],
            radius: 1.0,
        },
        sensing_radius: 0.3,
        fence_width: 0.1,
        time_base: TimeBase::Circle,
        tracks: vec![SensorTrack::new(vec![
            (0.0, [0.2, 0.0]),
            (0.5, [-0.2, 0.0]),
            (1.0, [0.2, 0.0]),
        ])],
    };
    let g = GridSpec::new(&s, 48, 64).unwrap();
    let r = analyze_direct(&s, &g, &opts()).unwrap();
    assert_eq!(r.limit_cardinality, card(1));
    let w = &r.witnesses[0];
    verify_witness(&s, &g, w).unwrap();
    let first = &w.samples[0];
    let last = w.samples.last().unwrap();
    assert!(last.t - first.t <= 1.0 + 1e-12);
    let f0 = rasterize_fiber(&s, 0.0, &g).unwrap();
    let lab = label_grid(&f0.uncovered, g.nx, g.ny, adjacency_of(Region::Uncovered).0);
    assert_eq!(lab.label(first.cell), lab.label(last.cell));
    assert_eq!(
        run_direct(&s, &g, &opts()).unwrap().zigzags.shape,
        Shape::Circle
    );
}

#[test]
fn static_sensors_on_a_line() {
    let s = line(vec![
        SensorTrack::stationary([-0.3, 0.0]),
        SensorTrack::stationary([0.3, 0.0]),
    ]);
    let g = GridSpec::default_for(&s);
    let oracle = reachable_pairs(&oracle_reachability(&s, &g, 256).unwrap());
    assert_eq!(oracle, 3);
    assert_eq!(
        d1_count(&s, &g, FenceConvention::CountCollar, &opts()).unwrap(),
        3
    );
    assert_eq!(
        d1_count(&s, &g, FenceConvention::ExcludeCollar, &opts()).unwrap(),
        1
    );
    assert_eq!(
        analyze_direct(&s, &g, &opts()).unwrap().limit_cardinality,
        card(3)
    );
}

#[test]
fn merging_sensors_on_a_line_lose_one_component() {
    let s = line(vec![
        SensorTrack::new(vec![(0.0, [-0.3, 0.0]), (1.0, [-0.05, 0.0])]),
        SensorTrack::new(vec![(0.0, [0.3, 0.0]), (1.0, [0.05, 0.0])]),
    ]);
    let g = GridSpec::default_for(&s);
    let oracle = reachable_pairs(&oracle_reachability(&s, &g, 256).unwrap());
    assert_eq!(oracle, 2);
    assert_eq!(
        d1_count(&s, &g, FenceConvention::CountCollar, &opts()).unwrap(),
        2
    );
}

#[test]
fn fully_covered_line_counts_zero() {
    let mut s = line(vec![SensorTrack::stationary([0.0, 0.0])]);
    s.sensing_radius = 1.0;
    let g = GridSpec::default_for(&s);
    assert_eq!(
        d1_count(&s, &g, FenceConvention::CountCollar, &opts()).unwrap(),
        0
    );
}

#[test]
fn closed_form_rejects_planar_scenarios() {
    let (s, g) = builtin("empty");
    assert!(d1_count(&s, &g, FenceConvention::CountCollar, &opts()).is_err());
}

#[test]
fn report_schema() {
    let (s, g) = builtin("split");
    let v = analyze_direct(&s, &g, &opts()).unwrap().to_json();
    for key in [
        "mode",
        "exists",
        "limit_cardinality",
        "limit_elements",
        "witnesses",
        "diagnostics",
        "truncated",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["mode"], "direct");
    assert_eq!(v["truncated"]["elements"], false);
    let smp = &v["witnesses"][0]["samples"][0];
    assert!(smp[0].is_number());
    assert_eq!(smp[1].as_array().unwrap().len(), 2);
    assert!(v["diagnostics"]["fibers"][0].get("b1").is_some());
}
