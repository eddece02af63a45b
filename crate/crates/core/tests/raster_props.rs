use evasion_core::rasterize::{Coverage, GridSpec, Rasterizer};
use evasion_core::scenario::{builtin_scenario, load_scenario, save_scenario};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rasterizer_agrees_with_pointwise_coverage(seed in 0u64..1000, t in 0.0f64..=1.0, res in 16usize..48) {
        let s = builtin_scenario("random", seed).unwrap();
        let g = GridSpec::new(&s, res, 8).unwrap();
        let f = Rasterizer::new(&s, &g).fiber(t).unwrap();
        let sensors = s.positions_at(t).unwrap();
        let cov = Coverage::new(&s, g.smoothing_radius, &sensors);
        for idx in 0..g.len() {
            let p = g.cell_center(idx);
            let in_disk = p[0].hypot(p[1]) <= s.domain.radius;
            prop_assert_eq!(f.uncovered[idx], in_disk && cov.is_uncovered(p));
            prop_assert_eq!(f.covered[idx], in_disk && !f.uncovered[idx]);
        }
    }

    #[test]
    fn unsmoothed_coverage_is_a_distance_test(seed in 0u64..1000, t in 0.0f64..=1.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let s = builtin_scenario("random", seed).unwrap();
        let sensors = s.positions_at(t).unwrap();
        let p = [x, y];
        let naive = x.hypot(y) < s.inner_radius()
            && sensors.iter().all(|q| (p[0] - q[0]).hypot(p[1] - q[1]) > s.sensing_radius);
        prop_assert_eq!(Coverage::new(&s, 0.0, &sensors).is_uncovered(p), naive);
    }

    #[test]
    fn smoothing_only_removes_uncovered_points(seed in 0u64..1000, t in 0.0f64..=1.0, x in -1.0f64..1.0, y in -1.0f64..1.0, rho in 0.0f64..0.05) {
        let s = builtin_scenario("random", seed).unwrap();
        let sensors = s.positions_at(t).unwrap();
        if Coverage::new(&s, rho, &sensors).is_uncovered([x, y]) {
            prop_assert!(Coverage::new(&s, 0.0, &sensors).is_uncovered([x, y]));
        }
    }

    #[test]
    fn scenario_documents_round_trip(seed in any::<u64>(), line in any::<bool>()) {
        let s = builtin_scenario(if line { "random1d" } else { "random" }, seed).unwrap();
        let text = save_scenario(&s);
        let back = load_scenario(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(save_scenario(&back), text);
    }
}

#[test]
fn builtins_round_trip() {
    for name in ["split", "close", "annuli", "empty", "full"] {
        let s = builtin_scenario(name, 0).unwrap();
        assert_eq!(load_scenario(&save_scenario(&s)).unwrap(), s, "{name}");
    }
}
