use evasion_core::limit::{
    dual_diagram, find_isomorphism, inverse_limit, is_isomorphism, limit_cardinality,
    partition_from_functionals, pullback_partition, LimitElements, PartitionAlgebra, Shape,
    ZigzagAlgebraDiagram, ZigzagSetDiagram,
};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_diagram(seed: u64) -> ZigzagSetDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = if rng.gen_bool(0.5) {
        Shape::Interval
    } else {
        Shape::Circle
    };
    let cobs = match shape {
        Shape::Interval => rng.gen_range(0..=2),
        Shape::Circle => rng.gen_range(1..=3),
    };
    let fibers = if shape == Shape::Interval {
        cobs + 1
    } else {
        cobs
    };
    let fiber_sizes: Vec<usize> = (0..fibers).map(|_| rng.gen_range(0..=5)).collect();
    let cobordism_sizes: Vec<usize> = (0..cobs).map(|_| rng.gen_range(1..=5)).collect();
    let right = |i: usize| (i + 1) % fibers;
    let left_maps = (0..cobs)
        .map(|i| {
            (0..fiber_sizes[i])
                .map(|_| rng.gen_range(0..cobordism_sizes[i]))
                .collect()
        })
        .collect::<Vec<Vec<usize>>>();
    let right_maps = (0..cobs)
        .map(|i| {
            (0..fiber_sizes[right(i)])
                .map(|_| rng.gen_range(0..cobordism_sizes[i]))
                .collect()
        })
        .collect();
    ZigzagSetDiagram::new(shape, fiber_sizes, cobordism_sizes, left_maps, right_maps).unwrap()
}

// every tuple of fiber elements, filtered by compatibility
fn brute_force(z: &ZigzagSetDiagram) -> Vec<Vec<usize>> {
    let m = z.fiber_sizes.len();
    let mut out = Vec::new();
    let mut x = vec![0usize; m];
    if z.fiber_sizes.contains(&0) {
        return out;
    }
    loop {
        let ok = (0..z.cobordism_sizes.len()).all(|i| {
            let j = if z.shape == Shape::Interval {
                i + 1
            } else {
                (i + 1) % m
            };
            z.left_maps[i][x[i]] == z.right_maps[i][x[j]]
        });
        if ok {
            out.push(x.clone());
        }
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            x[k] += 1;
            if x[k] < z.fiber_sizes[k] {
                break;
            }
            x[k] = 0;
        }
    }
}

fn relabel(z: &ZigzagSetDiagram, seed: u64) -> ZigzagSetDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm = |n: usize| {
        let mut p: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            p.swap(k, rng.gen_range(0..=k));
        }
        p
    };
    let fp: Vec<Vec<usize>> = z.fiber_sizes.iter().map(|&n| perm(n)).collect();
    let cp: Vec<Vec<usize>> = z.cobordism_sizes.iter().map(|&n| perm(n)).collect();
    let mut left = vec![Vec::new(); z.cobordism_count()];
    let mut right = vec![Vec::new(); z.cobordism_count()];
    for i in 0..z.cobordism_count() {
        let j = z.right_fiber(i);
        left[i] = vec![0; z.fiber_sizes[i]];
        for x in 0..z.fiber_sizes[i] {
            left[i][fp[i][x]] = cp[i][z.left_maps[i][x]];
        }
        right[i] = vec![0; z.fiber_sizes[j]];
        for y in 0..z.fiber_sizes[j] {
            right[i][fp[j][y]] = cp[i][z.right_maps[i][y]];
        }
    }
    ZigzagSetDiagram::new(
        z.shape,
        z.fiber_sizes.clone(),
        z.cobordism_sizes.clone(),
        left,
        right,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn transfer_count_matches_brute_force(seed in any::<u64>()) {
        let z = random_diagram(seed);
        prop_assert_eq!(limit_cardinality(&z), BigUint::from(brute_force(&z).len()));
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete(seed in any::<u64>()) {
        let z = random_diagram(seed);
        let listed: Vec<Vec<usize>> = LimitElements::new(&z).collect();
        prop_assert_eq!(&listed, &brute_force(&z));
        for x in &listed {
            prop_assert!(z.is_element(x));
        }
    }

    #[test]
    fn enumeration_cap_sets_the_truncation_flag(seed in any::<u64>(), cap in 0usize..4) {
        let z = random_diagram(seed);
        let all = brute_force(&z);
        let r = inverse_limit(&z, cap);
        prop_assert_eq!(r.truncated, all.len() > cap);
        prop_assert_eq!(&r.elements[..], &all[..all.len().min(cap)]);
    }

    #[test]
    fn relabeled_diagrams_are_isomorphic(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let z = random_diagram(seed);
        let w = relabel(&z, perm_seed);
        let (f, c) = find_isomorphism(&z, &w).expect("relabeling is an isomorphism");
        prop_assert!(is_isomorphism(&z, &w, &f, &c));
        prop_assert_eq!(limit_cardinality(&z), limit_cardinality(&w));
    }

    #[test]
    fn pullback_matches_boolean_functions(
        target in 1usize..6,
        g_seed in any::<u64>(),
        n in 0usize..7,
        keys in proptest::collection::vec(0u8..3, 7),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(g_seed);
        let g: Vec<usize> = (0..n).map(|_| rng.gen_range(0..target)).collect();
        let p = PartitionAlgebra::from_keys(&keys[..n]);
        let got = pullback_partition(&g, target, &p).unwrap();
        // all boolean u on the target with u∘g constant on blocks of p
        let kept: Vec<u32> = (0u32..1 << target)
            .filter(|&u| {
                (0..n).all(|a| (0..n).all(|b| p.block_of(a) != p.block_of(b) || (u >> g[a] & 1) == (u >> g[b] & 1)))
            })
            .collect();
        let sig: Vec<Vec<u32>> = (0..target).map(|s| kept.iter().map(|&u| u >> s & 1).collect()).collect();
        prop_assert_eq!(got, PartitionAlgebra::from_keys(&sig));
    }

    #[test]
    fn functionals_partition_by_value_vectors(vs in proptest::collection::vec(proptest::collection::vec(-2i64..3, 6), 0..4)) {
        let p = partition_from_functionals(6, &vs).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let same = vs.iter().all(|v| v[a] == v[b]);
                prop_assert_eq!(p.block_of(a) == p.block_of(b), same);
            }
        }
        let negated: Vec<Vec<i64>> = vs.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        prop_assert_eq!(partition_from_functionals(6, &negated).unwrap(), p);
    }

    #[test]
    fn discrete_algebras_dualize_to_the_ground_diagram(seed in any::<u64>()) {
        let z = random_diagram(seed);
        let za = ZigzagAlgebraDiagram {
            shape: z.shape,
            fiber_algebras: z.fiber_sizes.iter().map(|&n| PartitionAlgebra::discrete(n)).collect(),
            cobordism_algebras: z.cobordism_sizes.iter().map(|&n| PartitionAlgebra::discrete(n)).collect(),
            left_maps: z.left_maps.clone(),
            right_maps: z.right_maps.clone(),
        };
        prop_assert_eq!(dual_diagram(&za).unwrap(), z);
    }
}

#[test]
fn example_pair_of_restrictions_has_two_elements() {
    // k ← k → k ⊕ k as partitions: one block, one block, two singletons
    let za = ZigzagAlgebraDiagram {
        shape: Shape::Interval,
        fiber_algebras: vec![PartitionAlgebra::unit(1), PartitionAlgebra::discrete(2)],
        cobordism_algebras: vec![PartitionAlgebra::unit(1)],
        left_maps: vec![vec![0]],
        right_maps: vec![vec![0, 0]],
    };
    let dual = dual_diagram(&za).unwrap();
    assert_eq!(limit_cardinality(&dual), BigUint::from(2u32));
}
