use dsum::gf2::BitWord;
use dsum::regularity::*;
use dsum::spectral::RotationGraph;
use dsum::walks::{self, TupleCollection};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lifted_signs(z: &BitWord, w: &TupleCollection) -> Vec<f64> {
    let b = z.bits();
    w.iter()
        .map(|t| {
            if t.iter().fold(0, |a, &i| a ^ b[i as usize]) == 1 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}

/// max over the class of ⟨r, f⟩ by a plain loop over every factor choice (k ≤ 3, small n).
fn brute_tensor_max(space: &TensorSpace, r: &[f64], class: CutClass) -> f64 {
    let (n, k) = (space.n(), space.k());
    let val = |bits: u32, i: u32| -> f64 {
        let b = (bits >> i) & 1;
        match class {
            CutClass::Signed => 1.0 - 2.0 * b as f64,
            CutClass::Boolean => b as f64,
        }
    };
    let mut best = f64::NEG_INFINITY;
    let total = 1u64 << (n * k);
    for code in 0..total {
        let fs: Vec<u32> = (0..k)
            .map(|j| ((code >> (j * n)) as u32) & ((1 << n) - 1))
            .collect();
        let mut acc = 0.0;
        for (p, rv) in space.iter().zip(r) {
            let mut v = *rv;
            for j in 0..k {
                v *= val(fs[j], p[j]);
            }
            acc += v;
        }
        acc /= space.len() as f64;
        best = best.max(acc).max(if class == CutClass::Boolean {
            -acc
        } else {
            f64::NEG_INFINITY
        });
    }
    best
}

#[test]
fn exhaustive_oracle_matches_brute_force_on_sparse_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w = walks::all_walks(&RotationGraph::cycle(4).unwrap(), 3, 1000).unwrap();
    let space = TensorSpace::from_collection(&w);
    for class in [CutClass::Signed, CutClass::Boolean] {
        for _ in 0..5 {
            let r: Vec<f64> = (0..space.len())
                .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
                .collect();
            let (v, f) = exhaustive_tensor_max(&space, &r, class, TENSOR_ENUM_CAP).unwrap();
            assert!((v - brute_tensor_max(&space, &r, class)).abs() < 1e-12);
            let direct = inner_product(&r, &f.values_on(&space)).unwrap();
            assert!((direct - v).abs() < 1e-12);
        }
    }
}

#[test]
fn planted_cut_function_is_recovered() {
    let space = TensorSpace::full(6, 2, 1000).unwrap();
    let f0 = TensorCutFunction::new(
        1,
        vec![vec![1, -1, 1, 1, -1, 1], vec![-1, -1, 1, 1, 1, -1]],
        CutClass::Signed,
    )
    .unwrap();
    let g = f0.values_on(&space);
    let mut oracle = ExhaustiveTensorOracle::new(space.clone(), CutClass::Signed);
    let d = abstract_decompose(&g, &mut oracle, LoopParams::new(0.3, 0.3, 1.0).unwrap()).unwrap();
    assert!(d.log.len() <= 12);
    let r: Vec<f64> = g.iter().zip(&d.values).map(|(a, b)| a - b).collect();
    let (res, _) = exhaustive_tensor_max(&space, &r, CutClass::Signed, TENSOR_ENUM_CAP).unwrap();
    assert!(res <= 0.3 + 1e-12);
    assert!(d.certified);
}

#[test]
fn abstract_loop_invariants_on_random_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = walks::all_walks(&RotationGraph::cycle(6).unwrap(), 3, 1000).unwrap();
    let sparse = TensorSpace::from_collection(&w);
    let full = TensorSpace::full(5, 2, 1000).unwrap();
    for (i, space) in [sparse, full].into_iter().enumerate() {
        for _ in 0..5 {
            let g: Vec<f64> = (0..space.len())
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let delta = 0.15 + 0.1 * i as f64;
            let mut params = LoopParams::new(delta, delta, 1.0).unwrap();
            for step in [StepRule::Fixed, StepRule::LineSearch] {
                params.step = step;
                let mut oracle = ExhaustiveTensorOracle::new(space.clone(), CutClass::Signed);
                let d = abstract_decompose(&g, &mut oracle, params).unwrap();
                assert!(d.log.len() <= params.max_steps());
                assert!(d.coefficient_l1() <= params.bound / params.delta_prime + 1e-9);
                assert!(d.norm_sq() <= params.bound + 1e-9);
                let mut prev = d.initial_residual_sq;
                for e in &d.log {
                    assert!(prev - e.residual_sq >= params.delta_prime.powi(2) - 1e-9);
                    prev = e.residual_sq;
                }
                let r: Vec<f64> = g.iter().zip(&d.values).map(|(a, b)| a - b).collect();
                let (res, _) =
                    exhaustive_tensor_max(&space, &r, CutClass::Signed, TENSOR_ENUM_CAP).unwrap();
                assert!(res <= delta + 1e-12);
            }
        }
    }
}

#[test]
fn split_decomposition_k2_is_certified() {
    let w = walks::all_walks(&RotationGraph::complete_with_loops(6).unwrap(), 2, 1000).unwrap();
    let z: BitWord = "011010".parse().unwrap();
    let g = lifted_signs(&z, &w);
    let d = efficient_split_decompose(&w, &g, &SplitParams::new(0.4, CutClass::Signed)).unwrap();
    assert!(d.certified);
    let res = verify_split_residual(&w, &g, &d, CutClass::Signed, TENSOR_ENUM_CAP).unwrap();
    assert!(res <= 0.4, "residual {res}");
}

#[test]
fn split_decomposition_k3_planted_codeword() {
    let w = walks::all_walks(&RotationGraph::complete_with_loops(6).unwrap(), 3, 1000).unwrap();
    let z: BitWord = "110100".parse().unwrap();
    let g = lifted_signs(&z, &w);
    let d = efficient_split_decompose(&w, &g, &SplitParams::new(0.4, CutClass::Signed)).unwrap();
    assert!(d.certified);
    assert!(d.norm_sq() <= 4.0);
    let res = verify_split_residual(&w, &g, &d, CutClass::Signed, TENSOR_ENUM_CAP).unwrap();
    assert!(res <= 0.4, "residual {res}");
}

#[test]
fn bipartite_cycle_defeats_the_split_guarantee() {
    // C6 has τ = 1: the parity character is invisible to product functions on [n]^3.
    let w = walks::all_walks(&RotationGraph::cycle(6).unwrap(), 3, 1000).unwrap();
    let z: BitWord = "110100".parse().unwrap();
    let g = lifted_signs(&z, &w);
    let d = efficient_split_decompose(&w, &g, &SplitParams::new(0.4, CutClass::Signed)).unwrap();
    let res = verify_split_residual(&w, &g, &d, CutClass::Signed, TENSOR_ENUM_CAP).unwrap();
    assert!((res - 1.0).abs() < 1e-9);
}

#[test]
fn heuristic_split_matches_exact_on_planted_input() {
    let w = walks::all_walks(&RotationGraph::complete_with_loops(5).unwrap(), 3, 1000).unwrap();
    let z: BitWord = "10110".parse().unwrap();
    let g = lifted_signs(&z, &w);
    let mut p = SplitParams::new(0.4, CutClass::Signed);
    p.mode = CutMode::Alternating {
        restarts: 4,
        seed: 7,
    };
    p.step = StepRule::LineSearch;
    let d = efficient_split_decompose(&w, &g, &p).unwrap();
    assert!(!d.certified);
    let res = verify_split_residual(&w, &g, &d, CutClass::Signed, TENSOR_ENUM_CAP).unwrap();
    assert!(res <= 0.4, "residual {res}");
}

#[test]
fn mixing_probes_respect_tau() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = walks::all_walks(&RotationGraph::cycle(8).unwrap(), 3, 1000).unwrap();
    let mc = MixingChecker::new(&w).unwrap();
    assert!((mc.tau() - 1.0).abs() < 1e-9);
    let w = walks::all_walks(&RotationGraph::cycle(7).unwrap(), 3, 1000).unwrap();
    let mc = MixingChecker::new(&w).unwrap();
    let mut sv = |len: usize| -> Vec<i8> {
        (0..len)
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect()
    };
    for _ in 0..200 {
        for lvl in 1..3 {
            let len = mc.index().len(lvl);
            let f = SplitFunction {
                sign: 1,
                heads: (0..lvl).map(|_| sv(7)).collect(),
                tail: sv(len),
            };
            let g = SplitFunction {
                sign: -1,
                heads: (0..lvl).map(|_| sv(7)).collect(),
                tail: sv(len),
            };
            let (gap, tau) = mc.check(&f, &g).unwrap();
            assert!(gap <= tau + 1e-9);
        }
        let f =
            TensorCutFunction::new(1, (0..3).map(|_| sv(7)).collect(), CutClass::Signed).unwrap();
        let (gap, bound) = iterated_mixing_gap(&mc, &w, &f).unwrap();
        assert!(gap <= bound + 1e-9);
    }
}

#[test]
fn complete_collection_has_zero_mixing_gap() {
    let w = walks::complete(4, 3, 1000).unwrap();
    let mc = MixingChecker::new(&w).unwrap();
    let f = SplitFunction {
        sign: 1,
        heads: vec![vec![1, -1, -1, 1]],
        tail: (0..16).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect(),
    };
    assert!(mc.check(&f, &f).unwrap().0 < 1e-15);
}

fn factor_strategy() -> impl Strategy<Value = (Vec<Vec<i8>>, Vec<f64>, Vec<f64>)> {
    (1usize..12, 0usize..4).prop_flat_map(|(n, r)| {
        (
            prop::collection::vec(
                prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), n),
                r,
            ),
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
        )
    })
}

proptest! {
    #[test]
    fn conditional_average_is_an_orthogonal_projection((funcs, f, h0) in factor_strategy()) {
        let n = f.len();
        let b = build_factor(&funcs, n).unwrap();
        prop_assert!(b.num_atoms() <= 1 << funcs.len());
        let mut covered: Vec<usize> = b.atoms.iter().flatten().copied().collect();
        covered.sort_unstable();
        prop_assert_eq!(covered, (0..n).collect::<Vec<_>>());
        let ef = conditional_average(&f, &b).unwrap();
        let h = conditional_average(&h0, &b).unwrap();
        let lhs = inner_product(&h, &f).unwrap();
        let rhs = inner_product(&h, &ef).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
        let diff: Vec<f64> = f.iter().zip(&ef).map(|(a, b)| a - b).collect();
        prop_assert!(inner_product(&diff, &ef).unwrap().abs() < 1e-9);
        let again = conditional_average(&ef, &b).unwrap();
        prop_assert!(again.iter().zip(&ef).all(|(a, b)| (a - b).abs() < 1e-12));
        prop_assert!(inner_product(&ef, &ef).unwrap() <= inner_product(&f, &f).unwrap() + 1e-12);
    }

    #[test]
    fn projection_does_not_increase_distance(g in prop::collection::vec(-1.0f64..1.0, 6), h in prop::collection::vec(-3.0f64..3.0, 6)) {
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        let gn = g.iter().map(|v| v * v).sum::<f64>() / 6.0;
        let bound = gn.max(0.5);
        let mut hp = h.clone();
        let mut terms: Vec<(f64, ())> = vec![];
        project_ball(&mut hp, &mut terms, bound);
        prop_assert!(hp.iter().map(|v| v * v).sum::<f64>() / 6.0 <= bound + 1e-12);
        prop_assert!(dist(&g, &hp) <= dist(&g, &h) + 1e-9);
    }
}
