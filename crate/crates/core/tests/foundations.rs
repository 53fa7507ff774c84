use dsum::direct_sum::{self, ParityMode};
use dsum::gf2::{self, BaseCodeSpec, BitWord, LinearCode};
use dsum::spectral::{self, CayleyGraphSpec, RotationGraph, SWideProduct};
use dsum::walks;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bits_strategy(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 1..max_len)
}

fn naive_rank(rows: &[Vec<u8>]) -> usize {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] == 1) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] == 1 {
                let pivot = m[r].clone();
                for (a, b) in m[i].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        r += 1;
    }
    r
}

/// Eigenvalues of a Cayley graph on F₂^m are the character sums (1/d)Σ_g (−1)^{a·g}.
fn cayley_character_sums(spec: &CayleyGraphSpec) -> Vec<f64> {
    let d = spec.generators.len() as f64;
    (1u64..1 << spec.m)
        .map(|a| {
            spec.generators
                .iter()
                .map(|g| if (a & g).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
                .sum::<f64>()
                / d
        })
        .collect()
}

fn signed_bias(bits: &[u8]) -> f64 {
    let s: i64 = bits.iter().map(|&b| 1 - 2 * b as i64).sum();
    s as f64 / bits.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bitword_agrees_with_byte_vectors(a in bits_strategy(150), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = BitWord::from_bits(&a);
        let b = BitWord::random(a.len(), &mut rng);
        let bb = b.bits();
        prop_assert_eq!(w.bits(), a.clone());
        prop_assert_eq!(w.weight(), a.iter().filter(|&&x| x == 1).count());
        let x: Vec<u8> = a.iter().zip(&bb).map(|(p, q)| p ^ q).collect();
        prop_assert_eq!(w.xor(&b).bits(), x.clone());
        prop_assert_eq!(w.hamming(&b), x.iter().filter(|&&v| v == 1).count());
        prop_assert_eq!(w.complement().bits(), a.iter().map(|v| 1 - v).collect::<Vec<_>>());
        prop_assert!((gf2::bias(&w) - signed_bias(&a).abs()).abs() < 1e-12);
        let s = w.to_string();
        prop_assert_eq!(s.parse::<BitWord>().unwrap(), w.clone());
        prop_assert_eq!(w.cmp(&b), s.cmp(&b.to_string()));
        prop_assert_eq!(w.concat(&b).slice(a.len(), 2 * a.len()), b);
    }

    #[test]
    fn rank_matches_elimination(rows in prop::collection::vec(prop::collection::vec(0u8..2, 12), 1..10)) {
        let words: Vec<BitWord> = rows.iter().map(|r| BitWord::from_bits(r)).collect();
        prop_assert_eq!(gf2::rank(&words), naive_rank(&rows));
    }

    #[test]
    fn code_enumeration_is_linear(seed in 0u64..500) {
        let spec = BaseCodeSpec { epsilon0: 0.6, dim: 4, blocklength: 20, multiplicity: 1, seed };
        let c = gf2::random_balanced_code(&spec, 100_000, 1 << 22).unwrap();
        let cws = c.codewords().unwrap();
        for i in 0..16u64 {
            let direct = c.encode(&c.message(i)).unwrap();
            prop_assert_eq!(&cws[i as usize], &direct);
            for j in 0..16u64 {
                prop_assert_eq!(cws[(i ^ j) as usize].clone(), cws[i as usize].xor(&cws[j as usize]));
            }
        }
        let worst = cws[1..].iter().map(|w| signed_bias(&w.bits()).abs()).fold(0.0, f64::max);
        prop_assert!((gf2::code_bias_bruteforce(&c).unwrap() - worst).abs() < 1e-12);
        prop_assert!(worst <= 0.6 + 1e-9);
        prop_assert!(c.min_distance().unwrap() >= (1.0 - 0.6) / 2.0 - 1e-9);
    }

    #[test]
    fn lists_match_a_distance_scan(seed in any::<u64>(), radius in 0.0f64..0.6) {
        let spec = BaseCodeSpec { epsilon0: 0.6, dim: 5, blocklength: 18, multiplicity: 1, seed: 11 };
        let c = gf2::random_balanced_code(&spec, 100_000, 1 << 22).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = BitWord::random(18, &mut rng);
        let expect: Vec<BitWord> = (0..32u64)
            .map(|i| c.message(i))
            .filter(|m| c.encode(m).unwrap().hamming(&y) as f64 <= radius * 18.0 + 1e-9)
            .collect();
        prop_assert_eq!(gf2::list_messages_at_radius(&c, &y, radius).unwrap(), expect);
    }

    #[test]
    fn cayley_spectrum_is_the_character_table(m in 2usize..7, seed in any::<u64>(), dd in 1usize..6) {
        let d = dd.min((1 << m) - 1);
        let spec = CayleyGraphSpec::random(m, d, seed).unwrap();
        let g = RotationGraph::cayley_f2(&spec).unwrap();
        let sums = cayley_character_sums(&spec);
        let a = spectral::normalized_adjacency(&g);
        let s2 = sums.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let l2 = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((spectral::sigma2(&a).unwrap() - s2).abs() < 1e-9);
        prop_assert!((spectral::second_eigenvalue(&a).unwrap() - l2).abs() < 1e-9);
    }

    #[test]
    fn expander_mixing_holds(seed in any::<u64>(), s_mask in any::<u32>(), t_mask in any::<u32>()) {
        let g = RotationGraph::random_regular(32, 4, seed % 64, 10_000).unwrap();
        let s: Vec<usize> = (0..32).filter(|i| s_mask >> i & 1 == 1).collect();
        let t: Vec<usize> = (0..32).filter(|i| t_mask >> i & 1 == 1).collect();
        prop_assert!(spectral::expander_mixing_check(&g, &s, &t).unwrap().holds());
    }

    #[test]
    fn lift_is_linear_and_elementwise(a in prop::collection::vec(0u8..2, 8), b in prop::collection::vec(0u8..2, 8), k in 1usize..5) {
        let g = RotationGraph::cayley_f2(&CayleyGraphSpec { m: 3, generators: vec![1, 2, 4, 7] }).unwrap();
        let w = walks::all_walks(&g, k, 100_000).unwrap();
        let (za, zb) = (BitWord::from_bits(&a), BitWord::from_bits(&b));
        let la = direct_sum::dsum_lift_word(&za, &w).unwrap();
        let lb = direct_sum::dsum_lift_word(&zb, &w).unwrap();
        prop_assert_eq!(direct_sum::dsum_lift_word(&za.xor(&zb), &w).unwrap(), la.xor(&lb));
        for (i, t) in w.iter().enumerate() {
            prop_assert_eq!(la.bit(i), t.iter().fold(0, |x, &v| x ^ a[v as usize]));
        }
    }

    #[test]
    fn complete_collection_raises_bias_to_the_kth_power(a in prop::collection::vec(0u8..2, 2..7), k in 1usize..5) {
        let n = a.len();
        let w = walks::complete(n, k, 100_000).unwrap();
        let y = direct_sum::dsum_lift_word(&BitWord::from_bits(&a), &w).unwrap();
        prop_assert!((signed_bias(&y.bits()) - signed_bias(&a).powi(k as i32)).abs() < 1e-12);
    }
}

#[test]
fn cycle_spectrum() {
    for n in 3..20 {
        let a = spectral::normalized_adjacency(&RotationGraph::cycle(n).unwrap());
        let eig: Vec<f64> = (1..n)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        let s2 = eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!((spectral::sigma2(&a).unwrap() - s2).abs() < 1e-9, "C{n}");
        let l2 = (2.0 * std::f64::consts::PI / n as f64).cos();
        assert!((spectral::second_eigenvalue(&a).unwrap() - l2).abs() < 1e-9, "C{n}");
    }
    let a = spectral::normalized_adjacency(&RotationGraph::complete_with_loops(7).unwrap());
    assert!(spectral::sigma2(&a).unwrap() < 1e-9);
}

#[test]
fn iterative_and_dense_sigma2_agree() {
    for seed in 0..6 {
        let g = RotationGraph::random_regular(60, 2 + 2 * (seed as usize % 2), seed, 10_000).unwrap();
        let a = spectral::normalized_adjacency(&g);
        let dense = spectral::sigma2(&a).unwrap();
        assert!((spectral::sigma2_iterative(&a).unwrap() - dense).abs() < 1e-6);
        assert!(g.is_simple());
    }
}

#[test]
fn walk_counts_and_tau_of_all_walks() {
    for (m, d, seed) in [(3, 4, 1), (4, 6, 2), (5, 8, 3)] {
        let g = RotationGraph::cayley_f2(&CayleyGraphSpec::random(m, d, seed).unwrap()).unwrap();
        let s2 = spectral::sigma2(&spectral::normalized_adjacency(&g)).unwrap();
        for k in 2..5 {
            let w = walks::all_walks(&g, k, 1_000_000).unwrap();
            assert_eq!(w.len(), (1 << m) * d.pow(k as u32 - 1));
            assert!(w.is_regular());
            // Every split of a walk collection is one step of the walk.
            for (_, s) in walks::split_sigmas(&w).unwrap() {
                assert!((s - s2).abs() < 1e-9);
            }
            assert!((walks::splittability_tau(&w).unwrap() - s2).abs() < 1e-9);
        }
    }
}

#[test]
fn zigzag_bound_holds_for_single_width() {
    for seed in 0..5 {
        let g = RotationGraph::cayley_f2(&CayleyGraphSpec::random(4, 8, seed).unwrap()).unwrap();
        let h = RotationGraph::random_regular(8, 4, seed, 10_000).unwrap();
        let s2g = spectral::sigma2(&spectral::normalized_adjacency(&g)).unwrap();
        let s2h = spectral::sigma2(&spectral::normalized_adjacency(&h)).unwrap();
        let p = SWideProduct::new(g, h, 1).unwrap();
        let z = p.zigzag_operator(0);
        assert!(spectral::sigma2(&z).unwrap() <= spectral::zigzag_bound(s2g, s2h) + 1e-9);
    }
}

#[test]
fn operator_bias_equals_walk_bias() {
    let g = RotationGraph::cayley_f2(&CayleyGraphSpec { m: 3, generators: vec![1, 2, 4, 7] }).unwrap();
    let h = RotationGraph::random_regular(16, 2, 5, 1000).unwrap();
    let p = SWideProduct::new(g, h, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 1..5 {
        let w = walks::swide_walks_raw(&p, k, true, 1_000_000).unwrap();
        for _ in 0..10 {
            let z = BitWord::random(8, &mut rng);
            let expanded = BitWord::from_bools((0..p.size()).map(|x| z.get(x / p.cloud_size())));
            let y = direct_sum::dsum_lift_word(&expanded, &w).unwrap();
            let direct = signed_bias(&y.bits()).abs();
            assert!((p.lifted_bias_via_operator(&z, k).unwrap() - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn exhaustive_parity_sampling_matches_a_scan() {
    let g = RotationGraph::cayley_f2(&CayleyGraphSpec { m: 3, generators: vec![1, 2, 4, 7] }).unwrap();
    let w = walks::all_walks(&g, 3, 10_000).unwrap();
    for eps0 in [0.0, 0.25, 0.5, 1.0] {
        let ps = direct_sum::measured_parity_sampling(&w, eps0, ParityMode::Exhaustive { cap: 1 << 10 }).unwrap();
        let mut best = 0.0f64;
        let mut tested = 0;
        for z in 0u64..256 {
            let zb = BitWord::from_u64(z, 8);
            if gf2::bias(&zb) > eps0 + 1e-9 {
                continue;
            }
            tested += 1;
            let y = direct_sum::dsum_lift_word(&zb, &w).unwrap();
            best = best.max(signed_bias(&y.bits()).abs());
        }
        assert_eq!(ps.tested, tested);
        assert!((ps.epsilon - best).abs() < 1e-12);
        let sampled = direct_sum::measured_parity_sampling(&w, eps0, ParityMode::Sampled { trials: 200, seed: 1 }).unwrap();
        assert!(sampled.epsilon <= best + 1e-12);
    }
}

#[test]
fn lifted_code_inherits_the_sampling_bound() {
    let spec = BaseCodeSpec { epsilon0: 0.5, dim: 4, blocklength: 16, multiplicity: 1, seed: 3 };
    let c = gf2::random_balanced_code(&spec, 10_000, 1 << 22).unwrap();
    let g = RotationGraph::cayley_f2(&CayleyGraphSpec::random(4, 8, 1).unwrap()).unwrap();
    let w = walks::all_walks(&g, 3, 100_000).unwrap();
    let lc = direct_sum::dsum_lift_code(&c, &w, 1 << 22).unwrap();
    let eps0 = gf2::code_bias_bruteforce(&c).unwrap();
    let ps = direct_sum::measured_parity_sampling(&w, eps0, ParityMode::Exhaustive { cap: 1 << 16 }).unwrap();
    let lifted = direct_sum::lifted_code_bias(&lc).unwrap();
    assert!(lifted <= ps.epsilon + 1e-12);
    for i in 0..16 {
        let m = c.message(i);
        let via_base = direct_sum::dsum_lift_word(&c.encode(&m).unwrap(), &w).unwrap();
        assert_eq!(lc.encode(&m).unwrap(), via_base);
    }
    assert_eq!((lc.dim(), lc.blocklength()), (4, 16 * 64));
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(LinearCode::new(vec![BitWord::zeros(4)], 5, 16).is_err());
    assert!(CayleyGraphSpec::from_bitstrings(3, &["000"]).is_err());
    assert!(CayleyGraphSpec::from_bitstrings(3, &["101", "101"]).is_err());
    assert!(RotationGraph::cycle(4).is_ok());
    let g = RotationGraph::cycle(5).unwrap();
    let w = walks::all_walks(&g, 2, 100).unwrap();
    assert!(direct_sum::dsum_lift_word(&BitWord::zeros(4), &w).is_err());
    assert!(walks::all_walks(&g, 6, 100).is_err());
    assert!(walks::all_walks(&g, 0, 100).is_err());
}
