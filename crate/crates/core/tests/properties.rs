use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use slicer::anticonc::{levy_q, levy_scaling_check, linear_form_atoms, mixture_atoms, sperner_bound, LinearFormSpec};
use slicer::cube::{crossing_necessary, edge_crosses, Configuration, CrossingMode, Edge, Hyperplane, Vertex};
use slicer::decomp::binary_decompose;
use slicer::verifier::{crossing_counts, max_crossings_bound_u64, verify_slicing, verify_slicing_naive};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn all_edges(n: usize) -> Vec<Edge> {
    let mut edges = Vec::new();
    for mask in 0..1u64 << n {
        for k in 0..n {
            if mask >> k & 1 == 0 {
                edges.push(Edge::new(Vertex::from_mask(n, mask).unwrap(), k).unwrap());
            }
        }
    }
    edges
}

/// Integer dot product of `c` with the vertex encoded by `mask`.
fn int_dot(c: &[i64], mask: u64) -> i64 {
    c.iter().enumerate().map(|(i, &ci)| if mask >> i & 1 == 1 { ci } else { -ci }).sum()
}

/// Independent crossing oracle on integer planes.
fn oracle_crosses(c: &[i64], t: i64, mask: u64, k: usize, mode: CrossingMode) -> bool {
    let s = int_dot(c, mask) - t;
    let s2 = int_dot(c, mask | 1 << k) - t;
    match mode {
        CrossingMode::Strict => (s < 0 && s2 > 0) || (s > 0 && s2 < 0),
        CrossingMode::Relaxed => (s < 0 && s2 > 0) || (s > 0 && s2 < 0) || ((s == 0) != (s2 == 0)),
    }
}

fn int_plane(max_n: usize) -> impl Strategy<Value = (usize, Vec<i64>, i64)> {
    (1..=max_n).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(-6i64..=6, n), -20i64..=20)
            .prop_filter("nonzero normal", |(_, c, _)| c.iter().any(|&x| x != 0))
    })
}

fn int_config(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, Vec<(Vec<i64>, i64)>)> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        let plane = (prop::collection::vec(-5i64..=5, n), -12i64..=12)
            .prop_filter("nonzero normal", |(c, _)| c.iter().any(|&x| x != 0));
        (Just(n), prop::collection::vec(plane, m))
    })
}

fn build(n: usize, planes: &[(Vec<i64>, i64)], mode: CrossingMode) -> Configuration {
    let hs = planes.iter().map(|(c, t)| Hyperplane::from_ints(c, *t).unwrap()).collect();
    Configuration::new(n, hs, mode).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn crossing_matches_integer_oracle((n, c, t) in int_plane(6)) {
        let h = Hyperplane::from_ints(&c, t).unwrap();
        for e in all_edges(n) {
            let mask = e.base().mask();
            for mode in [CrossingMode::Strict, CrossingMode::Relaxed] {
                prop_assert_eq!(edge_crosses(&h, &e, mode).unwrap(), oracle_crosses(&c, t, mask, e.axis(), mode));
            }
        }
    }

    #[test]
    fn positive_scaling_preserves_crossings((n, c, t) in int_plane(5), num in 1i64..50, den in 1i64..50) {
        let lambda = rat(num, den);
        let exact: Vec<BigRational> = c.iter().map(|&x| rat(x, 1) * &lambda).collect();
        let scaled = Hyperplane::exact(exact, rat(t, 1) * &lambda).unwrap();
        let h = Hyperplane::from_ints(&c, t).unwrap();
        for e in all_edges(n) {
            for mode in [CrossingMode::Strict, CrossingMode::Relaxed] {
                prop_assert_eq!(edge_crosses(&h, &e, mode).unwrap(), edge_crosses(&scaled, &e, mode).unwrap());
            }
        }
    }

    #[test]
    fn crossing_implies_necessary_condition((n, c, t) in int_plane(6)) {
        let h = Hyperplane::from_ints(&c, t).unwrap();
        let f = h.to_float().unwrap();
        let hf = Hyperplane::Float(f);
        for e in all_edges(n) {
            if edge_crosses(&h, &e, CrossingMode::Strict).unwrap() {
                prop_assert!(crossing_necessary(&h, &e).unwrap());
            }
            if edge_crosses(&hf, &e, CrossingMode::Strict).unwrap() {
                prop_assert!(crossing_necessary(&hf, &e).unwrap());
            }
            // A relaxed crossing through an endpoint sits exactly on the boundary.
            if edge_crosses(&h, &e, CrossingMode::Relaxed).unwrap() {
                let s = int_dot(&c, e.base().mask()) - t;
                prop_assert!(s.abs() <= 2 * c[e.axis()].abs());
            }
        }
    }

    #[test]
    fn strict_crossings_are_relaxed_crossings((n, c, t) in int_plane(6)) {
        let h = Hyperplane::from_ints(&c, t).unwrap();
        for e in all_edges(n) {
            if edge_crosses(&h, &e, CrossingMode::Strict).unwrap() {
                prop_assert!(edge_crosses(&h, &e, CrossingMode::Relaxed).unwrap());
            }
        }
    }

    #[test]
    fn exact_and_float_agree_on_integer_planes((n, c, t) in int_plane(6)) {
        let h = Hyperplane::from_ints(&c, t).unwrap();
        let hf = Hyperplane::Float(h.to_float().unwrap());
        for e in all_edges(n) {
            for mode in [CrossingMode::Strict, CrossingMode::Relaxed] {
                prop_assert_eq!(edge_crosses(&h, &e, mode).unwrap(), edge_crosses(&hf, &e, mode).unwrap());
            }
        }
    }

    #[test]
    fn fast_verifier_matches_naive((n, planes) in int_config(6, 4)) {
        for mode in [CrossingMode::Strict, CrossingMode::Relaxed] {
            let c = build(n, &planes, mode);
            let fast = verify_slicing(&c).unwrap();
            let naive = verify_slicing_naive(&c).unwrap();
            prop_assert_eq!(&fast.per_plane_crossings, &naive.per_plane_crossings);
            prop_assert_eq!(fast.unsliced_count, naive.unsliced_count);
            prop_assert_eq!(&fast.unsliced_sample, &naive.unsliced_sample);
        }
    }

    #[test]
    fn verifier_counts_match_oracle((n, planes) in int_config(7, 3)) {
        let c = build(n, &planes, CrossingMode::Strict);
        let report = verify_slicing(&c).unwrap();
        let mut unsliced = 0u64;
        let mut per_plane = vec![0u64; planes.len()];
        for mask in 0..1u64 << n {
            for k in (0..n).filter(|&k| mask >> k & 1 == 0) {
                let mut any = false;
                for (l, (coeffs, t)) in planes.iter().enumerate() {
                    if oracle_crosses(coeffs, *t, mask, k, CrossingMode::Strict) {
                        per_plane[l] += 1;
                        any = true;
                    }
                }
                unsliced += u64::from(!any);
            }
        }
        prop_assert_eq!(report.per_plane_crossings, per_plane);
        prop_assert_eq!(report.unsliced_count, unsliced);
    }

    #[test]
    fn relaxed_leaves_no_more_unsliced((n, planes) in int_config(7, 4)) {
        let strict = verify_slicing(&build(n, &planes, CrossingMode::Strict)).unwrap();
        let relaxed = verify_slicing(&build(n, &planes, CrossingMode::Relaxed)).unwrap();
        prop_assert!(relaxed.unsliced_count <= strict.unsliced_count);
    }

    #[test]
    fn strict_counts_respect_counting_bound((n, planes) in int_config(9, 2)) {
        let bound = max_crossings_bound_u64(n as u32).unwrap();
        for count in crossing_counts(&build(n, &planes, CrossingMode::Strict)).unwrap() {
            prop_assert!(count <= bound);
        }
    }

    #[test]
    fn decomposition_round_trip_and_ranges(v in prop::collection::vec(
        prop_oneof![Just(0.0), -4.0f64..4.0, (-1e-300f64..1e-300), (-1e10f64..1e10)], 1..64)) {
        let d = binary_decompose(&v).unwrap();
        prop_assert_eq!(d.recompose().unwrap(), v.clone());
        let mut seen = vec![false; v.len()];
        for (&j, part) in d.parts() {
            prop_assert!(!part.indices.is_empty());
            for (&k, &x) in part.indices.iter().zip(&part.values) {
                prop_assert!(!seen[k]);
                seen[k] = true;
                prop_assert_eq!(x, v[k]);
                let upper = 2f64.powi(-j);
                prop_assert!(x.abs() <= upper && x.abs() > upper / 2.0);
            }
        }
        for (k, &x) in v.iter().enumerate() {
            prop_assert_eq!(seen[k], x != 0.0);
        }
    }

    #[test]
    fn exact_decomposition_round_trip(v in prop::collection::vec((-40i64..40, 1i64..64), 1..24)) {
        let v: Vec<BigRational> = v.into_iter().map(|(p, q)| rat(p, q)).collect();
        let d = binary_decompose(&v).unwrap();
        prop_assert_eq!(d.recompose().unwrap(), v);
    }

    #[test]
    fn levy_q_monotone_and_subadditive(
        v in prop::collection::vec(-8i64..=8, 1..10),
        p in prop::collection::vec(-4i64..=4, 10),
        a in 1i64..12,
        k in 1u32..5,
    ) {
        let n = v.len();
        let spec = LinearFormSpec::new(
            v.iter().map(|&x| rat(x, 4)).collect(),
            p[..n].iter().map(|&x| rat(x, 8)).collect(),
        ).unwrap();
        let d = linear_form_atoms(&spec).unwrap();
        let alpha = rat(a, 8);
        let q1 = levy_q(&d, &alpha).unwrap();
        let q2 = levy_q(&d, &(alpha.clone() + rat(1, 8))).unwrap();
        prop_assert!(q1 <= q2);
        prop_assert!(levy_scaling_check(&d, &alpha, k).unwrap().ok);
    }

    #[test]
    fn unbiased_levy_q_within_sperner(v in prop::collection::vec(-6i64..=6, 1..14), a in 1i64..8) {
        let spec = LinearFormSpec::unbiased(v.iter().map(|&x| rat(x, 1)).collect()).unwrap();
        let alpha = rat(a, 2);
        let q = levy_q(&linear_form_atoms(&spec).unwrap(), &alpha).unwrap();
        let count = v.iter().filter(|&&x| rat(x.abs(), 1) >= alpha).count() as u32;
        prop_assert!(q <= sperner_bound(count));
    }

    #[test]
    fn mixture_realization_matches_direct_law(
        v in prop::collection::vec(-9i64..=9, 1..9),
        p in prop::collection::vec(-2i64..=2, 9),
    ) {
        let n = v.len();
        let spec = LinearFormSpec::new(
            v.iter().map(|&x| rat(x, 3)).collect(),
            p[..n].iter().map(|&x| rat(x, 4)).collect(),
        ).unwrap();
        prop_assert_eq!(mixture_atoms(&spec).unwrap(), linear_form_atoms(&spec).unwrap());
    }
}
