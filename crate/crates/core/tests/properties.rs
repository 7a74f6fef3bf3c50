use proptest::prelude::*;
use qzeta::arith::{parse, render, series_expand, IntPoly, PowerSeries, RationalFn, Signature};
use qzeta::lattice::{count_subreps, random_tuple, CountOptions, CountTable, GradedRep, Mode};
use qzeta::linalg::IntMatrix;
use qzeta::ppartition::{hasse_rep, poset_catalog, ppartition_count, stanley_gf, Poset};
use qzeta::quiver::{
    builtin_rep, cocentral_grading, delta_conjugation_shifts, Grading, Params, Representation,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A rational function in `q, t` with denominator a product of `1 - q^a t^b`, `b >= 1`.
fn rational() -> impl Strategy<Value = RationalFn> {
    let terms = prop::collection::vec((0u32..3, 0u32..4, -3i64..4), 1..5);
    let factors = prop::collection::vec((0u32..3, 1u32..4, 1u32..3), 0..4);
    (terms, factors).prop_map(|(terms, factors)| {
        let sig = Signature::univariate();
        let num = IntPoly::from_terms(2, terms.into_iter().map(|(a, b, c)| (vec![a, b], c.into())));
        let num = if num.is_zero() { IntPoly::one(2) } else { num };
        let fs = factors.into_iter().map(|(a, b, k)| (sig.one_minus(a, &[b]), k)).collect();
        RationalFn::with_factors(sig, num, fs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_times_denominator_is_numerator(w in rational(), bound in 0u32..7) {
        let s = series_expand(&w, bound).unwrap();
        let den = PowerSeries::from_poly(w.sig().clone(), w.den(), bound);
        let num = PowerSeries::from_poly(w.sig().clone(), w.num(), bound);
        prop_assert_eq!(den.mul(&s), num);
    }

    #[test]
    fn inversion_is_an_involution(w in rational()) {
        let back = w.invert_qt().unwrap().invert_qt().unwrap();
        prop_assert!(back.equals(&w));
    }

    #[test]
    fn expansion_respects_products(a in rational(), b in rational(), bound in 0u32..6) {
        let lhs = series_expand(&a.mul(&b), bound).unwrap();
        let rhs = series_expand(&a, bound).unwrap().mul(&series_expand(&b, bound).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn render_parse_round_trip(w in rational()) {
        let text = render(&w);
        let back = parse(&text, w.sig()).unwrap();
        prop_assert!(back.equals(&w), "{}", text);
    }
}

/// Two or three vertices of rank 1 or 2, arrows from lower to higher index with small entries.
fn acyclic_rep() -> impl Strategy<Value = Representation> {
    (2usize..4)
        .prop_flat_map(|nv| {
            (
                prop::collection::vec(1usize..3, nv),
                prop::collection::vec((0usize..nv, 0usize..nv, prop::collection::vec(-2i64..3, 4)), 1..4),
            )
        })
        .prop_map(|(ranks, arrows)| {
            let vertices = ranks.iter().enumerate().map(|(v, &r)| (format!("v{v}"), r)).collect();
            let arrows = arrows
                .into_iter()
                .filter(|(t, h, _)| t < h)
                .enumerate()
                .map(|(k, (t, h, e))| {
                    let (rt, rh) = (ranks[t], ranks[h]);
                    (format!("a{k}"), t, h, IntMatrix::from_i64(rt, rh, &e[..rt * rh]))
                })
                .collect();
            Representation::new(vertices, arrows).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accelerated_counts_match_plain(rep in acyclic_rep(), p in prop::sample::select(vec![2u64, 3])) {
        let plain = count_subreps(&rep, p, 3, Mode::Multivariate, &CountOptions::default()).unwrap();
        let fast = CountOptions { accelerate: true, ..CountOptions::default() };
        let accel = count_subreps(&rep, p, 3, Mode::Multivariate, &fast).unwrap();
        prop_assert_eq!(plain, accel);
    }

    #[test]
    fn representation_json_round_trip(rep in acyclic_rep()) {
        let back = Representation::from_json(&rep.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }

    #[test]
    fn count_table_json_round_trip(rep in acyclic_rep(), multivariate in any::<bool>()) {
        let mode = if multivariate { Mode::Multivariate } else { Mode::Univariate };
        let t = count_subreps(&rep, 2, 2, mode, &CountOptions::default()).unwrap();
        prop_assert_eq!(CountTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn random_posets_agree_with_stanley(
        n in 1usize..6,
        rels in prop::collection::vec((1usize..6, 1usize..6), 0..6),
    ) {
        let rels: Vec<_> = rels.into_iter().filter(|&(a, b)| a < b && b <= n).collect();
        let poset = Poset::new(n, &rels).unwrap();
        let g = stanley_gf(&poset).unwrap();
        let series = series_expand(&g, 6).unwrap().univariate_at(1, &[]).unwrap();
        for (m, c) in series.iter().enumerate() {
            prop_assert_eq!(c, &ppartition_count(&poset, m as u32).into());
        }
        prop_assert_eq!(Poset::from_json(&poset.to_json()).unwrap(), poset);
    }
}

#[test]
fn thin_hasse_counts_do_not_depend_on_the_prime() {
    for (name, poset) in poset_catalog() {
        let rep = hasse_rep(&poset);
        let opts = CountOptions { accelerate: true, ..CountOptions::default() };
        let two = count_subreps(&rep, 2, 8, Mode::Univariate, &opts).unwrap();
        let three = count_subreps(&rep, 3, 8, Mode::Univariate, &opts).unwrap();
        assert_eq!(two.univariate(8), three.univariate(8), "{name}");
    }
}

fn homogeneous_builtins() -> Vec<(&'static str, Representation, Grading)> {
    ["heisenberg", "graded_heisenberg", "m4", "graded_m4"]
        .into_iter()
        .map(|name| {
            let b = builtin_rep(name, &Params::default()).unwrap();
            let g = b.grading.clone().unwrap_or_else(|| cocentral_grading(&b.rep).unwrap());
            (name, b.rep, g)
        })
        .collect()
}

#[test]
fn delta_conjugation_shifts_each_block_once() {
    for (name, rep, grading) in homogeneous_builtins() {
        let shifts = delta_conjugation_shifts(&grading, &rep.arrow_extensions());
        assert!(shifts.iter().all(|&s| s == 1), "{name}: {shifts:?}");
    }
}

#[test]
fn delta_scaling_gives_an_upward_ray() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, rep, grading) in homogeneous_builtins() {
        let g = GradedRep::new(&rep, &grading).unwrap();
        for _ in 0..150 {
            let t = random_tuple(&mut rng, &rep.ranks, 2, 4);
            let m1 = g.m_tilde_1_search(&t).unwrap();
            let ray = g.delta_ray(&t, m1 + 3).unwrap();
            let expected: Vec<bool> = (0..=m1 + 3).map(|m| m >= m1).collect();
            assert_eq!(ray, expected, "{name}: {t:?}");
        }
    }
}

#[test]
fn lemma_on_subrepresentations_at_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, rep, grading) in homogeneous_builtins() {
        let g = GradedRep::new(&rep, &grading).unwrap();
        let mut seen = 0;
        for _ in 0..400 {
            let t = random_tuple(&mut rng, &rep.ranks, 3, 3);
            if qzeta::lattice::is_subrep(&rep, &t).unwrap() {
                let (v, vd) = g.valuation_pair(&t).unwrap();
                assert_eq!(v, vd, "{name}: {t:?}");
                seen += 1;
            }
        }
        assert!(seen > 0, "{name}: no subrepresentations sampled");
    }
}
