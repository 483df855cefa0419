use fiwalk::exactnum::{rat, rat_int, rat_to_f64, Poly};
use fiwalk::fispec::{builtin_family, instantiate, FiGraphSpec, Vertex};
use fiwalk::mixing::{
    adjacency_relation, augmented_chain, classify_trend, cluster, cutoff_diagnostic, laplacian_relation, period, projection_commutes,
    spectrum_sweep, tv_full_state, tv_profile, tv_profile_with, Epsilon, EXACT_HEAD, Trend, WindowTrend, CLUSTER_TOL,
};
use fiwalk::walks::{lazy_walk, parse_walk, simple_walk, stationary, weighted_walk, TransitionRelation};
use fiwalk::Error;
use proptest::prelude::*;

fn eps(s: &str) -> Epsilon {
    Epsilon::parse(s).unwrap()
}

fn standard_eps() -> Vec<Epsilon> {
    vec![eps("1/4"), eps("1/e"), eps("1/10")]
}

#[test]
fn thresholds_past_the_exact_head() {
    let spec = builtin_family("different_orbits").unwrap();
    let p = simple_walk(&spec).unwrap();
    let q = eps("1/4");
    let prof = tv_profile(&spec, &p, 16, 1000, std::slice::from_ref(&q)).unwrap();
    assert_eq!(prof.t_mix(&q), Some(137));
    assert_eq!((prof.d.len(), prof.steps()), (EXACT_HEAD, 137));
    let (before, at) = prof.crossing(&q).unwrap();
    assert!(at <= &q.value && before > &q.value);
    assert!((rat_to_f64(at) - prof.d_float[137]).abs() < 1e-15);
    assert!(prof.d_float.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn complete_graph_mixes_in_one_step() {
    let spec = builtin_family("complete").unwrap();
    let p = simple_walk(&spec).unwrap();
    let prof = tv_profile(&spec, &p, 20, 50, &standard_eps()).unwrap();
    assert_eq!(prof.d[0], rat(19, 20));
    assert_eq!(prof.d[1], rat(1, 20));
    assert_eq!(prof.t_mix(&eps("1/4")), Some(1));
}

#[test]
fn kneser_one_step_distance() {
    // One step is uniform on the C(n-2, 2) disjoint pairs.
    let spec = builtin_family("kneser:2").unwrap();
    let p = simple_walk(&spec).unwrap();
    for n in [12i64, 16, 20] {
        let prof = tv_profile(&spec, &p, n, 50, &standard_eps()).unwrap();
        let (all, disjoint) = (n * (n - 1) / 2, (n - 2) * (n - 3) / 2);
        assert_eq!(prof.d[1], rat(all - disjoint, all), "n={n}");
    }
    assert_eq!(tv_profile(&spec, &p, 12, 50, &standard_eps()).unwrap().t_mix(&eps("1/4")), Some(2));
    assert_eq!(tv_profile(&spec, &p, 16, 50, &standard_eps()).unwrap().t_mix(&eps("1/4")), Some(1));
}

#[test]
fn nocutoff_half_mixed_after_one_step() {
    let spec = builtin_family("nocutoff").unwrap();
    let p = simple_walk(&spec).unwrap();
    let prof = tv_profile(&spec, &p, 20, 10_000, &standard_eps()).unwrap();
    assert!(prof.d[1] <= rat(1, 2) + rat(1, 20));
    let t = prof.t_mix(&eps("1/10")).unwrap();
    assert!(t >= 20 / 2, "t_mix(0.1) = {t}");
}

#[test]
fn periodic_families_are_rejected() {
    for fam in ["complete_bipartite", "crown", "star"] {
        let spec = builtin_family(fam).unwrap();
        let p = simple_walk(&spec).unwrap();
        let n = spec.stabilization_bound();
        assert_eq!(period(&spec, &p, n).unwrap(), 2, "{fam}");
        assert!(matches!(tv_profile(&spec, &p, n, 10, &standard_eps()), Err(Error::PeriodicChain { period: 2, .. })));
        let lazy = lazy_walk(&spec, &fiwalk::exactnum::RationalFunc::constant(rat(1, 2))).unwrap();
        assert_eq!(period(&spec, &lazy, n).unwrap(), 1);
        tv_profile(&spec, &lazy, n, 200, &standard_eps()).unwrap();
    }
}

#[test]
fn thresholds_are_ordered_and_profile_monotone() {
    for fam in ["kneser:2", "johnson:2", "bottleneck:1", "nocutoff"] {
        let spec = builtin_family(fam).unwrap();
        let p = parse_walk(&spec, "lazy:1/2").unwrap();
        let n = spec.stabilization_bound() + 2;
        let prof = tv_profile(&spec, &p, n, 10_000, &standard_eps()).unwrap();
        assert!(prof.d.windows(2).all(|w| w[1] <= w[0]), "{fam}");
        let t: Vec<usize> = standard_eps().iter().map(|e| prof.t_mix(e).unwrap()).collect();
        // 1/4 < 1/e and 1/10 < 1/4
        assert!(t[0] >= t[1] && t[2] >= t[0], "{fam}: {t:?}");
    }
}

fn compare_full_state(spec: &FiGraphSpec, p: &TransitionRelation, n: i64) {
    let pi = stationary(spec, p).unwrap();
    let prof = tv_profile_with(spec, p, &pi, n, 60, &[eps("1/100")]).unwrap();
    let full = tv_full_state(spec, p, &pi, n, prof.steps()).unwrap();
    for (t, (a, b)) in prof.d_f64().iter().zip(&full).enumerate() {
        assert!((a - b).abs() <= 1e-12, "{} {} n={n} t={t}: {a} vs {b}", spec.name, p.label());
    }
}

#[test]
fn orbit_profile_matches_full_state() {
    for fam in ["complete", "kneser:2", "johnson:2", "bottleneck:1", "nocutoff"] {
        let spec = builtin_family(fam).unwrap();
        let n0 = spec.stabilization_bound();
        for p in [simple_walk(&spec).unwrap(), weighted_walk(&spec).unwrap()] {
            for n in [n0, n0 + 1] {
                compare_full_state(&spec, &p, n);
            }
        }
    }
}

#[test]
fn johnson_three_within_coupling_bound() {
    let spec = builtin_family("johnson:3").unwrap();
    let p = simple_walk(&spec).unwrap();
    for n in [20i64, 30] {
        let prof = tv_profile(&spec, &p, n, 100, &[eps("1/e")]).unwrap();
        assert!(prof.t_mix(&eps("1/e")).unwrap() <= 7, "n={n}");
    }
}

#[test]
fn cutoff_window_trends() {
    let q = eps("1/4");
    let kn = builtin_family("complete").unwrap();
    let d = cutoff_diagnostic(&kn, &simple_walk(&kn).unwrap(), &(5..=12).collect::<Vec<_>>(), &q).unwrap();
    assert!(d.rows.iter().all(|r| r.3 == 0));
    assert_eq!(d.trend, WindowTrend::Flat);
    let kneser = builtin_family("kneser:2").unwrap();
    let d = cutoff_diagnostic(&kneser, &simple_walk(&kneser).unwrap(), &(8..=20).collect::<Vec<_>>(), &q).unwrap();
    assert_eq!(d.trend, WindowTrend::Narrowing);
    assert_eq!(d.rows.last().unwrap().3, 0);
    let nc = builtin_family("nocutoff").unwrap();
    let d = cutoff_diagnostic(&nc, &simple_walk(&nc).unwrap(), &(10..=30).step_by(4).collect::<Vec<_>>(), &q).unwrap();
    assert_eq!(d.trend, WindowTrend::Widening);
}

fn cluster_multiplicities(spec: &FiGraphSpec, r: &fiwalk::walks::VirtualRelation, ns: &[i64]) -> Vec<Vec<(f64, usize)>> {
    spectrum_sweep(spec, r, ns, CLUSTER_TOL).unwrap().per_n.into_iter().map(|s| s.clusters).collect()
}

#[test]
fn complete_graph_spectra() {
    let spec = builtin_family("complete").unwrap();
    let ns: Vec<i64> = (5..=15).collect();
    for (n, c) in ns.iter().zip(cluster_multiplicities(&spec, &adjacency_relation(&spec), &ns)) {
        assert_eq!(c.len(), 2);
        assert!((c[0].0 + 1.0).abs() < 1e-7 && c[0].1 == *n as usize - 1);
        assert!((c[1].0 - (*n - 1) as f64).abs() < 1e-7 && c[1].1 == 1);
    }
    for (n, c) in ns.iter().zip(cluster_multiplicities(&spec, &laplacian_relation(&spec), &ns)) {
        assert!(c[0].0.abs() < 1e-7 && c[0].1 == 1);
        assert!((c[1].0 - *n as f64).abs() < 1e-7 && c[1].1 == *n as usize - 1);
    }
}

#[test]
fn johnson_spectrum_stabilizes() {
    let spec = builtin_family("johnson:2").unwrap();
    let rep = spectrum_sweep(&spec, &adjacency_relation(&spec), &(8..=14).collect::<Vec<_>>(), CLUSTER_TOL).unwrap();
    assert_eq!(rep.distinct, Some(3));
    let m = rep.multiplicities.unwrap();
    assert_eq!(rep.validated_on, vec![12, 13, 14]);
    // 1, n - 1, n(n - 3)/2 from the smallest eigenvalue -2 upwards
    assert_eq!(m[0], Poly::from_ints(&[0, -3, 1]).scale(&rat(1, 2)));
    assert_eq!(m[1], Poly::from_ints(&[-1, 1]));
    assert_eq!(m[2], Poly::from_ints(&[1]));
}

#[test]
fn non_symmetric_relation_spectrum() {
    // The simple walk on bottleneck(1) is reversible, so its spectrum is real.
    let spec = builtin_family("bottleneck:1").unwrap();
    let p = simple_walk(&spec).unwrap();
    let rep = spectrum_sweep(&spec, &p.relation, &[6, 7], CLUSTER_TOL).unwrap();
    for s in &rep.per_n {
        assert!((s.eigenvalues.last().unwrap() - 1.0).abs() < 1e-9);
        let total: usize = s.clusters.iter().map(|c| c.1).sum();
        assert_eq!(total, instantiate(&spec, s.n).unwrap().vertex_count());
    }
}

#[test]
fn augmented_chain_projects_onto_quotient() {
    let spec = builtin_family("variety").unwrap();
    let n = 12;
    let label = (spec.labels_at(n) - 1) as u16;
    for walk in ["simple", "weighted", "lazy:1/3"] {
        let p = parse_walk(&spec, walk).unwrap();
        let aug = augmented_chain(&spec, &p, n, label).unwrap();
        // red: 3 positions or absent; blue and green: one class or absent
        assert_eq!(aug.states.len(), 4 + 2 + 2);
        for row in &aug.matrix {
            assert_eq!(row.iter().sum::<fiwalk::exactnum::Rational>(), rat_int(1));
        }
        assert!(projection_commutes(&spec, &p, &aug).unwrap(), "{walk}");
    }
}

#[test]
fn augmented_chain_is_a_lumping_of_the_full_walk() {
    let spec = builtin_family("variety").unwrap();
    let (n, p) = (9, simple_walk(&spec).unwrap());
    let label = 4u16;
    let aug = augmented_chain(&spec, &p, n, label).unwrap();
    let g = instantiate(&spec, n).unwrap();
    let rows = p.relation.sparse_rows(&spec, &g).unwrap();
    let state_of = |v: &Vertex| {
        let pos = v.labels.iter().position(|&x| x == label);
        aug.states
            .iter()
            .position(|s| {
                s.orbit == v.orbit
                    && s.position
                        == pos.map(|i| spec.vertex_orbits[v.orbit].group().elements().iter().map(|h| h[i]).min().unwrap())
            })
            .unwrap()
    };
    for (i, v) in g.vertices.iter().enumerate().step_by(7) {
        let mut acc = vec![rat_int(0); aug.states.len()];
        for (j, a) in &rows[i] {
            acc[state_of(&g.vertices[*j])] += a;
        }
        assert_eq!(acc, aug.matrix[state_of(v)]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clusters_partition_the_spectrum(vals in prop::collection::vec(-50i32..50, 1..40), reps in prop::collection::vec(1usize..4, 40)) {
        let mut xs = Vec::new();
        for (v, r) in vals.iter().zip(&reps) {
            for k in 0..*r {
                xs.push(*v as f64 + k as f64 * 1e-12);
            }
        }
        xs.sort_by(f64::total_cmp);
        let c = cluster(&xs, CLUSTER_TOL);
        prop_assert_eq!(c.iter().map(|x| x.1).sum::<usize>(), xs.len());
        let mut distinct = vals.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(c.len(), distinct.len());
    }

    #[test]
    fn exact_monomials_classify(k in 0usize..4, c in 0.1f64..10.0, start in 5i64..30) {
        let pts: Vec<(i64, f64)> = (start..start + 12).map(|n| (n, c * (n as f64).powi(k as i32))).collect();
        let fit = classify_trend(&pts).unwrap();
        prop_assert_eq!(fit.trend.degree() as usize, k);
        prop_assert!(fit.unambiguous);
    }

    #[test]
    fn kn_distance_is_one_over_n(n in 3i64..40) {
        let spec = builtin_family("complete").unwrap();
        let p = simple_walk(&spec).unwrap();
        let prof = tv_profile(&spec, &p, n, 5, &[eps("1/1000")]).unwrap();
        prop_assert_eq!(&prof.d[1], &rat(1, n));
        prop_assert!(rat_to_f64(&prof.d[2]) <= 1.0 / n as f64);
    }
}

#[test]
fn trend_rejects_tiny_sweeps() {
    assert!(classify_trend(&[(5, 1.0)]).is_err());
    let fit = classify_trend(&[(10, 3.0), (11, 3.0), (12, 3.0), (13, 3.0)]).unwrap();
    assert_eq!(fit.trend, Trend::Constant);
}
