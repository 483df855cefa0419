use fiwalk::exactnum::{parse_ratfunc, rat, rat_int, rat_to_f64, RationalFunc, Rational};
use fiwalk::fispec::{builtin_family, instantiate, FiGraphSpec};
use fiwalk::hitting::{
    build_roofed_chain, default_sweep, greens_matrix_at, greens_oracle, greens_symbolic, hitting_oracle, hitting_symbolic,
    moments_oracle, moments_symbolic, simulate_moments, GreensNormalization, HittingTable, PatternRows,
};
use fiwalk::walks::{lazy_walk, simple_walk, stationary, weighted_walk, TransitionRelation};

fn rf(s: &str) -> RationalFunc {
    parse_ratfunc(s).unwrap()
}

fn table(spec: &FiGraphSpec, p: &TransitionRelation, roof: usize) -> HittingTable {
    let chain = build_roofed_chain(spec, p, roof, &default_sweep(spec, p)).unwrap();
    hitting_symbolic(&chain).unwrap()
}

fn q(spec: &FiGraphSpec, t: &HittingTable, pat: &str) -> RationalFunc {
    t.get(&spec.parse_pattern(pat).unwrap()).unwrap().clone()
}

/// Symbolic hitting times against the full-graph oracle at `n`.
fn check_against_oracle(spec: &FiGraphSpec, p: &TransitionRelation, t: &HittingTable, n: i64) {
    let g = instantiate(spec, n).unwrap();
    let rows = PatternRows::new(spec, p, &g).unwrap();
    let target = g.orbit_vertices(t.roof).start;
    let y = &g.vertices[target];
    let oracle = hitting_oracle(spec, &g, &rows, target).unwrap();
    for (i, x) in g.vertices.iter().enumerate() {
        let s = spec.classify(x, y);
        assert_eq!(t.get(&s).unwrap().eval(n).unwrap(), oracle[i], "{} n={n} {}", spec.name, spec.fmt_pattern(s.clone()));
    }
}

#[test]
fn complete_graph_chain_entries() {
    let spec = builtin_family("complete").unwrap();
    let p = simple_walk(&spec).unwrap();
    let chain = build_roofed_chain(&spec, &p, 0, &default_sweep(&spec, &p)).unwrap();
    assert_eq!(chain.len(), 2);
    let ne = chain.state_index(&spec.parse_pattern("vertex>vertex[]").unwrap()).unwrap();
    let eq = chain.diagonal;
    assert_eq!(chain.transitions[ne][eq], rf("1/(n-1)"));
    assert_eq!(chain.transitions[ne][ne], rf("(n-2)/(n-1)"));
    assert_eq!(chain.transitions[eq][ne], RationalFunc::one());
    assert_eq!(chain.transitions[eq][eq], RationalFunc::zero());
    for m in chain.snapshots.values() {
        for row in m {
            assert_eq!(row.iter().sum::<Rational>(), rat_int(1));
        }
    }
}

#[test]
fn complete_graph_hitting() {
    let spec = builtin_family("complete").unwrap();
    let p = simple_walk(&spec).unwrap();
    let t = table(&spec, &p, 0);
    assert_eq!(q(&spec, &t, "vertex>vertex[]"), rf("n-1"));
    assert_eq!(q(&spec, &t, "vertex>vertex[0=0]"), RationalFunc::zero());
    for n in 3..=12 {
        check_against_oracle(&spec, &p, &t, n);
    }
    let g = instantiate(&spec, 4).unwrap();
    let rows = PatternRows::new(&spec, &p, &g).unwrap();
    assert_eq!(hitting_oracle(&spec, &g, &rows, 0).unwrap(), vec![rat_int(0), rat_int(3), rat_int(3), rat_int(3)]);
}

#[test]
fn complete_bipartite_hitting() {
    let spec = builtin_family("complete_bipartite").unwrap();
    let p = simple_walk(&spec).unwrap();
    let t = table(&spec, &p, 0);
    assert_eq!(t.states.len(), 4);
    assert_eq!(q(&spec, &t, "right>left[]"), rf("2n-1"));
    assert_eq!(q(&spec, &t, "right>left[0=0]"), rf("2n-1"));
    assert_eq!(q(&spec, &t, "left>left[]"), rf("2n"));
    for n in 2..=8 {
        check_against_oracle(&spec, &p, &t, n);
    }
}

#[test]
fn kneser_chain_has_three_states() {
    let spec = builtin_family("kneser:2").unwrap();
    let p = simple_walk(&spec).unwrap();
    let chain = build_roofed_chain(&spec, &p, 0, &default_sweep(&spec, &p)).unwrap();
    assert_eq!(chain.len(), 3);
    let t = hitting_symbolic(&chain).unwrap();
    check_against_oracle(&spec, &p, &t, 5);
    check_against_oracle(&spec, &p, &t, 9);
}

#[test]
fn star_leaf_roof_matches_oracle() {
    let spec = builtin_family("star").unwrap();
    let p = simple_walk(&spec).unwrap();
    let leaf = spec.orbit_index("leaf").unwrap();
    let t = table(&spec, &p, leaf);
    for n in 5..=9 {
        check_against_oracle(&spec, &p, &t, n);
    }
    assert_eq!(q(&spec, &t, "center>leaf[]"), rf("2n-3"));
    assert_eq!(q(&spec, &t, "leaf>leaf[]"), rf("2n-2"));
}

#[test]
fn complete_graph_variance_and_third_cumulant() {
    let spec = builtin_family("complete").unwrap();
    let p = simple_walk(&spec).unwrap();
    let chain = build_roofed_chain(&spec, &p, 0, &default_sweep(&spec, &p)).unwrap();
    let m = moments_symbolic(&chain, 3).unwrap();
    let s = chain.state_index(&spec.parse_pattern("vertex>vertex[]").unwrap()).unwrap();
    assert_eq!(m.raw[0], hitting_symbolic(&chain).unwrap().q);
    assert_eq!(m.variance(s).unwrap(), &rf("(n-1)(n-2)"));
    for n in 3..=12 {
        // geometric on {1, 2, ...} with success probability 1/(n-1)
        let pr = rat(1, n - 1);
        let one = rat_int(1);
        let var = (&one - &pr) / (&pr * &pr);
        let k3 = (rat_int(2) - &pr) * (&one - &pr) / (&pr * &pr * &pr);
        assert_eq!(m.central[1][s].eval(n).unwrap(), var);
        assert_eq!(m.cumulants[2][s].eval(n).unwrap(), k3);
        assert_eq!(m.central[2][s].eval(n).unwrap(), k3);
    }
    let g = instantiate(&spec, 4).unwrap();
    let rows = PatternRows::new(&spec, &p, &g).unwrap();
    let o = moments_oracle(&spec, &g, &rows, 0, 2).unwrap();
    assert_eq!(&o[1][1] - &o[0][1] * &o[0][1], rat_int(6));
}

#[test]
fn complete_bipartite_variance_matches_oracle() {
    let spec = builtin_family("complete_bipartite").unwrap();
    let p = simple_walk(&spec).unwrap();
    let chain = build_roofed_chain(&spec, &p, 0, &default_sweep(&spec, &p)).unwrap();
    let m = moments_symbolic(&chain, 2).unwrap();
    let g = instantiate(&spec, 3).unwrap();
    assert_eq!(g.vertex_count(), 6);
    let rows = PatternRows::new(&spec, &p, &g).unwrap();
    let o = moments_oracle(&spec, &g, &rows, 0, 2).unwrap();
    let y = &g.vertices[0];
    for (i, x) in g.vertices.iter().enumerate() {
        let s = chain.state_index(&spec.classify(x, y)).unwrap();
        assert_eq!(m.raw[1][s].eval(3).unwrap(), o[1][i]);
        assert!(m.variance(s).unwrap().eval(3).unwrap() >= rat_int(0));
    }
}

#[test]
fn kneser_third_moment_by_simulation() {
    let spec = builtin_family("kneser:2").unwrap();
    let p = simple_walk(&spec).unwrap();
    let g = instantiate(&spec, 5).unwrap();
    let rows = PatternRows::new(&spec, &p, &g).unwrap();
    let o = moments_oracle(&spec, &g, &rows, 0, 3).unwrap();
    for start in [1, 9] {
        let mc = simulate_moments(&rows, start, 0, 1_000_000, 3, 2024);
        for (i, (mean, se)) in mc.iter().enumerate() {
            let exact = rat_to_f64(&o[i][start]);
            assert!((mean - exact).abs() <= 3.0 * se, "order {} start {start}: {mean} vs {exact} (se {se})", i + 1);
        }
    }
}

#[test]
fn greens_complete_and_star() {
    let spec = builtin_family("complete").unwrap();
    let p = simple_walk(&spec).unwrap();
    let pi = stationary(&spec, &p).unwrap();
    let g = greens_symbolic(&spec, &p, &pi, &[table(&spec, &p, 0)], GreensNormalization::UnitWeights).unwrap();
    assert_eq!(g.get(&spec.parse_pattern("vertex>vertex[]").unwrap()).unwrap().scaled, rf("-1/n^2"));
    assert_eq!(g.get(&spec.parse_pattern("vertex>vertex[0=0]").unwrap()).unwrap().scaled, rf("(n-1)/n^2"));
    assert!(g.all_rational());
    for n in [5, 8, 12] {
        let graph = instantiate(&spec, n).unwrap();
        let rows = PatternRows::new(&spec, &p, &graph).unwrap();
        let m = greens_matrix_at(&spec, &graph, &g).unwrap();
        let piv: Vec<f64> = vec![1.0 / n as f64; n as usize];
        greens_oracle(&rows, &piv, &m, 1e-9).unwrap();
        let mut bad = m.clone();
        bad[0][1] += 0.01;
        assert!(greens_oracle(&rows, &piv, &bad, 1e-9).is_err());
    }

    let spec = builtin_family("star").unwrap();
    let p = simple_walk(&spec).unwrap();
    let pi = stationary(&spec, &p).unwrap();
    let tables: Vec<_> = (0..2).map(|r| table(&spec, &p, r)).collect();
    let g = greens_symbolic(&spec, &p, &pi, &tables, GreensNormalization::UnitWeights).unwrap();
    let s = |pat: &str| g.get(&spec.parse_pattern(pat).unwrap()).unwrap().scaled.clone();
    assert_eq!(s("center>center[]"), rf("1/(4(n-1))"));
    assert_eq!(s("leaf>leaf[0=0]"), rf("(4n-7)/(4(n-1))"));
    assert_eq!(s("leaf>leaf[]"), rf("-3/(4(n-1))"));
    assert_eq!(s("center>leaf[]"), rf("-1/(4(n-1))"));
    assert_eq!(s("leaf>center[]"), rf("-1/(4(n-1))"));
    assert!(!g.all_rational());
    for n in [5, 8, 12] {
        let graph = instantiate(&spec, n).unwrap();
        let rows = PatternRows::new(&spec, &p, &graph).unwrap();
        let m = greens_matrix_at(&spec, &graph, &g).unwrap();
        let per = pi.per_vertex_at(n).unwrap();
        let piv: Vec<f64> = graph.vertices.iter().map(|v| rat_to_f64(&per[v.orbit])).collect();
        greens_oracle(&rows, &piv, &m, 1e-9).unwrap();
    }
}

#[test]
fn oracle_equivalence_small_families() {
    for fam in ["complete", "complete_bipartite", "star", "kneser:2", "johnson:2", "crown", "nocutoff", "bottleneck:1"] {
        let spec = builtin_family(fam).unwrap();
        let walks = [simple_walk(&spec).unwrap(), lazy_walk(&spec, &rf("1/2")).unwrap(), weighted_walk(&spec).unwrap()];
        for p in &walks {
            for roof in 0..spec.vertex_orbits.len() {
                let chain = build_roofed_chain(&spec, p, roof, &default_sweep(&spec, p)).unwrap();
                let m = moments_symbolic(&chain, 2).unwrap();
                let n0 = spec.stabilization_bound();
                for n in n0..=n0 + 3 {
                    let g = instantiate(&spec, n).unwrap();
                    let rows = PatternRows::new(&spec, p, &g).unwrap();
                    let target = g.orbit_vertices(roof).start;
                    let o = moments_oracle(&spec, &g, &rows, target, 2).unwrap();
                    let y = &g.vertices[target];
                    for (i, x) in g.vertices.iter().enumerate() {
                        let s = chain.state_index(&spec.classify(x, y)).unwrap();
                        for k in 0..2 {
                            assert_eq!(m.raw[k][s].eval(n).unwrap(), o[k][i], "{fam} {} n={n}", p.label());
                        }
                        if s != chain.diagonal {
                            assert!(m.raw[0][s].eval(n).unwrap() >= rat_int(1));
                        }
                    }
                }
            }
        }
    }
}
