use fiwalk::exactnum::{parse_ratfunc, rat, rat_int, solve_rational, QMatrix, RationalFunc, Rational};
use fiwalk::fispec::{builtin_family, default_families, instantiate, FiGraphSpec, WalkDoc};
use fiwalk::walks::{
    check_reversible, custom_walk, lazy_walk, parse_walk, rho, simple_walk, stationary, weighted_walk, TransitionRelation,
};
use proptest::prelude::*;

fn rf(s: &str) -> RationalFunc {
    parse_ratfunc(s).unwrap()
}

fn coeff(spec: &FiGraphSpec, p: &TransitionRelation, pat: &str) -> RationalFunc {
    p.get(&spec.parse_pattern(pat).unwrap())
}

#[test]
fn complete_graph_simple_walk() {
    let spec = builtin_family("complete").unwrap();
    let p = simple_walk(&spec).unwrap();
    assert_eq!(coeff(&spec, &p, "vertex>vertex[]"), rf("1/(n-1)"));
    assert_eq!(coeff(&spec, &p, "vertex>vertex[0=0]"), RationalFunc::zero());
}

#[test]
fn complete_bipartite_cross_coefficient() {
    let spec = builtin_family("complete_bipartite").unwrap();
    let p = simple_walk(&spec).unwrap();
    assert_eq!(coeff(&spec, &p, "left>right[]"), rf("1/n"));
    assert_eq!(coeff(&spec, &p, "left>right[0=0]"), rf("1/n"));
    let g = instantiate(&spec, 3).unwrap();
    assert!((0..g.vertex_count()).all(|u| g.neighbors(u).len() == 3));
}

#[test]
fn star_coefficients() {
    let spec = builtin_family("star").unwrap();
    let p = simple_walk(&spec).unwrap();
    assert_eq!(coeff(&spec, &p, "leaf>center[]"), RationalFunc::one());
    assert_eq!(coeff(&spec, &p, "center>leaf[]"), rf("1/(n-1)"));
}

#[test]
fn lazy_walks() {
    let spec = builtin_family("complete").unwrap();
    let simple = simple_walk(&spec).unwrap();
    assert_eq!(lazy_walk(&spec, &RationalFunc::zero()).unwrap().relation, simple.relation);
    let lazy = lazy_walk(&spec, &rf("1/2")).unwrap();
    assert_eq!(coeff(&spec, &lazy, "vertex>vertex[0=0]"), rf("1/2"));
    assert_eq!(coeff(&spec, &lazy, "vertex>vertex[]"), rf("1/(2n-2)"));
    assert!(matches!(lazy_walk(&spec, &RationalFunc::one()), Err(fiwalk::Error::InvalidHold(_))));
    assert!(matches!(lazy_walk(&spec, &rf("-1/3")), Err(fiwalk::Error::InvalidHold(_))));
    assert_eq!(parse_walk(&spec, "lazy:0.5").unwrap().relation, lazy.relation);
}

#[test]
fn weighted_walk_examples() {
    let spec = builtin_family("different_orbits").unwrap();
    let w = weighted_walk(&spec).unwrap();
    for pat in ["vertex>vertex[0=0]", "vertex>vertex[1=1,2=2,3=3]"] {
        let p = spec.parse_pattern(pat).unwrap();
        let count = RationalFunc::from(fiwalk::fispec::partner_count_exact_poly(&spec, &p));
        assert_eq!(&count * &w.get(&p), rf("1/2"), "{pat}");
    }
    let spec = builtin_family("bottleneck:1").unwrap();
    let w = weighted_walk(&spec).unwrap();
    let red_clique = coeff(&spec, &w, "red>red[]");
    assert_eq!(red_clique, rf("1/(2n-2)"));
    assert_eq!(coeff(&spec, &w, "red>green[]"), rf("1/2"));
    let spec = builtin_family("complete").unwrap();
    assert_eq!(weighted_walk(&spec).unwrap().relation, simple_walk(&spec).unwrap().relation);
}

#[test]
fn stationary_complete_is_uniform() {
    let spec = builtin_family("complete").unwrap();
    let pi = stationary(&spec, &simple_walk(&spec).unwrap()).unwrap();
    assert_eq!(pi.per_vertex, vec![rf("1/n")]);
}

/// Stationary vector of a dense exact matrix by solving `pi (P - I) = 0`
/// with one equation replaced by normalization.
fn dense_stationary(p: &[Vec<Rational>]) -> Vec<Rational> {
    let m = p.len();
    let mut rows = vec![vec![rat_int(0); m]; m];
    for j in 0..m - 1 {
        for i in 0..m {
            rows[j][i] = p[i][j].clone() - if i == j { rat_int(1) } else { rat_int(0) };
        }
    }
    rows[m - 1] = vec![rat_int(1); m];
    let mut b = vec![rat_int(0); m];
    b[m - 1] = rat_int(1);
    solve_rational(&QMatrix::from_rows(rows), &b).unwrap()
}

#[test]
fn bottleneck_stationary_matches_degrees() {
    let spec = builtin_family("bottleneck:1").unwrap();
    let p = simple_walk(&spec).unwrap();
    let pi = stationary(&spec, &p).unwrap();
    let n = 4;
    let g = instantiate(&spec, n).unwrap();
    assert_eq!(g.vertex_count(), 2 * n as usize + 1);
    let m = g.vertex_count();
    let mut dense = vec![vec![rat_int(0); m]; m];
    for u in 0..m {
        let d = g.neighbors(u).len() as i64;
        for &(v, _) in g.neighbors(u) {
            dense[u][v as usize] = rat(1, d);
        }
    }
    let oracle = dense_stationary(&dense);
    let total: i64 = (0..m).map(|u| g.neighbors(u).len() as i64).sum();
    let per = pi.per_vertex_at(n).unwrap();
    for u in 0..m {
        let d = g.neighbors(u).len() as i64;
        assert_eq!(oracle[u], rat(d, total));
        assert_eq!(per[g.vertices[u].orbit], oracle[u]);
    }
}

#[test]
fn weighted_bottleneck_favours_green() {
    let spec = builtin_family("bottleneck:2").unwrap();
    let green = spec.orbit_index("green").unwrap();
    let simple = stationary(&spec, &simple_walk(&spec).unwrap()).unwrap();
    let weighted = stationary(&spec, &weighted_walk(&spec).unwrap()).unwrap();
    for n in [10, 20, 40] {
        let (s, w) = (simple.mass[green].eval(n).unwrap(), weighted.mass[green].eval(n).unwrap());
        assert!(w > s * rat_int(n), "n={n}");
    }
}

#[test]
fn reversibility() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        for walk in [simple_walk(&spec).unwrap(), lazy_walk(&spec, &rf("1/2")).unwrap()] {
            let pi = stationary(&spec, &walk).unwrap();
            assert!(check_reversible(&spec, &walk, &pi).unwrap().reversible, "{fam} {}", walk.label());
        }
    }
    let spec = builtin_family("different_orbits").unwrap();
    let w = weighted_walk(&spec).unwrap();
    let pi = stationary(&spec, &w).unwrap();
    assert!(check_reversible(&spec, &w, &pi).unwrap().reversible);
    // detailed balance at n = 8 on explicit pairs
    let per = pi.per_vertex_at(8).unwrap();
    for (p, a) in w.relation.iter() {
        let back = w.get(&spec.transpose(p));
        assert_eq!(&per[p.left] * a.eval(8).unwrap(), &per[p.right] * back.eval(8).unwrap());
    }
}

#[test]
fn variety_weighted_outcome() {
    let spec = builtin_family("variety").unwrap();
    let w = weighted_walk(&spec).unwrap();
    let pi = stationary(&spec, &w).unwrap();
    let rev = check_reversible(&spec, &w, &pi).unwrap();
    // The outcome is recorded either way; a failure must name a pattern.
    assert_eq!(rev.reversible, rev.witness.is_none());
    println!("variety weighted reversible = {}, witness = {:?}", rev.reversible, rev.witness);
    if !rev.reversible {
        assert!(matches!(rho(&spec, &simple_walk(&spec).unwrap(), &(10..=24).collect::<Vec<_>>()), Err(fiwalk::Error::NotReversible { .. })));
    }
}

#[test]
fn rho_examples() {
    let ns: Vec<i64> = (9..=22).collect();
    let spec = builtin_family("different_orbits").unwrap();
    let w = weighted_walk(&spec).unwrap();
    let r = rho(&spec, &w, &ns).unwrap();
    assert_eq!(r.fitted, RationalFunc::one());
    let r = rho(&spec, &simple_walk(&spec).unwrap(), &ns).unwrap();
    assert_eq!(r.fitted.decay_order(), 2);
    assert!(r.values.iter().all(|(_, v)| *v > rat_int(0) && *v <= rat_int(1)));
    let spec = builtin_family("complete").unwrap();
    let r = rho(&spec, &simple_walk(&spec).unwrap(), &(3..=16).collect::<Vec<_>>()).unwrap();
    assert_eq!(r.fitted, RationalFunc::one());
}

#[test]
fn rho_at_most_one_everywhere() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        let n0 = spec.stabilization_bound();
        let ns: Vec<i64> = (n0..n0 + 14).collect();
        let Ok(r) = rho(&spec, &simple_walk(&spec).unwrap(), &ns) else {
            continue;
        };
        assert!(r.values.iter().all(|(_, v)| *v > rat_int(0) && *v <= rat_int(1)), "{fam}");
    }
}

#[test]
fn simple_walk_matches_instantiated_graph() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        let p = simple_walk(&spec).unwrap();
        let n0 = spec.stabilization_bound();
        let top = if spec.max_arity() >= 4 { n0 + 1 } else { n0 + 3 };
        for n in n0..=top {
            let g = instantiate(&spec, n).unwrap();
            let rows = p.relation.sparse_rows(&spec, &g).unwrap();
            for u in 0..g.vertex_count() {
                let deg: i64 = g.neighbors(u).iter().map(|&(v, _)| if v as usize == u { 2 } else { 1 }).sum();
                let direct: Vec<(usize, Rational)> = g
                    .neighbors(u)
                    .iter()
                    .map(|&(v, _)| (v as usize, rat(if v as usize == u { 2 } else { 1 }, deg)))
                    .collect();
                assert_eq!(rows[u], direct, "{fam} n={n}");
            }
        }
    }
}

#[test]
fn custom_walks_are_validated() {
    let spec = builtin_family("complete").unwrap();
    let doc = |m: Vec<[usize; 2]>, c: &str| WalkDoc {
        left: "vertex".into(),
        right: "vertex".into(),
        matches: m,
        coefficient: c.into(),
    };
    let ok = custom_walk(&spec, &[doc(vec![], "1/(2n-2)"), doc(vec![[0, 0]], "1/2")]).unwrap();
    assert_eq!(ok.relation, lazy_walk(&spec, &rf("1/2")).unwrap().relation);
    let err = custom_walk(&spec, &[doc(vec![], "1/n")]).unwrap_err();
    assert!(matches!(err, fiwalk::Error::InvalidTransition(_)), "{err}");
    let err = custom_walk(&spec, &[doc(vec![], "2/(n-1)"), doc(vec![[0, 0]], "-1")]).unwrap_err();
    assert!(matches!(err, fiwalk::Error::InvalidTransition(_)), "{err}");
    // Staying put forever is stochastic but disconnected.
    let err = custom_walk(&spec, &[doc(vec![[0, 0]], "1")]).unwrap_err();
    assert!(matches!(err, fiwalk::Error::DisconnectedFamily(_)), "{err}");
}

#[test]
fn crown_is_connected_but_bipartite_walks_build() {
    let spec = builtin_family("crown").unwrap();
    assert_eq!(coeff(&spec, &simple_walk(&spec).unwrap(), "left>right[]"), rf("1/(n-1)"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lazy_row_sums_stay_one(fam_idx in 0usize..12, a in 1i64..9, b in 1i64..9) {
        let spec = builtin_family(&default_families()[fam_idx]).unwrap();
        let hold = RationalFunc::constant(rat(a, a + b));
        let p = lazy_walk(&spec, &hold).unwrap();
        let q = p.quotient(&spec);
        for row in q {
            prop_assert_eq!(row.into_iter().sum::<RationalFunc>(), RationalFunc::one());
        }
    }
}
