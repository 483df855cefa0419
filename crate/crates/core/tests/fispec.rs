use std::collections::BTreeSet;

use fiwalk::exactnum::{rat_int, Poly};
use fiwalk::fispec::{
    builtin_family, classify_pair, default_families, instantiate, orbit_size, orbit_tuples, pair_orbit_size_exact, roofed_size_exact,
    FiGraphSpec, Orbit, Vertex,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn brute_kneser_edges(n: u16, r: usize) -> (usize, usize) {
    fn subsets(n: u16, r: usize) -> Vec<Vec<u16>> {
        if r == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for last in (r as u16 - 1)..n {
            for mut s in subsets(last, r - 1) {
                s.push(last);
                out.push(s);
            }
        }
        out
    }
    let vs = subsets(n, r);
    let mut e = 0;
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            if a.iter().all(|x| !b.contains(x)) {
                e += 1;
            }
        }
    }
    (vs.len(), e)
}

#[test]
fn complete_k4() {
    let g = instantiate(&builtin_family("complete").unwrap(), 4).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (4, 6));
}

#[test]
fn petersen() {
    let g = instantiate(&builtin_family("kneser:2").unwrap(), 5).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), brute_kneser_edges(5, 2));
    assert_eq!((g.vertex_count(), g.edge_count()), (10, 15));
    for n in 5..9 {
        let g = instantiate(&builtin_family("kneser(3)").unwrap(), n + 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), brute_kneser_edges(n as u16 + 2, 3));
    }
}

#[test]
fn different_orbits_vertex_count() {
    let g = instantiate(&builtin_family("different_orbits").unwrap(), 5).unwrap();
    assert_eq!(g.vertex_count(), 5 * 4 * 3 * 2);
}

#[test]
fn variety_counts() {
    let spec = builtin_family("variety").unwrap();
    let g = instantiate(&spec, 6).unwrap();
    let sizes: Vec<usize> = (0..3).map(|o| g.orbit_vertices(o).len()).collect();
    // 4-tuples of distinct labels up to rotation, counted by brute force
    let mut cyc = BTreeSet::new();
    for a in 0..6u8 {
        for b in 0..6u8 {
            for c in 0..6u8 {
                for d in 0..6u8 {
                    let t = [a, b, c, d];
                    let distinct: BTreeSet<u8> = t.iter().copied().collect();
                    if distinct.len() < 4 {
                        continue;
                    }
                    let rot = (0..4).map(|s| [t[s], t[(s + 1) % 4], t[(s + 2) % 4], t[(s + 3) % 4]]).min().unwrap();
                    cyc.insert(rot);
                }
            }
        }
    }
    assert_eq!(sizes, vec![120, 15, cyc.len()]);
    assert_eq!(cyc.len(), 90);
}

#[test]
fn kneser_overlap_pairs_share_orbit() {
    let spec = builtin_family("kneser:2").unwrap();
    let v = |a: u16, b: u16| Vertex::new(0, &spec.canonical_tuple(0, &[a, b]));
    let p1 = classify_pair(&spec, &v(1, 2), &v(1, 3));
    let p2 = classify_pair(&spec, &v(4, 5), &v(4, 2));
    assert_eq!(p1, p2);
    // the permutation 1->4, 2->5, 3->2 maps one pair to the other
    assert_eq!(p1, spec.parse_pattern("set>set[0=0]").unwrap());
}

#[test]
fn complete_graph_orbits() {
    let spec = builtin_family("complete").unwrap();
    let (a, b) = (Vertex::new(0, &[0]), Vertex::new(0, &[1]));
    assert_eq!(classify_pair(&spec, &a, &a), spec.diagonal(0));
    let off = classify_pair(&spec, &a, &b);
    assert!(off.matches.is_empty());
    assert_eq!(orbit_size(&spec, &Orbit::Vertex(0)).unwrap(), Poly::x());
    assert_eq!(orbit_size(&spec, &Orbit::Pair(off)).unwrap(), Poly::from_ints(&[0, -1, 1]));
}

#[test]
fn kneser_orbit_size_from_counts() {
    let spec = builtin_family("kneser:2").unwrap();
    let p = orbit_size(&spec, &Orbit::Vertex(0)).unwrap();
    for n in 4..=12 {
        let brute = brute_kneser_edges(n as u16, 2).0 as i64;
        assert_eq!(p.eval_int(n), rat_int(brute));
    }
    assert_eq!(p, Poly::from_ints(&[0, -1, 1]).scale(&fiwalk::exactnum::rat(1, 2)));
}

#[test]
fn builtin_lookup() {
    let k = builtin_family("kneser(2)").unwrap();
    assert_eq!(k.vertex_orbits.len(), 1);
    assert_eq!((k.vertex_orbits[0].arity, k.vertex_orbits[0].group().order()), (2, 2));
    assert_eq!(k.edges.len(), 1);
    assert!(k.edges[0].pattern.matches.is_empty());
    let nc = builtin_family("nocutoff").unwrap();
    assert_eq!(nc.vertex_orbits.len(), 2);
    assert_eq!(nc.edges.len(), 4);
    let star = builtin_family("star").unwrap();
    assert_eq!(star.vertex_orbits[0].arity, 0);
    assert_eq!(star.vertex_orbits[1].arity, 1);
    assert!(matches!(builtin_family("petersen"), Err(fiwalk::Error::UnknownFamily(_))));
}

#[test]
fn spec_json_roundtrip_and_errors() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        let again = FiGraphSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again.to_json(), spec.to_json());
    }
    let bad = r#"{"vertex_orbits":[{"name":"v","arity":1}],"edge_orbits":[{"left":"v","right":"v","matches":[[0,3]]}]}"#;
    let err = FiGraphSpec::from_json(bad).unwrap_err().to_string();
    assert!(err.contains("edge_orbits[0]"), "{err}");
    let loops = r#"{"vertex_orbits":[{"name":"v","arity":1}],"edge_orbits":[{"left":"v","right":"v","matches":[[0,0]]}]}"#;
    assert!(FiGraphSpec::from_json(loops).is_err());
}

#[test]
fn adjacency_symmetric_and_sizes_match() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        let n0 = spec.stabilization_bound();
        let polys: Vec<Poly> = (0..spec.vertex_orbits.len()).map(|o| orbit_size(&spec, &Orbit::Vertex(o)).unwrap()).collect();
        let top = if spec.max_arity() >= 4 { n0 + 1 } else { n0 + 3 };
        for n in n0..=top {
            let g = instantiate(&spec, n).unwrap();
            for (o, p) in polys.iter().enumerate() {
                assert_eq!(p.eval_int(n), rat_int(g.orbit_vertices(o).len() as i64), "{fam} n={n}");
            }
            for u in 0..g.vertex_count() {
                for &(v, _) in g.neighbors(u) {
                    assert!(g.neighbors(v as usize).iter().any(|&(w, _)| w as usize == u), "{fam}");
                }
                let mut nb: Vec<u32> = g.neighbors(u).iter().map(|x| x.0).collect();
                nb.dedup();
                assert_eq!(nb.len(), g.neighbors(u).len(), "duplicate edge in {fam}");
            }
        }
    }
}

#[test]
fn pair_orbit_inventory_stabilizes() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        if spec.max_arity() > 3 {
            continue;
        }
        let n0 = spec.stabilization_bound();
        let expected: BTreeSet<_> = spec.all_pair_orbits().into_iter().collect();
        for n in n0..=n0 + 4 {
            let g = instantiate(&spec, n).unwrap();
            let mut seen = BTreeSet::new();
            for u in &g.vertices {
                for v in &g.vertices {
                    seen.insert(spec.classify(u, v));
                }
            }
            assert_eq!(seen, expected, "{fam} n={n}");
            // pair orbit sizes agree with the closed form
            for p in &expected {
                let count = g
                    .vertices
                    .iter()
                    .flat_map(|u| g.vertices.iter().map(move |v| (u, v)))
                    .filter(|(u, v)| spec.classify(u, v) == *p)
                    .count();
                assert_eq!(pair_orbit_size_exact(&spec, p, n), count.into(), "{fam} n={n}");
            }
        }
    }
}

#[test]
fn roofed_size_closed_form_matches_counting() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        for roof in 0..spec.vertex_orbits.len() {
            for p in spec.roofed_states(roof) {
                let t = spec.transpose(&p);
                let n0 = spec.stabilization_bound();
                for n in n0..n0 + 2 {
                    let counted = spec.partners(&fiwalk::fispec::base_tuple(&spec, roof), &t, spec.labels_at(n) as usize).len();
                    assert_eq!(roofed_size_exact(&spec, &p, n), counted.into(), "{fam} {}", spec.fmt_pattern(p.clone()));
                }
            }
        }
    }
}

#[test]
fn embedding_is_injective_homomorphism() {
    for fam in default_families() {
        let spec = builtin_family(&fam).unwrap();
        let n0 = spec.stabilization_bound();
        if spec.max_arity() >= 4 {
            continue;
        }
        let g = instantiate(&spec, n0).unwrap();
        let h = instantiate(&spec, n0 + 1).unwrap();
        // Labels keep their values; the new label is fresh.
        let image: Vec<usize> = g.vertices.iter().map(|v| h.index_of(v).unwrap()).collect();
        let distinct: BTreeSet<_> = image.iter().collect();
        assert_eq!(distinct.len(), image.len());
        for u in 0..g.vertex_count() {
            for &(v, _) in g.neighbors(u) {
                let (a, b) = (image[u], image[v as usize]);
                assert!(h.neighbors(a).iter().any(|x| x.0 as usize == b), "{fam}");
            }
        }
    }
}

fn relabel(v: &Vertex, sigma: &[u16], spec: &FiGraphSpec) -> Vertex {
    let t: Vec<u16> = v.labels.iter().map(|&x| sigma[x as usize]).collect();
    Vertex::new(v.orbit, &spec.canonical_tuple(v.orbit, &t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn classification_is_equivariant(fam_idx in 0usize..12, seed in any::<u64>(), pick in any::<(u32, u32)>()) {
        let fams = default_families();
        let spec = builtin_family(&fams[fam_idx]).unwrap();
        let n = (spec.min_instantiable_n() + 2).min(8).max(spec.min_instantiable_n());
        let labels = spec.labels_at(n) as usize;
        let g = instantiate(&spec, n).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut sigma: Vec<u16> = (0..labels as u16).collect();
        sigma.shuffle(&mut rng);
        let u = &g.vertices[pick.0 as usize % g.vertex_count()];
        let v = &g.vertices[pick.1 as usize % g.vertex_count()];
        let (su, sv) = (relabel(u, &sigma, &spec), relabel(v, &sigma, &spec));
        prop_assert!(g.index_of(&su).is_some());
        prop_assert_eq!(spec.classify(u, v), spec.classify(&su, &sv));
    }
}

#[test]
fn tuples_are_canonical() {
    let spec = builtin_family("variety").unwrap();
    for t in orbit_tuples(&spec, 2, 6) {
        assert_eq!(spec.canonical_tuple(2, &t), t);
    }
}
