use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fispec::{builtin_family, default_families, instantiate, FiGraphSpec};
use crate::hitting::{build_roofed_chain, default_sweep, moments_oracle, moments_symbolic, MomentTable, PatternRows};
use crate::walks::{parse_walk, TransitionRelation};

/// Walks exercised by the equivalence suite.
pub const SUITE_WALKS: [&str; 3] = ["simple", "lazy:1/2", "weighted"];

/// Symbolic first and second moments against full-graph exact solves for
/// one family and walk.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceCell {
    pub family: String,
    pub walk: String,
    pub ns: Vec<i64>,
    /// Vertex-level comparisons made (each covers both moments).
    pub checked: usize,
    pub mismatches: Vec<String>,
    pub pass: bool,
}

/// Compares every vertex against every roof at each `n`.
pub fn oracle_equivalence(spec: &FiGraphSpec, p: &TransitionRelation, ns: &[i64]) -> Result<EquivalenceCell> {
    let sweep = default_sweep(spec, p);
    let tables: Vec<MomentTable> = (0..spec.vertex_orbits.len())
        .map(|roof| moments_symbolic(&build_roofed_chain(spec, p, roof, &sweep)?, 2))
        .collect::<Result<_>>()?;
    let per_n: Vec<(usize, Vec<String>)> = ns
        .par_iter()
        .map(|&n| -> Result<(usize, Vec<String>)> {
            let g = instantiate(spec, n)?;
            let rows = PatternRows::new(spec, p, &g)?;
            let mut checked = 0;
            let mut bad = Vec::new();
            for t in &tables {
                let target = g.orbit_vertices(t.roof).start;
                let oracle = moments_oracle(spec, &g, &rows, target, 2)?;
                let y = &g.vertices[target];
                for (i, x) in g.vertices.iter().enumerate() {
                    let pat = spec.classify(x, y);
                    let s = t.states.binary_search(&pat).expect("roofed state");
                    for k in 0..2 {
                        let sym = t.raw[k][s].eval(n)?;
                        if sym != oracle[k][i] {
                            bad.push(format!(
                                "n={n} {} moment {}: symbolic {sym}, oracle {}",
                                spec.fmt_pattern(pat.clone()),
                                k + 1,
                                oracle[k][i]
                            ));
                        }
                    }
                    checked += 1;
                }
            }
            Ok((checked, bad))
        })
        .collect::<Result<_>>()?;
    let mismatches: Vec<String> = per_n.iter().flat_map(|x| x.1.clone()).collect();
    Ok(EquivalenceCell {
        family: spec.name.clone(),
        walk: p.label(),
        ns: ns.to_vec(),
        checked: per_n.iter().map(|x| x.0).sum(),
        pass: mismatches.is_empty(),
        mismatches,
    })
}

/// `[n0, n0 + 3]` for a family.
pub fn suite_range(spec: &FiGraphSpec) -> Vec<i64> {
    let n0 = spec.stabilization_bound();
    (n0..=n0 + 3).collect()
}

/// The suite over the given specs (all built-ins when empty).
pub fn verify_suite(specs: &[FiGraphSpec]) -> Result<Vec<EquivalenceCell>> {
    let owned: Vec<FiGraphSpec>;
    let specs = if specs.is_empty() {
        owned = default_families().iter().map(|f| builtin_family(f)).collect::<Result<_>>()?;
        &owned
    } else {
        specs
    };
    let mut cells = Vec::new();
    for spec in specs {
        for w in SUITE_WALKS {
            let p = parse_walk(spec, w)?;
            cells.push(oracle_equivalence(spec, &p, &suite_range(spec))?);
        }
    }
    Ok(cells)
}
