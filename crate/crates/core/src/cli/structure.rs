use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{fit_polynomial_with, rat_int, FitOptions, Poly};
use crate::fispec::{instantiate, vertex_count_exact, FiGraphSpec, PairPattern, Vertex};

/// Brute-force products are only formed on graphs up to this size.
const FULL_PRODUCT_LIMIT: usize = 2000;

/// One coefficient `p_{O1,O2,O}(n)` of a composition of orbit indicators.
#[derive(Clone, Debug, Serialize)]
pub struct StructureTerm {
    pub orbit: String,
    #[serde(serialize_with = "super::ser_display")]
    pub poly: Poly,
    /// `(n, count)` at every sampled `n`.
    pub values: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructurePolyReport {
    pub first: String,
    pub second: String,
    /// Terms with a nonzero coefficient, in pattern order.
    pub terms: Vec<StructureTerm>,
    pub fitted_on: Vec<i64>,
    pub validated_on: Vec<i64>,
    /// `n` at which the full matrix product was formed and matched.
    pub full_product_at: Vec<i64>,
}

/// Composable ordered pairs of edge orbits, for the default report.
pub fn edge_pairs(spec: &FiGraphSpec) -> Vec<(PairPattern, PairPattern)> {
    let edges: Vec<&PairPattern> = spec.edge_patterns().collect();
    let mut out = Vec::new();
    for a in &edges {
        for b in &edges {
            if a.right == b.left {
                out.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    out
}

/// Entries of `r^first * r^second` at one representative pair per orbit.
fn coefficients_at(spec: &FiGraphSpec, first: &PairPattern, second: &PairPattern, targets: &[PairPattern], n: i64) -> Vec<i64> {
    let labels = spec.labels_at(n) as usize;
    targets
        .iter()
        .map(|o| {
            let (x, z) = spec.representative(o);
            spec.partners(&x.labels, first, labels)
                .into_iter()
                .filter(|y| spec.classify(&Vertex { orbit: first.right, labels: y.clone() }, &z) == *second)
                .count() as i64
        })
        .collect()
}

/// Forms the product on all of `G_n` and checks it against the orbit
/// coefficients.
fn check_full_product(spec: &FiGraphSpec, first: &PairPattern, second: &PairPattern, coef: &HashMap<PairPattern, i64>, n: i64) -> Result<bool> {
    let total: num_bigint::BigInt = (0..spec.vertex_orbits.len()).map(|o| vertex_count_exact(spec, o, n)).sum();
    if total > num_bigint::BigInt::from(FULL_PRODUCT_LIMIT) {
        return Ok(false);
    }
    let g = instantiate(spec, n)?;
    let labels = spec.labels_at(n) as usize;
    for x in g.orbit_vertices(first.left) {
        let xv = &g.vertices[x];
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for y in spec.partners(&xv.labels, first, labels) {
            for z in spec.partners(&y, second, labels) {
                let zi = g.index_of(&Vertex { orbit: second.right, labels: z }).expect("partner is a vertex");
                *acc.entry(zi).or_default() += 1;
            }
        }
        for z in g.orbit_vertices(second.right) {
            let want = coef.get(&spec.classify(xv, &g.vertices[z])).copied().unwrap_or(0);
            if acc.get(&z).copied().unwrap_or(0) != want {
                return Err(Error::InvalidSpec(format!(
                    "orbit product disagrees with the full product at n = {n}, pair ({x}, {z})"
                )));
            }
        }
    }
    Ok(true)
}

/// Fits every `p_{first,second,O}` on all but the last three `n` and
/// validates on those three.
pub fn structure_polys(spec: &FiGraphSpec, first: &PairPattern, second: &PairPattern, ns: &[i64]) -> Result<StructurePolyReport> {
    if first.right != second.left {
        return Err(Error::InvalidSpec(format!(
            "{} cannot be followed by {}",
            spec.fmt_pattern(first.clone()),
            spec.fmt_pattern(second.clone())
        )));
    }
    if ns.len() < 6 {
        return Err(Error::InsufficientPoints { needed: 6, got: ns.len() });
    }
    if let Some(&n) = ns.iter().find(|&&n| n < spec.stabilization_bound()) {
        return Err(Error::TooSmallN { n, min: spec.stabilization_bound() });
    }
    let targets: Vec<PairPattern> = spec
        .all_pair_orbits()
        .into_iter()
        .filter(|o| o.left == first.left && o.right == second.right)
        .collect();
    let table: Vec<Vec<i64>> = ns.par_iter().map(|&n| coefficients_at(spec, first, second, &targets, n)).collect();
    let (train, held) = ns.split_at(ns.len() - 3);
    let mut terms = Vec::new();
    let mut by_n: BTreeMap<i64, HashMap<PairPattern, i64>> = BTreeMap::new();
    for (k, o) in targets.iter().enumerate() {
        let values: Vec<(i64, i64)> = ns.iter().zip(&table).map(|(&n, row)| (n, row[k])).collect();
        let pts: Vec<_> = values[..train.len()].iter().map(|&(n, v)| (n, rat_int(v))).collect();
        let poly = fit_polynomial_with(&pts, pts.len() - 2, FitOptions { holdout: 1 })?;
        if held.iter().zip(&values[train.len()..]).any(|(&n, &(_, v))| poly.eval_int(n) != rat_int(v)) {
            return Err(Error::NoPolynomialFit { max_degree: pts.len() - 2 });
        }
        for &(n, v) in &values {
            by_n.entry(n).or_default().insert(o.clone(), v);
        }
        if !poly.is_zero() {
            terms.push(StructureTerm { orbit: spec.fmt_pattern(o.clone()), poly, values });
        }
    }
    let mut full_product_at = Vec::new();
    for (&n, coef) in &by_n {
        if check_full_product(spec, first, second, coef, n)? {
            full_product_at.push(n);
        }
    }
    Ok(StructurePolyReport {
        first: spec.fmt_pattern(first.clone()),
        second: spec.fmt_pattern(second.clone()),
        terms,
        fitted_on: train.to_vec(),
        validated_on: held.to_vec(),
        full_product_at,
    })
}
