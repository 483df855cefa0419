use std::collections::BTreeMap;
use std::path::Path;

use super::relation::{count_rf, sample_ns, TransitionRelation, VirtualRelation, WalkKind};
use crate::error::{Error, Result};
use crate::exactnum::{parse_ratfunc, rat_int, RationalFunc};
use crate::fispec::{FiGraphSpec, RoofedCounts, WalkDoc};

/// Fails with `DisconnectedFamily` unless, at every sampled `n`, each
/// vertex reaches every roof through steps of positive probability.
pub fn check_connected(spec: &FiGraphSpec, p: &TransitionRelation) -> Result<()> {
    let patterns = p.relation.patterns();
    for n in sample_ns(spec) {
        let active = p.active_at(&patterns, n)?;
        for roof in 0..spec.vertex_orbits.len() {
            if !RoofedCounts::compute(spec, roof, n, &patterns).all_reach_diagonal(&active) {
                return Err(Error::DisconnectedFamily(n));
            }
        }
    }
    Ok(())
}

/// Simple random walk: each edge out of `u` has probability `1/deg(u)`,
/// with loops weighted twice.
pub fn simple_walk(spec: &FiGraphSpec) -> Result<TransitionRelation> {
    let mut rel = VirtualRelation::new();
    for orbit in 0..spec.vertex_orbits.len() {
        let edges: Vec<_> = spec.edge_patterns().filter(|e| e.left == orbit).collect();
        let weight = |e| if spec.is_diagonal(e) { rat_int(2) } else { rat_int(1) };
        let degree: RationalFunc = edges.iter().map(|e| count_rf(spec, e).scale(&weight(e))).sum();
        if degree.is_zero() {
            return Err(Error::DisconnectedFamily(spec.stabilization_bound()));
        }
        for e in edges {
            rel.set(e.clone(), &RationalFunc::constant(weight(e)) / &degree);
        }
    }
    let p = TransitionRelation::new(spec, rel, WalkKind::Simple)?;
    check_connected(spec, &p)?;
    Ok(p)
}

/// Lazy version of `base`: stay put with probability `hold`.
pub fn lazy_from(spec: &FiGraphSpec, base: &TransitionRelation, hold: &RationalFunc) -> Result<TransitionRelation> {
    for n in sample_ns(spec) {
        let h = hold.eval(n).map_err(|_| Error::InvalidHold(format!("{hold} has a pole at n = {n}")))?;
        if h < rat_int(0) || h >= rat_int(1) {
            return Err(Error::InvalidHold(format!("{hold} = {h} at n = {n}")));
        }
    }
    let move_prob = &RationalFunc::one() - hold;
    let mut rel = VirtualRelation::new();
    for (p, a) in base.relation.iter() {
        rel.set(p.clone(), &move_prob * a);
    }
    for orbit in 0..spec.vertex_orbits.len() {
        let d = spec.diagonal(orbit);
        let v = &rel.get(&d) + hold;
        rel.set(d, v);
    }
    TransitionRelation::new(spec, rel, WalkKind::Lazy(hold.clone()))
}

/// Lazy simple walk.
pub fn lazy_walk(spec: &FiGraphSpec, hold: &RationalFunc) -> Result<TransitionRelation> {
    lazy_from(spec, &simple_walk(spec)?, hold)
}

/// Weighted walk: from `u`, pick one of the edge classes incident to `u`
/// uniformly, then an edge of that class uniformly.
pub fn weighted_walk(spec: &FiGraphSpec) -> Result<TransitionRelation> {
    let mut rel = VirtualRelation::new();
    for orbit in 0..spec.vertex_orbits.len() {
        let mut classes: BTreeMap<usize, (RationalFunc, Vec<_>)> = BTreeMap::new();
        for e in spec.edges.iter().filter(|e| e.pattern.left == orbit) {
            let c = count_rf(spec, &e.pattern);
            if c.is_zero() {
                continue;
            }
            let slot = classes.entry(e.class).or_insert_with(|| (RationalFunc::zero(), Vec::new()));
            slot.0 = &slot.0 + &c;
            slot.1.push(e.pattern.clone());
        }
        if classes.is_empty() {
            return Err(Error::DisconnectedFamily(spec.stabilization_bound()));
        }
        let k = RationalFunc::int(classes.len() as i64);
        for (total, pats) in classes.into_values() {
            let a = (&k * &total).recip();
            for p in pats {
                rel.set(p, a.clone());
            }
        }
    }
    let p = TransitionRelation::new(spec, rel, WalkKind::Weighted)?;
    check_connected(spec, &p)?;
    Ok(p)
}

/// Walk from an explicit coefficient table.
pub fn custom_walk(spec: &FiGraphSpec, docs: &[WalkDoc]) -> Result<TransitionRelation> {
    let mut rel = VirtualRelation::new();
    for entry in spec.parse_walk_docs(docs)? {
        let v = &rel.get(&entry.pattern) + &entry.coefficient;
        rel.set(entry.pattern, v);
    }
    let p = TransitionRelation::new(spec, rel, WalkKind::Custom)?;
    check_connected(spec, &p)?;
    Ok(p)
}

/// Resolves `simple`, `lazy:<hold>`, `weighted`, `custom` (the spec's own
/// table) or `custom:<file>`.
pub fn parse_walk(spec: &FiGraphSpec, selector: &str) -> Result<TransitionRelation> {
    let (head, arg) = match selector.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (selector.trim(), None),
    };
    match (head, arg) {
        ("simple", None) => simple_walk(spec),
        ("weighted", None) => weighted_walk(spec),
        ("lazy", a) => {
            let hold = parse_ratfunc(a.unwrap_or("1/2")).map_err(|_| Error::InvalidHold(a.unwrap_or_default().into()))?;
            lazy_walk(spec, &hold)
        }
        ("custom", None) => {
            let Some(entries) = &spec.walk else {
                return Err(Error::InvalidSpec("spec carries no `walk` table".into()));
            };
            let mut rel = VirtualRelation::new();
            for e in entries {
                let v = &rel.get(&e.pattern) + &e.coefficient;
                rel.set(e.pattern.clone(), v);
            }
            let p = TransitionRelation::new(spec, rel, WalkKind::Custom)?;
            check_connected(spec, &p)?;
            Ok(p)
        }
        ("custom", Some(file)) => {
            let text = std::fs::read_to_string(Path::new(file))?;
            let docs: Vec<WalkDoc> = serde_json::from_str(&text)?;
            custom_walk(spec, &docs)
        }
        _ => Err(Error::InvalidSpec(format!("unknown walk `{selector}`"))),
    }
}
