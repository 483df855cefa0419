use serde::Serialize;

use super::models::weighted_walk;
use super::relation::{sample_ns, TransitionRelation};
use crate::error::{Error, Result};
use crate::exactnum::{fit_rational_stabilized, rat_int, solve_linear, RatMatrix, RationalFunc, Rational};
use crate::fispec::{instantiate_vertices, vertex_count_poly, FiGraphSpec, Vertex};

/// Stationary distribution, constant on vertex orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryDist {
    /// Total mass of each vertex orbit.
    pub mass: Vec<RationalFunc>,
    /// Mass of a single vertex of each orbit.
    pub per_vertex: Vec<RationalFunc>,
}

impl StationaryDist {
    pub fn per_vertex_at(&self, n: i64) -> Result<Vec<Rational>> {
        self.per_vertex.iter().map(|f| f.eval(n)).collect()
    }

    pub fn mass_at(&self, n: i64) -> Result<Vec<Rational>> {
        self.mass.iter().map(|f| f.eval(n)).collect()
    }
}

/// Solves the quotient chain on vertex orbits and spreads each orbit's
/// mass evenly. The result is checked against the full `G_n` at the
/// sampled `n`.
pub fn stationary(spec: &FiGraphSpec, p: &TransitionRelation) -> Result<StationaryDist> {
    let q = p.quotient(spec);
    let m = q.len();
    let mut rows = vec![vec![RationalFunc::zero(); m]; m];
    for (j, row) in rows.iter_mut().enumerate().take(m - 1) {
        for (o, cell) in row.iter_mut().enumerate() {
            *cell = if o == j { &q[o][j] - &RationalFunc::one() } else { q[o][j].clone() };
        }
    }
    rows[m - 1] = vec![RationalFunc::one(); m];
    let mut rhs = vec![RationalFunc::zero(); m];
    rhs[m - 1] = RationalFunc::one();
    let mass = solve_linear(&RatMatrix::from_rows(rows), &rhs)?;
    let per_vertex = mass
        .iter()
        .enumerate()
        .map(|(o, f)| f / &RationalFunc::from(vertex_count_poly(spec, o)))
        .collect();
    let pi = StationaryDist { mass, per_vertex };
    for n in sample_ns(spec) {
        verify_stationary_full(spec, p, &pi, n)?;
    }
    Ok(pi)
}

/// Exact check of `pi P = pi` and total mass 1 on every vertex of `G_n`.
pub fn verify_stationary_full(spec: &FiGraphSpec, p: &TransitionRelation, pi: &StationaryDist, n: i64) -> Result<()> {
    let g = instantiate_vertices(spec, n)?;
    let per = pi.per_vertex_at(n)?;
    let vals = p.relation.specialize(n)?;
    // counts[v][k]: number of in-neighbours of v along pattern k
    let mut counts = vec![vec![0u64; vals.len()]; g.vertex_count()];
    for u in &g.vertices {
        for (k, (pat, _)) in vals.iter().enumerate() {
            if pat.left != u.orbit {
                continue;
            }
            for w in spec.partners(&u.labels, pat, g.labels) {
                let j = g.index_of(&Vertex { orbit: pat.right, labels: w }).expect("partner is a vertex");
                counts[j][k] += 1;
            }
        }
    }
    let flows: Vec<Rational> = vals.iter().map(|(pat, a)| &per[pat.left] * a).collect();
    let mut total = rat_int(0);
    for (v, c) in g.vertices.iter().zip(&counts) {
        let inflow: Rational = c.iter().zip(&flows).map(|(&k, f)| f * rat_int(k as i64)).sum();
        if inflow != per[v.orbit] {
            return Err(Error::InvalidTransition(format!(
                "stationary check failed at n = {n} on orbit `{}`",
                spec.vertex_orbits[v.orbit].name
            )));
        }
        total += &per[v.orbit];
    }
    if total != rat_int(1) {
        return Err(Error::InvalidTransition(format!("stationary mass is {total} at n = {n}")));
    }
    Ok(())
}

/// Outcome of a detailed-balance check.
#[derive(Clone, Debug, Serialize)]
pub struct Reversibility {
    pub reversible: bool,
    /// First pattern where `pi(u) P(u, v) != pi(v) P(v, u)`.
    pub witness: Option<String>,
}

/// Detailed balance on one representative per pair orbit in the support,
/// symbolically and at the sampled `n`.
pub fn check_reversible(spec: &FiGraphSpec, p: &TransitionRelation, pi: &StationaryDist) -> Result<Reversibility> {
    for (pat, a) in p.relation.iter() {
        let t = spec.transpose(pat);
        let fwd = &pi.per_vertex[pat.left] * a;
        let back = &pi.per_vertex[pat.right] * &p.get(&t);
        let mut ok = fwd == back;
        for n in sample_ns(spec) {
            ok &= fwd.eval(n)? == back.eval(n)?;
        }
        if !ok {
            return Ok(Reversibility {
                reversible: false,
                witness: Some(spec.fmt_pattern(pat.clone())),
            });
        }
    }
    Ok(Reversibility {
        reversible: true,
        witness: None,
    })
}

/// `rho(n)`: smallest ratio of edge flows `pi(u) P(u, v)` of a walk to
/// those of the weighted walk.
#[derive(Clone, Debug)]
pub struct RhoProfile {
    pub values: Vec<(i64, Rational)>,
    pub fitted: RationalFunc,
    /// First `n` covered by the fit.
    pub onset: i64,
    /// Vertex orbit and edge orbit attaining the minimum at the largest `n`.
    pub witness: (String, String),
    /// Exact flow ratio of every edge orbit.
    pub per_edge: Vec<(String, RationalFunc)>,
}

pub fn rho(spec: &FiGraphSpec, p: &TransitionRelation, ns: &[i64]) -> Result<RhoProfile> {
    let refuse = |w: Option<String>| Error::NotReversible {
        witness: w.unwrap_or_default(),
    };
    let pi = stationary(spec, p)?;
    let rev = check_reversible(spec, p, &pi)?;
    if !rev.reversible {
        return Err(refuse(rev.witness));
    }
    let w = weighted_walk(spec)?;
    let piw = stationary(spec, &w)?;
    let rev = check_reversible(spec, &w, &piw)?;
    if !rev.reversible {
        return Err(refuse(rev.witness.map(|s| format!("weighted walk, {s}"))));
    }
    let ratios: Vec<(usize, RationalFunc)> = spec
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let num = &pi.per_vertex[e.pattern.left] * &p.get(&e.pattern);
            let den = &piw.per_vertex[e.pattern.left] * &w.get(&e.pattern);
            (i, &num / &den)
        })
        .collect();
    let mut values = Vec::new();
    let mut arg = 0;
    for &n in ns {
        let mut best: Option<(Rational, usize)> = None;
        for (i, r) in &ratios {
            let v = r.eval(n)?;
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, *i));
            }
        }
        let (v, i) = best.ok_or_else(|| Error::InvalidSpec("family has no edges".into()))?;
        values.push((n, v));
        arg = i;
    }
    let deg = values.len().saturating_sub(5) / 2;
    let (fitted, onset) = fit_rational_stabilized(&values, deg.min(4), deg.min(4))?;
    let e = &spec.edges[arg].pattern;
    Ok(RhoProfile {
        values,
        fitted,
        onset,
        witness: (spec.vertex_orbits[e.left].name.clone(), spec.fmt_pattern(e.clone())),
        per_edge: ratios.into_iter().map(|(i, r)| (spec.fmt_pattern(spec.edges[i].pattern.clone()), r)).collect(),
    })
}
