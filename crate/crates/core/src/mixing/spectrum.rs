use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{fit_polynomial_with, rat_int, FitOptions, Poly, RationalFunc};
use crate::fispec::{instantiate, partner_count_exact_poly, FiGraphSpec};
use crate::walks::VirtualRelation;

/// Default relative tolerance for grouping eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Eigenvalues of one specialization, grouped.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumAt {
    pub n: i64,
    pub eigenvalues: Vec<f64>,
    /// `(mean value, multiplicity)` in increasing order.
    pub clusters: Vec<(f64, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub per_n: Vec<SpectrumAt>,
    /// Common number of distinct eigenvalues, if it does not change.
    pub distinct: Option<usize>,
    /// Multiplicity of each cluster (by rank) as a polynomial in `n`.
    #[serde(serialize_with = "ser_polys")]
    pub multiplicities: Option<Vec<Poly>>,
    /// Held-out `n` on which the multiplicity fits were checked.
    pub validated_on: Vec<i64>,
}

fn ser_polys<S: serde::Serializer>(v: &Option<Vec<Poly>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(ps) => s.collect_seq(ps.iter().map(|p| p.to_string())),
        None => s.serialize_none(),
    }
}

/// Adjacency indicator of every edge orbit.
pub fn adjacency_relation(spec: &FiGraphSpec) -> VirtualRelation {
    let mut r = VirtualRelation::new();
    for e in spec.edge_patterns() {
        r.set(e.clone(), RationalFunc::one());
    }
    r
}

/// Combinatorial Laplacian `D - A`; degrees come from partner counts.
pub fn laplacian_relation(spec: &FiGraphSpec) -> VirtualRelation {
    let mut r = VirtualRelation::new();
    let mut deg = vec![Poly::zero(); spec.vertex_orbits.len()];
    for e in spec.edge_patterns() {
        r.set(e.clone(), RationalFunc::int(-1));
        deg[e.left] = &deg[e.left] + &partner_count_exact_poly(spec, e);
    }
    for (o, d) in deg.into_iter().enumerate() {
        r.set(spec.diagonal(o), RationalFunc::from(d));
    }
    r
}

/// Groups sorted values whose neighbours differ by at most
/// `tol * max(1, |x|)`.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &x in sorted {
        match out.last_mut() {
            Some((_, count, sum)) if (x - last).abs() <= tol * x.abs().max(1.0) => {
                *count += 1;
                *sum += x;
            }
            _ => out.push((x, 1, x)),
        }
        last = x;
    }
    out.into_iter().map(|(_, c, s)| (s / c as f64, c)).collect()
}

/// Real eigenvalues of `r_n`, ascending. Symmetric matrices use the
/// symmetric solver; others must have imaginary parts within tolerance.
pub fn eigenvalues_at(spec: &FiGraphSpec, r: &VirtualRelation, n: i64, tol: f64) -> Result<Vec<f64>> {
    let g = instantiate(spec, n)?;
    let dense = r.dense_f64(spec, &g)?;
    let k = dense.len();
    let m = DMatrix::from_fn(k, k, |i, j| dense[i][j]);
    let scale = m.iter().fold(1f64, |a, x| a.max(x.abs()));
    let asym = (0..k).flat_map(|i| (0..i).map(move |j| (i, j))).fold(0f64, |a, (i, j)| a.max((m[(i, j)] - m[(j, i)]).abs()));
    let mut vals: Vec<f64> = if asym <= 1e-12 * scale {
        m.symmetric_eigen().eigenvalues.iter().copied().collect()
    } else {
        let ev = m.complex_eigenvalues();
        let worst = ev.iter().fold(0f64, |a, z| a.max(z.im.abs()));
        if worst > tol * scale {
            return Err(Error::ComplexSpectrum(worst));
        }
        ev.iter().map(|z| z.re).collect()
    };
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigensolves at every `n`, checks the distinct-value count is constant,
/// and fits multiplicities on all but the last three `n`, validating on
/// those three.
pub fn spectrum_sweep(spec: &FiGraphSpec, r: &VirtualRelation, ns: &[i64], tol: f64) -> Result<SpectrumReport> {
    let per_n: Vec<SpectrumAt> = ns
        .iter()
        .map(|&n| {
            let eigenvalues = eigenvalues_at(spec, r, n, tol)?;
            let clusters = cluster(&eigenvalues, tol);
            Ok(SpectrumAt { n, eigenvalues, clusters })
        })
        .collect::<Result<_>>()?;
    let counts: Vec<usize> = per_n.iter().map(|s| s.clusters.len()).collect();
    let distinct = (!counts.is_empty() && counts.iter().all(|&c| c == counts[0])).then(|| counts[0]);
    let mut validated_on = Vec::new();
    let multiplicities = match distinct {
        Some(d) if per_n.len() >= 5 => {
            let (train, held) = per_n.split_at(per_n.len() - 3);
            validated_on = held.iter().map(|s| s.n).collect();
            let fits: Option<Vec<Poly>> = (0..d)
                .map(|c| {
                    let pts: Vec<_> = train.iter().map(|s| (s.n, rat_int(s.clusters[c].1 as i64))).collect();
                    let p = fit_polynomial_with(&pts, pts.len() - 2, FitOptions { holdout: 1 }).ok()?;
                    held.iter().all(|s| p.eval_int(s.n) == rat_int(s.clusters[c].1 as i64)).then_some(p)
                })
                .collect();
            fits
        }
        _ => None,
    };
    Ok(SpectrumReport {
        per_n,
        distinct,
        multiplicities,
        validated_on,
    })
}
