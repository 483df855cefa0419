use std::collections::HashMap;

use nalgebra::DMatrix;

use super::oracle::PatternRows;
use super::solve::HittingTable;
use crate::error::{Error, Result};
use crate::exactnum::{rat_int, RationalFunc, SqrtRational};
use crate::fispec::{partner_count_exact_poly, roofed_size_poly, ConcreteGraph, FiGraphSpec, PairPattern};
use crate::walks::{check_reversible, StationaryDist, TransitionRelation, WalkKind};

/// How the companion rational table is scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreensNormalization {
    /// Unit edge weights of the simple walk: `(H(y) - Q(x, y)) / vol`.
    UnitWeights,
    /// Weights `pi(x) P(x, y)`, so `vol = 1`: `H(y) - Q(x, y)`.
    Stationary,
}

#[derive(Clone, Debug)]
pub struct GreensEntry {
    /// Orbit of `(x, y)`; `y` is the roof.
    pub pattern: PairPattern,
    /// `sqrt(d_x d_y) / vol * (H(y) - Q(x, y))`, the quasi-inverse of the
    /// normalized Laplacian.
    pub entry: SqrtRational,
    /// The same quantity without the `sqrt(d_x d_y)` factor, scaled as
    /// chosen by the normalization.
    pub scaled: RationalFunc,
}

/// Green's function entries per pair orbit.
#[derive(Clone, Debug)]
pub struct GreensTable {
    pub normalization: GreensNormalization,
    pub entries: Vec<GreensEntry>,
}

impl GreensTable {
    pub fn get(&self, p: &PairPattern) -> Option<&GreensEntry> {
        self.entries.iter().find(|e| &e.pattern == p)
    }

    /// Whether every radicand is a perfect square.
    pub fn all_rational(&self) -> bool {
        self.entries.iter().all(|e| e.entry.as_rational().is_some())
    }
}

/// Green's function from hitting tables (one per roof orbit), using
/// `G(x, y) = sqrt(pi_x pi_y) (H(y) - Q(x, y))` with
/// `H(y) = sum_z pi_z Q(z, y)`.
pub fn greens_symbolic(
    spec: &FiGraphSpec,
    p: &TransitionRelation,
    pi: &StationaryDist,
    tables: &[HittingTable],
    norm: GreensNormalization,
) -> Result<GreensTable> {
    let rev = check_reversible(spec, p, pi)?;
    if !rev.reversible {
        return Err(Error::NotReversible {
            witness: rev.witness.unwrap_or_default(),
        });
    }
    let vol = match norm {
        GreensNormalization::Stationary => RationalFunc::one(),
        GreensNormalization::UnitWeights => {
            if p.kind != WalkKind::Simple {
                return Err(Error::InvalidTransition("unit weights need the simple walk".into()));
            }
            // d_x / pi_x is the same for every vertex; read it off orbit 0.
            let d0: RationalFunc = spec
                .edge_patterns()
                .filter(|e| e.left == 0)
                .map(|e| {
                    let w = if spec.is_diagonal(e) { rat_int(2) } else { rat_int(1) };
                    RationalFunc::from(partner_count_exact_poly(spec, e)).scale(&w)
                })
                .sum();
            &d0 / &pi.per_vertex[0]
        }
    };
    let mut entries = Vec::new();
    for table in tables {
        let h: RationalFunc = table
            .states
            .iter()
            .zip(&table.q)
            .map(|(s, q)| &(&RationalFunc::from(roofed_size_poly(spec, s)) * &pi.per_vertex[s.left]) * q)
            .sum();
        for (s, q) in table.states.iter().zip(&table.q) {
            let raw = &h - q;
            let radicand = &pi.per_vertex[s.left] * &pi.per_vertex[s.right];
            let entry = SqrtRational::sqrt_of(&radicand, raw.clone())
                .ok_or_else(|| Error::InvalidTransition("stationary mass is negative".into()))?;
            entries.push(GreensEntry {
                pattern: s.clone(),
                entry,
                scaled: &raw / &vol,
            });
        }
    }
    Ok(GreensTable { normalization: norm, entries })
}

/// The Green's function matrix on `G_n` from the symbolic table.
pub fn greens_matrix_at(spec: &FiGraphSpec, graph: &ConcreteGraph, table: &GreensTable) -> Result<Vec<Vec<f64>>> {
    let lookup: HashMap<&PairPattern, f64> = table.entries.iter().map(|e| (&e.pattern, e.entry.eval_f64(graph.n))).collect();
    let m = graph.vertex_count();
    let mut out = vec![vec![0.0; m]; m];
    for (i, u) in graph.vertices.iter().enumerate() {
        for (j, v) in graph.vertices.iter().enumerate() {
            let p = spec.classify(u, v);
            out[i][j] = *lookup.get(&p).ok_or_else(|| Error::InvalidSpec(format!("no Green's entry for {}", spec.fmt_pattern(p.clone()))))?;
        }
    }
    Ok(out)
}

/// Residuals of the identities checked by [`greens_oracle`], Frobenius norm.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GreensResidual {
    pub gl: f64,
    pub lg: f64,
    pub gp0: f64,
    pub asymmetry: f64,
}

impl GreensResidual {
    pub fn max(&self) -> f64 {
        self.gl.max(self.lg).max(self.gp0).max(self.asymmetry)
    }
}

/// Checks `G L = L G = I - P_0` and `G P_0 = 0`, where
/// `L = I - D^(1/2) P D^(-1/2)` is the normalized Laplacian and `P_0`
/// projects onto `sqrt(pi)`.
pub fn greens_oracle(rows: &PatternRows, pi: &[f64], g: &[Vec<f64>], tolerance: f64) -> Result<GreensResidual> {
    let m = rows.len();
    let p = DMatrix::from_fn(m, m, {
        let dense = rows.dense_f64();
        move |i, j| dense[i][j]
    });
    let s: Vec<f64> = pi.iter().map(|x| x.sqrt()).collect();
    let lap = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { 0.0 } - s[i] * p[(i, j)] / s[j]);
    let norm: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let phi: Vec<f64> = s.iter().map(|x| x / norm).collect();
    let p0 = DMatrix::from_fn(m, m, |i, j| phi[i] * phi[j]);
    let gm = DMatrix::from_fn(m, m, |i, j| g[i][j]);
    let id = DMatrix::<f64>::identity(m, m);
    let target = &id - &p0;
    let res = GreensResidual {
        gl: (&gm * &lap - &target).norm(),
        lg: (&lap * &gm - &target).norm(),
        gp0: (&gm * &p0).norm(),
        asymmetry: (&gm - gm.transpose()).norm(),
    };
    if res.max() > tolerance {
        return Err(Error::ToleranceExceeded {
            residual: res.max(),
            tolerance,
        });
    }
    Ok(res)
}
