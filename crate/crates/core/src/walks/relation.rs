use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{rat_int, rat_to_f64, RationalFunc, Rational};
use crate::fispec::{count_partners, partner_count_exact_poly, ConcreteGraph, FiGraphSpec, PairPattern, Vertex};

/// Coefficients `a_O` indexed by pair orbits. Specializes at `n` to the
/// matrix with entry `a_O(n)` on every pair in `O`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VirtualRelation {
    coeffs: BTreeMap<PairPattern, RationalFunc>,
}

impl VirtualRelation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets a coefficient; zero removes the entry.
    pub fn set(&mut self, p: PairPattern, f: RationalFunc) {
        if f.is_zero() {
            self.coeffs.remove(&p);
        } else {
            self.coeffs.insert(p, f);
        }
    }

    pub fn get(&self, p: &PairPattern) -> RationalFunc {
        self.coeffs.get(p).cloned().unwrap_or_else(RationalFunc::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PairPattern, &RationalFunc)> {
        self.coeffs.iter()
    }

    pub fn patterns(&self) -> Vec<PairPattern> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient values at `n`.
    pub fn specialize(&self, n: i64) -> Result<Vec<(PairPattern, Rational)>> {
        self.coeffs.iter().map(|(p, f)| Ok((p.clone(), f.eval(n)?))).collect()
    }

    /// Sparse rows of the specialized matrix on `graph` (vertices only are
    /// needed). Entries are sorted by column.
    pub fn sparse_rows(&self, spec: &FiGraphSpec, graph: &ConcreteGraph) -> Result<Vec<Vec<(usize, Rational)>>> {
        let vals = self.specialize(graph.n)?;
        let mut rows = Vec::with_capacity(graph.vertex_count());
        for v in &graph.vertices {
            let mut row = Vec::new();
            for (p, a) in &vals {
                if p.left != v.orbit {
                    continue;
                }
                for w in spec.partners(&v.labels, p, graph.labels) {
                    let j = graph.index_of(&Vertex { orbit: p.right, labels: w }).expect("partner is a vertex");
                    row.push((j, a.clone()));
                }
            }
            row.sort_by_key(|e| e.0);
            rows.push(row);
        }
        Ok(rows)
    }

    /// Dense floating-point matrix on `graph`.
    pub fn dense_f64(&self, spec: &FiGraphSpec, graph: &ConcreteGraph) -> Result<Vec<Vec<f64>>> {
        let m = graph.vertex_count();
        let mut out = vec![vec![0.0; m]; m];
        for (i, row) in self.sparse_rows(spec, graph)?.into_iter().enumerate() {
            for (j, a) in row {
                out[i][j] += rat_to_f64(&a);
            }
        }
        Ok(out)
    }

    pub fn display(&self, spec: &FiGraphSpec) -> String {
        self.coeffs
            .iter()
            .map(|(p, f)| format!("{}: {}", spec.fmt_pattern(p.clone()), f))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Which construction produced a walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkKind {
    Simple,
    Lazy(RationalFunc),
    Weighted,
    Custom,
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkKind::Simple => write!(f, "simple"),
            WalkKind::Lazy(h) => write!(f, "lazy:{h}"),
            WalkKind::Weighted => write!(f, "weighted"),
            WalkKind::Custom => write!(f, "custom"),
        }
    }
}

/// A virtual relation whose specializations are stochastic matrices.
#[derive(Clone, Debug)]
pub struct TransitionRelation {
    pub relation: VirtualRelation,
    pub kind: WalkKind,
}

/// The `n` at which walk invariants are checked exactly.
pub fn sample_ns(spec: &FiGraphSpec) -> [i64; 3] {
    let n0 = spec.stabilization_bound();
    [n0, n0 + 1, n0 + 2]
}

impl TransitionRelation {
    /// Validates that coefficients lie in `[0, 1]` and rows sum to 1, both
    /// symbolically and by exact counting at the sampled `n`.
    pub fn new(spec: &FiGraphSpec, relation: VirtualRelation, kind: WalkKind) -> Result<Self> {
        let bad = |msg: String| Error::InvalidTransition(msg);
        for (p, _) in relation.iter() {
            if p.left >= spec.vertex_orbits.len() || p.right >= spec.vertex_orbits.len() {
                return Err(bad("pattern references an unknown orbit".into()));
            }
            if spec.canonical_pattern(p.left, p.right, &p.matches) != *p {
                return Err(bad(format!("pattern {} is not canonical", spec.fmt_pattern(p.clone()))));
            }
        }
        for orbit in 0..spec.vertex_orbits.len() {
            let name = &spec.vertex_orbits[orbit].name;
            let row: Vec<(&PairPattern, &RationalFunc)> = relation.iter().filter(|(p, _)| p.left == orbit).collect();
            let symbolic: RationalFunc = row
                .iter()
                .map(|(p, a)| &RationalFunc::from(partner_count_exact_poly(spec, p)) * *a)
                .sum();
            if symbolic != RationalFunc::one() {
                return Err(bad(format!("row sum for orbit `{name}` is {symbolic}, not 1")));
            }
            for n in sample_ns(spec) {
                let mut sum = rat_int(0);
                for (p, a) in &row {
                    let v = a.eval(n)?;
                    if v < rat_int(0) || v > rat_int(1) {
                        return Err(bad(format!("coefficient {} = {v} at n = {n} is outside [0, 1]", spec.fmt_pattern((*p).clone()))));
                    }
                    sum += v * rat_int(count_partners(spec, p, n) as i64);
                }
                if sum != rat_int(1) {
                    return Err(bad(format!("row sum for orbit `{name}` is {sum} at n = {n}")));
                }
            }
        }
        Ok(TransitionRelation { relation, kind })
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }

    pub fn get(&self, p: &PairPattern) -> RationalFunc {
        self.relation.get(p)
    }

    /// Patterns with nonzero coefficient at `n`, as flags over `patterns`.
    pub fn active_at(&self, patterns: &[PairPattern], n: i64) -> Result<Vec<bool>> {
        patterns.iter().map(|p| Ok(!self.get(p).eval(n)?.is_zero())).collect()
    }

    /// Symbolic vertex-orbit quotient: entry `(O, O')` is the probability of
    /// stepping from a vertex of `O` into `O'`.
    pub fn quotient(&self, spec: &FiGraphSpec) -> Vec<Vec<RationalFunc>> {
        let m = spec.vertex_orbits.len();
        let mut q = vec![vec![RationalFunc::zero(); m]; m];
        for (p, a) in self.relation.iter() {
            let c = RationalFunc::from(partner_count_exact_poly(spec, p));
            q[p.left][p.right] = &q[p.left][p.right] + &(&c * a);
        }
        q
    }
}

/// Symbolic partner count as a rational function, for weights.
pub(crate) fn count_rf(spec: &FiGraphSpec, p: &PairPattern) -> RationalFunc {
    RationalFunc::from(partner_count_exact_poly(spec, p))
}

