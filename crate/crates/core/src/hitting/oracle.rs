use std::collections::HashMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::solve::small_binomial;
use crate::error::{Error, Result};
use crate::exactnum::{rat_int, rat_to_f64, solve_rational_modular, Rational};
use crate::fispec::{ConcreteGraph, FiGraphSpec, Vertex};
use crate::walks::TransitionRelation;

/// Graphs up to this size are solved vertex by vertex; larger ones are
/// first lumped by the stabilizer of the target.
const UNLUMPED_LIMIT: usize = 400;

/// Specialized transition matrix of a walk on `G_n`: each row lists
/// `(column, coefficient index)`.
#[derive(Clone, Debug)]
pub struct PatternRows {
    pub coeffs: Vec<Rational>,
    pub rows: Vec<Vec<(u32, u16)>>,
}

impl PatternRows {
    pub fn new(spec: &FiGraphSpec, p: &TransitionRelation, graph: &ConcreteGraph) -> Result<Self> {
        let vals = p.relation.specialize(graph.n)?;
        let mut rows = Vec::with_capacity(graph.vertex_count());
        for v in &graph.vertices {
            let mut row = Vec::new();
            for (k, (pat, a)) in vals.iter().enumerate() {
                if pat.left != v.orbit || a.is_zero() {
                    continue;
                }
                for w in spec.partners(&v.labels, pat, graph.labels) {
                    let j = graph.index_of(&Vertex { orbit: pat.right, labels: w }).expect("partner is a vertex");
                    row.push((j as u32, k as u16));
                }
            }
            row.sort_unstable();
            rows.push(row);
        }
        Ok(PatternRows {
            coeffs: vals.into_iter().map(|(_, a)| a).collect(),
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Dense floating-point copy.
    pub fn dense_f64(&self) -> Vec<Vec<f64>> {
        let m = self.len();
        let c: Vec<f64> = self.coeffs.iter().map(rat_to_f64).collect();
        let mut out = vec![vec![0.0; m]; m];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, k) in row {
                out[i][j as usize] += c[k as usize];
            }
        }
        out
    }
}

/// Orbits of the stabilizer of `target` on the vertices of `graph`.
pub fn stabilizer_blocks(spec: &FiGraphSpec, graph: &ConcreteGraph, target: usize) -> Vec<usize> {
    let y = &graph.vertices[target];
    let labels = graph.labels;
    let mut gens: Vec<Vec<u16>> = Vec::new();
    for h in spec.vertex_orbits[y.orbit].group().elements().iter().skip(1) {
        let mut s: Vec<u16> = (0..labels as u16).collect();
        for (i, &hi) in h.iter().enumerate() {
            s[y.labels[i] as usize] = y.labels[hi];
        }
        gens.push(s);
    }
    let free: Vec<u16> = (0..labels as u16).filter(|l| !y.labels.contains(l)).collect();
    for w in free.windows(2) {
        let mut s: Vec<u16> = (0..labels as u16).collect();
        s.swap(w[0] as usize, w[1] as usize);
        gens.push(s);
    }
    let mut parent: Vec<usize> = (0..graph.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, v) in graph.vertices.iter().enumerate() {
        for s in &gens {
            let t: Vec<u16> = v.labels.iter().map(|&l| s[l as usize]).collect();
            let w = Vertex { orbit: v.orbit, labels: spec.canonical_tuple(v.orbit, &t) };
            let j = graph.index_of(&w).expect("image is a vertex");
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    (0..graph.vertex_count())
        .map(|i| {
            let r = find(&mut parent, i);
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect()
}

/// Exact hitting times of `target` from every vertex.
pub fn hitting_oracle(spec: &FiGraphSpec, graph: &ConcreteGraph, rows: &PatternRows, target: usize) -> Result<Vec<Rational>> {
    Ok(moments_oracle(spec, graph, rows, target, 1)?.swap_remove(0))
}

/// Exact raw moments `E[tau^i]`, `i = 1..=order`, of the hitting time of
/// `target` from every vertex. Small graphs are solved directly; larger
/// ones on stabilizer orbits. Either way the answer is certified by an
/// exact residual check at every vertex.
pub fn moments_oracle(spec: &FiGraphSpec, graph: &ConcreteGraph, rows: &PatternRows, target: usize, order: usize) -> Result<Vec<Vec<Rational>>> {
    let m = graph.vertex_count();
    let block: Vec<usize> = if m <= UNLUMPED_LIMIT { (0..m).collect() } else { stabilizer_blocks(spec, graph, target) };
    let nblocks = block.iter().max().map_or(0, |b| b + 1);
    let tb = block[target];
    if block.iter().filter(|&&b| b == tb).count() != 1 {
        return Err(Error::InvalidTransition("target is not fixed by its stabilizer".into()));
    }
    let mut rep = vec![usize::MAX; nblocks];
    for (v, &b) in block.iter().enumerate() {
        if rep[b] == usize::MAX {
            rep[b] = v;
        }
    }
    // unknown index of each block, the target's block excluded
    let unk: Vec<Option<usize>> = {
        let mut next = 0;
        (0..nblocks)
            .map(|b| {
                (b != tb).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let dim = nblocks - 1;
    let lumped: Vec<Vec<(usize, Rational)>> = (0..nblocks)
        .filter(|&b| b != tb)
        .map(|b| {
            let mut acc: HashMap<usize, Rational> = HashMap::new();
            for &(z, k) in &rows.rows[rep[b]] {
                if let Some(u) = unk[block[z as usize]] {
                    *acc.entry(u).or_insert_with(|| rat_int(0)) += &rows.coeffs[k as usize];
                }
            }
            let mut v: Vec<_> = acc.into_iter().collect();
            v.sort_by_key(|e| e.0);
            v
        })
        .collect();
    let mut a = vec![vec![rat_int(0); dim]; dim];
    for (r, row) in lumped.iter().enumerate() {
        a[r][r] = rat_int(1);
        for (c, v) in row {
            a[r][*c] -= v;
        }
    }
    let apply = |x: &[Rational]| -> Vec<Rational> { lumped.iter().map(|row| row.iter().map(|(c, v)| v * &x[*c]).sum()).collect() };
    let mut solved: Vec<Vec<Rational>> = Vec::new();
    for i in 1..=order {
        let mut rhs = vec![rat_int(1); dim];
        for (j, mj) in solved.iter().enumerate() {
            let c = rat_int(small_binomial(i, j + 1));
            for (r, v) in apply(mj).into_iter().enumerate() {
                rhs[r] += &c * v;
            }
        }
        solved.push(solve_rational_modular(&a, &[rhs])?.swap_remove(0));
    }
    let per_block: Vec<Vec<Rational>> = solved
        .iter()
        .map(|x| unk.iter().map(|u| u.map_or_else(|| rat_int(0), |u| x[u].clone())).collect())
        .collect();
    certify(rows, target, &block, &per_block)?;
    Ok(per_block.iter().map(|v| block.iter().map(|&b| v[b].clone()).collect()).collect())
}

/// Checks `M_i(x) = 1 + sum_j C(i, j) (P M_j)(x) + (P M_i)(x)` exactly at
/// every `x != target`, for values constant on blocks. Each vertex's
/// equation depends only on its block and the multiset of `(block,
/// coefficient)` over its row, so equal signatures are checked once.
fn certify(rows: &PatternRows, target: usize, block: &[usize], values: &[Vec<Rational>]) -> Result<()> {
    let mut seen: std::collections::HashSet<(usize, Vec<(usize, u16, u32)>)> = std::collections::HashSet::new();
    for x in 0..rows.len() {
        if x == target {
            continue;
        }
        let mut counts: HashMap<(usize, u16), u32> = HashMap::new();
        for &(z, k) in &rows.rows[x] {
            *counts.entry((block[z as usize], k)).or_default() += 1;
        }
        let mut sig: Vec<(usize, u16, u32)> = counts.into_iter().map(|((b, k), c)| (b, k, c)).collect();
        sig.sort_unstable();
        let bx = block[x];
        if !seen.insert((bx, sig.clone())) {
            continue;
        }
        let pm: Vec<Rational> = values
            .iter()
            .map(|mi| sig.iter().map(|&(b, k, c)| &rows.coeffs[k as usize] * rat_int(c as i64) * &mi[b]).sum())
            .collect();
        for i in 1..=values.len() {
            let mut rhs = rat_int(1) + &pm[i - 1];
            for j in 1..i {
                rhs += rat_int(small_binomial(i, j)) * &pm[j - 1];
            }
            if rhs != values[i - 1][bx] {
                return Err(Error::InvalidTransition(format!("oracle residual nonzero at vertex {x}, order {i}")));
            }
        }
    }
    Ok(())
}

/// Monte Carlo estimate of raw moments `E[tau^i]`, `i = 1..=order`, with
/// their standard errors.
pub fn simulate_moments(rows: &PatternRows, start: usize, target: usize, walks: usize, order: usize, seed: u64) -> Vec<(f64, f64)> {
    let c: Vec<f64> = rows.coeffs.iter().map(rat_to_f64).collect();
    let cdf: Vec<Vec<(f64, u32)>> = rows
        .rows
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .map(|&(z, k)| {
                    acc += c[k as usize];
                    (acc, z)
                })
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = vec![0.0f64; order];
    let mut sq = vec![0.0f64; order];
    for _ in 0..walks {
        let mut x = start;
        let mut t = 0u64;
        while x != target {
            let row = &cdf[x];
            let u = rng.gen::<f64>() * row.last().map_or(1.0, |e| e.0);
            let i = row.partition_point(|e| e.0 <= u).min(row.len() - 1);
            x = row[i].1 as usize;
            t += 1;
        }
        let tf = t as f64;
        let mut p = 1.0;
        for i in 0..order {
            p *= tf;
            sums[i] += p;
            sq[i] += p * p;
        }
    }
    let w = walks as f64;
    (0..order)
        .map(|i| {
            let mean = sums[i] / w;
            let var = (sq[i] / w - mean * mean).max(0.0);
            (mean, (var / w).sqrt())
        })
        .collect()
}
