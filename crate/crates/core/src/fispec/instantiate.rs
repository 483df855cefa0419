use std::collections::HashMap;

use super::pattern::{Tuple, Vertex};
use super::spec::FiGraphSpec;
use crate::error::{Error, Result};

/// The graph `G_n` of a family.
#[derive(Clone, Debug)]
pub struct ConcreteGraph {
    pub n: i64,
    pub labels: usize,
    pub vertices: Vec<Vertex>,
    orbit_ranges: Vec<std::ops::Range<usize>>,
    index: HashMap<Vertex, usize>,
    /// Neighbours with the index of the edge orbit in `spec.edges`.
    pub adjacency: Vec<Vec<(u32, u16)>>,
}

impl ConcreteGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn orbit_vertices(&self, orbit: usize) -> std::ops::Range<usize> {
        self.orbit_ranges[orbit].clone()
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[(u32, u16)] {
        &self.adjacency[i]
    }

    /// Undirected edge count; a loop counts once.
    pub fn edge_count(&self) -> usize {
        let mut twice = 0;
        for (i, nb) in self.adjacency.iter().enumerate() {
            for &(j, _) in nb {
                twice += if j as usize == i { 2 } else { 1 };
            }
        }
        twice / 2
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !std::mem::replace(&mut seen[v as usize], true) {
                    count += 1;
                    stack.push(v as usize);
                }
            }
        }
        count == n
    }
}

/// Canonical tuples of one orbit over `labels` labels, in lexicographic order.
pub fn orbit_tuples(spec: &FiGraphSpec, orbit: usize, labels: usize) -> Vec<Tuple> {
    let k = spec.arity(orbit);
    let mut out = Vec::new();
    let mut cur = [0u16; 8];
    let mut used = vec![false; labels];
    enumerate(k, 0, labels, &mut used, &mut cur, &mut |t| {
        let c = spec.canonical_tuple(orbit, t);
        if c.as_slice() == t {
            out.push(c);
        }
    });
    out
}

fn enumerate(k: usize, pos: usize, labels: usize, used: &mut [bool], cur: &mut [u16; 8], emit: &mut impl FnMut(&[u16])) {
    if pos == k {
        emit(&cur[..k]);
        return;
    }
    for l in 0..labels {
        if used[l] {
            continue;
        }
        used[l] = true;
        cur[pos] = l as u16;
        enumerate(k, pos + 1, labels, used, cur, emit);
        used[l] = false;
    }
}

/// Builds `G_n` without edges; enough for transition matrices built from
/// arbitrary relations.
pub fn instantiate_vertices(spec: &FiGraphSpec, n: i64) -> Result<ConcreteGraph> {
    let min = spec.min_instantiable_n();
    if n < min {
        return Err(Error::TooSmallN { n, min });
    }
    let labels = spec.labels_at(n) as usize;
    let mut vertices = Vec::new();
    let mut orbit_ranges = Vec::new();
    for o in 0..spec.vertex_orbits.len() {
        let start = vertices.len();
        vertices.extend(orbit_tuples(spec, o, labels).into_iter().map(|labels| Vertex { orbit: o, labels }));
        orbit_ranges.push(start..vertices.len());
    }
    let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    Ok(ConcreteGraph {
        n,
        labels,
        adjacency: vec![Vec::new(); vertices.len()],
        vertices,
        orbit_ranges,
        index,
    })
}

/// Instantiates the family at `n` with all edges.
pub fn instantiate(spec: &FiGraphSpec, n: i64) -> Result<ConcreteGraph> {
    let mut g = instantiate_vertices(spec, n)?;
    let mut adjacency = Vec::with_capacity(g.vertices.len());
    for v in &g.vertices {
        let mut nb = Vec::new();
        for (ei, e) in spec.edges.iter().enumerate() {
            if e.pattern.left != v.orbit {
                continue;
            }
            for w in spec.partners(&v.labels, &e.pattern, g.labels) {
                let wv = Vertex { orbit: e.pattern.right, labels: w };
                nb.push((g.index[&wv] as u32, ei as u16));
            }
        }
        nb.sort_unstable();
        adjacency.push(nb);
    }
    g.adjacency = adjacency;
    Ok(g)
}
