use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactnum::{rat_int, Rational};
use crate::fispec::{FiGraphSpec, Tuple, Vertex};
use crate::walks::TransitionRelation;

/// A vertex orbit together with where a tracked label `k` sits in the
/// vertex's tuple: a position class under the orbit's group, or absent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AugmentedState {
    pub orbit: usize,
    /// Least position in the group orbit of `k`'s position.
    pub position: Option<usize>,
}

/// One step of the walk lumped onto augmented states at a fixed `n`.
#[derive(Clone, Debug)]
pub struct AugmentedChain {
    pub n: i64,
    /// The tracked label.
    pub label: u16,
    pub states: Vec<AugmentedState>,
    pub matrix: Vec<Vec<Rational>>,
}

impl AugmentedChain {
    /// Image of a state under the projection to vertex orbits.
    pub fn project(&self, s: usize) -> usize {
        self.states[s].orbit
    }

    /// Pushes a distribution one step forward.
    pub fn step(&self, dist: &[Rational]) -> Vec<Rational> {
        let mut out = vec![rat_int(0); dist.len()];
        for (a, row) in dist.iter().zip(&self.matrix) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += a * x;
            }
        }
        out
    }

    /// Projection of a distribution onto vertex orbits.
    pub fn project_dist(&self, dist: &[Rational], orbits: usize) -> Vec<Rational> {
        let mut out = vec![rat_int(0); orbits];
        for (s, x) in dist.iter().enumerate() {
            out[self.project(s)] += x;
        }
        out
    }
}

fn position_class(spec: &FiGraphSpec, orbit: usize, pos: usize) -> usize {
    spec.vertex_orbits[orbit].group().elements().iter().map(|h| h[pos]).min().unwrap_or(pos)
}

fn locate(spec: &FiGraphSpec, v: &Vertex, label: u16) -> AugmentedState {
    AugmentedState {
        orbit: v.orbit,
        position: v.labels.iter().position(|&x| x == label).map(|i| position_class(spec, v.orbit, i)),
    }
}

/// Builds the augmented chain by counting partners of one representative
/// per state. `label` must be a valid label at `n`.
pub fn augmented_chain(spec: &FiGraphSpec, p: &TransitionRelation, n: i64, label: u16) -> Result<AugmentedChain> {
    let labels = spec.labels_at(n);
    if n < spec.min_instantiable_n() || i64::from(label) >= labels {
        return Err(Error::TooSmallN { n, min: spec.min_instantiable_n().max(i64::from(label) + 1) });
    }
    let mut states = Vec::new();
    let mut reps: Vec<Tuple> = Vec::new();
    for (o, vo) in spec.vertex_orbits.iter().enumerate() {
        let k = vo.arity;
        // Other labels are drawn from the smallest ones not equal to `label`.
        let others: Vec<u16> = (0..labels as u16).filter(|&x| x != label).take(k).collect();
        let mut positions: Vec<Option<usize>> = (0..k).map(|i| position_class(spec, o, i)).map(Some).collect();
        positions.sort();
        positions.dedup();
        positions.insert(0, None);
        for pos in positions {
            let mut t: Vec<u16> = others.clone();
            if let Some(i) = pos {
                t.insert(i, label);
                t.truncate(k);
            }
            reps.push(spec.canonical_tuple(o, &t));
            states.push(AugmentedState { orbit: o, position: pos });
        }
    }
    let index: BTreeMap<AugmentedState, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let vals = p.relation.specialize(n)?;
    let mut matrix = vec![vec![rat_int(0); states.len()]; states.len()];
    for (s, (st, rep)) in states.iter().zip(&reps).enumerate() {
        for (pat, a) in &vals {
            if pat.left != st.orbit {
                continue;
            }
            for w in spec.partners(rep, pat, labels as usize) {
                let t = index[&locate(spec, &Vertex { orbit: pat.right, labels: w }, label)];
                matrix[s][t] += a;
            }
        }
    }
    Ok(AugmentedChain { n, label, states, matrix })
}

/// Whether projecting after one augmented step equals one step of the
/// vertex-orbit quotient chain, from every augmented state.
pub fn projection_commutes(spec: &FiGraphSpec, p: &TransitionRelation, chain: &AugmentedChain) -> Result<bool> {
    let q = p.quotient(spec);
    let m = spec.vertex_orbits.len();
    for s in 0..chain.states.len() {
        let mut e = vec![rat_int(0); chain.states.len()];
        e[s] = rat_int(1);
        let lhs = chain.project_dist(&chain.step(&e), m);
        let o = chain.project(s);
        for (o2, x) in lhs.iter().enumerate() {
            if *x != q[o][o2].eval(chain.n)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
