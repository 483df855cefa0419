use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub type Perm = Vec<usize>;

/// A permutation group on `[k]`, stored as its full element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Closure of the generators under composition.
    pub fn generate(degree: usize, gens: &[Perm]) -> Result<Self> {
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&i| i >= degree || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidSpec(format!("{g:?} is not a permutation of [{degree}]")));
            }
        }
        let id: Perm = (0..degree).collect();
        let mut set: BTreeSet<Perm> = BTreeSet::new();
        set.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q: Perm = (0..degree).map(|i| g[p[i]]).collect();
                if set.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        Ok(PermGroup {
            degree,
            elements: set.into_iter().collect(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::generate(degree, &[]).unwrap()
    }

    pub fn symmetric(degree: usize) -> Self {
        Self::generate(degree, &symmetric_generators(degree)).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// All elements; the identity comes first.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }
}

/// A transposition and a full cycle, which generate `S_k`.
pub fn symmetric_generators(k: usize) -> Vec<Perm> {
    if k < 2 {
        return Vec::new();
    }
    let mut swap: Perm = (0..k).collect();
    swap.swap(0, 1);
    let cycle: Perm = (0..k).map(|i| (i + 1) % k).collect();
    if k == 2 {
        vec![swap]
    } else {
        vec![swap, cycle]
    }
}

pub fn cyclic_generators(k: usize) -> Vec<Perm> {
    if k < 2 {
        return Vec::new();
    }
    vec![(0..k).map(|i| (i + 1) % k).collect()]
}
