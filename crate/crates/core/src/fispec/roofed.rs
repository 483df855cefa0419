use std::collections::HashMap;

use rayon::prelude::*;

use super::pattern::{PairPattern, Vertex};
use super::spec::FiGraphSpec;

/// Orbit-level transition counts for one roof at one `n`: for each roofed
/// state `[z, y]` and pattern `e`, how many partners `w` of `z` under `e`
/// land in each state `[w, y]`.
#[derive(Clone, Debug)]
pub struct RoofedCounts {
    pub n: i64,
    pub roof: usize,
    pub states: Vec<PairPattern>,
    pub diagonal: usize,
    pub patterns: Vec<PairPattern>,
    /// Per state: `(pattern index, target state, count)`.
    pub rows: Vec<Vec<(usize, usize, u64)>>,
}

impl RoofedCounts {
    pub fn compute(spec: &FiGraphSpec, roof: usize, n: i64, patterns: &[PairPattern]) -> Self {
        let states = spec.roofed_states(roof);
        let index: HashMap<&PairPattern, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let diagonal = index[&spec.diagonal(roof)];
        let labels = spec.labels_at(n) as usize;
        let rows = states
            .par_iter()
            .map(|s| {
                let (z, y) = spec.representative(s);
                let mut acc: HashMap<(usize, usize), u64> = HashMap::new();
                for (pi, e) in patterns.iter().enumerate() {
                    if e.left != s.left {
                        continue;
                    }
                    for w in spec.partners(&z.labels, e, labels) {
                        let wv = Vertex { orbit: e.right, labels: w };
                        let t = index[&spec.classify(&wv, &y)];
                        *acc.entry((pi, t)).or_default() += 1;
                    }
                }
                let mut row: Vec<(usize, usize, u64)> = acc.into_iter().map(|((p, t), c)| (p, t, c)).collect();
                row.sort_unstable();
                row
            })
            .collect();
        RoofedCounts {
            n,
            roof,
            states,
            diagonal,
            patterns: patterns.to_vec(),
            rows,
        }
    }

    pub fn state_index(&self, p: &PairPattern) -> Option<usize> {
        self.states.iter().position(|s| s == p)
    }

    /// Whether every state reaches the diagonal through patterns allowed
    /// by `active`.
    pub fn all_reach_diagonal(&self, active: &[bool]) -> bool {
        let k = self.states.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (s, row) in self.rows.iter().enumerate() {
            for &(p, t, c) in row {
                if c > 0 && active[p] {
                    rev[t].push(s);
                }
            }
        }
        let mut seen = vec![false; k];
        seen[self.diagonal] = true;
        let mut stack = vec![self.diagonal];
        while let Some(t) = stack.pop() {
            for &s in &rev[t] {
                if !std::mem::replace(&mut seen[s], true) {
                    stack.push(s);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}
