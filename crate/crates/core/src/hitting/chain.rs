use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{fit_rational_stabilized, fit_with_denominator, rat_int, Poly, RationalFunc, Rational};
use crate::fispec::{FiGraphSpec, PairPattern, RoofedCounts};
use crate::walks::TransitionRelation;

type CacheKey = (String, usize, i64, Vec<PairPattern>);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<RoofedCounts>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<RoofedCounts>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Patterns counted for a walk: all edges and diagonals, plus anything
/// else in the walk's support. Shared lists let walks reuse counts.
fn count_patterns(spec: &FiGraphSpec, p: &TransitionRelation) -> Vec<PairPattern> {
    let mut set: BTreeSet<PairPattern> = spec.edge_patterns().cloned().collect();
    set.extend((0..spec.vertex_orbits.len()).map(|o| spec.diagonal(o)));
    set.extend(p.relation.patterns());
    set.into_iter().collect()
}

/// Roofed counts at `n`, memoized per spec, roof and pattern list.
pub fn roofed_counts(spec: &FiGraphSpec, roof: usize, n: i64, patterns: &[PairPattern]) -> Arc<RoofedCounts> {
    let key = (spec.to_json(), roof, n, patterns.to_vec());
    if let Some(c) = cache().lock().unwrap().get(&key) {
        return c.clone();
    }
    let c = Arc::new(RoofedCounts::compute(spec, roof, n, patterns));
    cache().lock().unwrap().insert(key, c.clone());
    c
}

/// Exact roofed transition matrix at `n`, from counting alone.
pub fn roofed_snapshot(spec: &FiGraphSpec, p: &TransitionRelation, roof: usize, n: i64) -> Result<(Vec<PairPattern>, Vec<Vec<Rational>>)> {
    let patterns = count_patterns(spec, p);
    let counts = roofed_counts(spec, roof, n, &patterns);
    let coeffs: Vec<Rational> = patterns.iter().map(|q| p.get(q).eval(n)).collect::<Result<_>>()?;
    let k = counts.states.len();
    let mut m = vec![vec![rat_int(0); k]; k];
    for (s, row) in counts.rows.iter().enumerate() {
        for &(pi, t, c) in row {
            if !coeffs[pi].is_zero() {
                m[s][t] += &coeffs[pi] * rat_int(c as i64);
            }
        }
    }
    Ok((counts.states.clone(), m))
}

/// The chain on `roof`-roofed pair orbits, with symbolic entries.
#[derive(Clone, Debug)]
pub struct RoofedOrbitChain {
    pub roof: usize,
    pub states: Vec<PairPattern>,
    pub diagonal: usize,
    pub transitions: Vec<Vec<RationalFunc>>,
    pub snapshots: BTreeMap<i64, Vec<Vec<Rational>>>,
    /// First `n` from which every fitted entry validated.
    pub onset: i64,
    pub walk: String,
}

impl RoofedOrbitChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, p: &PairPattern) -> Option<usize> {
        self.states.binary_search(p).ok()
    }

    /// Symbolic entries evaluated at `n`.
    pub fn matrix_at(&self, n: i64) -> Result<Vec<Vec<Rational>>> {
        self.transitions.iter().map(|row| row.iter().map(|f| f.eval(n)).collect()).collect()
    }

    /// Indices of the non-diagonal states, in order.
    pub fn off_diagonal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| i != self.diagonal).collect()
    }
}

/// Degree bound for entries times the common coefficient denominator.
fn entry_degree(spec: &FiGraphSpec, hint: &Poly) -> usize {
    spec.max_arity() + hint.degree().max(0) as usize
}

/// A sweep long enough to fit every entry with held-out points.
pub fn default_sweep(spec: &FiGraphSpec, p: &TransitionRelation) -> Vec<i64> {
    let n0 = spec.stabilization_bound();
    let d = entry_degree(spec, &denominator_hint(p)) as i64;
    (n0..=n0 + d + 4).collect()
}

fn denominator_hint(p: &TransitionRelation) -> Poly {
    p.relation.iter().fold(Poly::one(), |acc, (_, f)| Poly::lcm(&acc, f.den()))
}

/// Builds the roofed chain by exact counting at each `n` of the sweep and
/// fitting every entry with held-out validation.
pub fn build_roofed_chain(spec: &FiGraphSpec, p: &TransitionRelation, roof: usize, ns: &[i64]) -> Result<RoofedOrbitChain> {
    let min = spec.stabilization_bound();
    if let Some(&n) = ns.iter().find(|&&n| n < min) {
        return Err(Error::TooSmallN { n, min });
    }
    let snaps: Vec<(i64, Vec<PairPattern>, Vec<Vec<Rational>>)> = ns
        .par_iter()
        .map(|&n| roofed_snapshot(spec, p, roof, n).map(|(s, m)| (n, s, m)))
        .collect::<Result<_>>()?;
    let states = snaps[0].1.clone();
    let k = states.len();
    for (n, _, m) in &snaps {
        for (s, row) in m.iter().enumerate() {
            let sum: Rational = row.iter().sum();
            if sum != rat_int(1) {
                return Err(Error::InvalidTransition(format!(
                    "roofed row {} sums to {sum} at n = {n}",
                    spec.fmt_pattern(states[s].clone())
                )));
            }
        }
    }
    let hint = denominator_hint(p);
    let deg = entry_degree(spec, &hint);
    let mut onset = ns.iter().copied().min().unwrap_or(min);
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|s| (0..k).map(move |t| (s, t))).collect();
    let fitted: Vec<(RationalFunc, i64)> = cells
        .par_iter()
        .map(|&(s, t)| {
            let pts: Vec<(i64, Rational)> = snaps.iter().map(|(n, _, m)| (*n, m[s][t].clone())).collect();
            if pts.iter().all(|(_, v)| *v == rat_int(0)) {
                return Ok((RationalFunc::zero(), onset));
            }
            match fit_with_denominator(&pts, &hint, deg) {
                Ok(f) => Ok((f, onset)),
                Err(_) => {
                    let d = pts.len().saturating_sub(5) / 2;
                    fit_rational_stabilized(&pts, d, d)
                }
            }
        })
        .collect::<Result<_>>()?;
    let mut transitions = vec![vec![RationalFunc::zero(); k]; k];
    for (&(s, t), (f, o)) in cells.iter().zip(fitted) {
        transitions[s][t] = f;
        onset = onset.max(o);
    }
    for (s, row) in transitions.iter().enumerate() {
        let sum: RationalFunc = row.iter().cloned().sum();
        if sum != RationalFunc::one() {
            return Err(Error::InvalidTransition(format!(
                "symbolic roofed row {} sums to {sum}",
                spec.fmt_pattern(states[s].clone())
            )));
        }
    }
    let diagonal = states.binary_search(&spec.diagonal(roof)).expect("diagonal state");
    Ok(RoofedOrbitChain {
        roof,
        states,
        diagonal,
        transitions,
        snapshots: snaps.into_iter().map(|(n, _, m)| (n, m)).collect(),
        onset,
        walk: p.label(),
    })
}
