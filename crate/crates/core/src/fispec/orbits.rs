use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::instantiate::orbit_tuples;
use super::pattern::{Matching, PairPattern, Tuple};
use super::spec::FiGraphSpec;
use crate::error::Result;
use crate::exactnum::{fit_polynomial, rat_int, Poly, Rational};

/// A vertex orbit or an orbit of ordered pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orbit {
    Vertex(usize),
    Pair(PairPattern),
}

/// Canonical representative `(0, 1, ..., k-1)` of a vertex orbit.
pub fn base_tuple(spec: &FiGraphSpec, orbit: usize) -> Tuple {
    spec.canonical_tuple(orbit, &(0..spec.arity(orbit) as u16).collect::<Vec<_>>())
}

/// Vertices of an orbit at `n`, by enumeration.
pub fn count_vertices(spec: &FiGraphSpec, orbit: usize, n: i64) -> usize {
    orbit_tuples(spec, orbit, spec.labels_at(n).max(0) as usize).len()
}

/// Partners of one fixed left vertex under `p` at `n`, by enumeration.
pub fn count_partners(spec: &FiGraphSpec, p: &PairPattern, n: i64) -> usize {
    let z = base_tuple(spec, p.left);
    spec.partners(&z, p, spec.labels_at(n) as usize).len()
}

/// Orbit size polynomial from exact counts at `n0, n0 + 1, ...`.
pub fn orbit_size(spec: &FiGraphSpec, orbit: &Orbit) -> Result<Poly> {
    let n0 = spec.stabilization_bound();
    let (deg, count): (usize, Box<dyn Fn(i64) -> usize>) = match orbit {
        Orbit::Vertex(o) => {
            let o = *o;
            (spec.arity(o), Box::new(move |n| count_vertices(spec, o, n)))
        }
        Orbit::Pair(p) => {
            let t = spec.transpose(p);
            let deg = spec.arity(p.left) + spec.arity(p.right);
            let right = p.right;
            (deg, Box::new(move |n| count_vertices(spec, right, n) * count_partners(spec, &t, n)))
        }
    };
    let pts: Vec<(i64, Rational)> = (n0..n0 + deg as i64 + 4).map(|n| (n, rat_int(count(n) as i64))).collect();
    fit_polynomial(&pts, deg)
}

/// Partner-count polynomial for a pattern.
pub fn partner_count_poly(spec: &FiGraphSpec, p: &PairPattern) -> Result<Poly> {
    let n0 = spec.stabilization_bound();
    let deg = spec.arity(p.right);
    let pts: Vec<(i64, Rational)> = (n0..n0 + deg as i64 + 4)
        .map(|n| (n, rat_int(count_partners(spec, p, n) as i64)))
        .collect();
    fit_polynomial(&pts, deg)
}

/// Number of distinct images of a pattern's matching under both groups.
pub fn pattern_class_size(spec: &FiGraphSpec, p: &PairPattern) -> usize {
    let lo = spec.vertex_orbits[p.left].group().elements();
    let ro = spec.vertex_orbits[p.right].group().elements();
    let mut set: BTreeSet<Matching> = BTreeSet::new();
    for h in lo {
        for g in ro {
            let mut m: Matching = p.matches.iter().map(|&(i, j)| (h[i as usize] as u8, g[j as usize] as u8)).collect();
            m.sort_unstable();
            set.insert(m);
        }
    }
    set.len()
}

fn falling(a: i64, k: usize) -> BigInt {
    (0..k as i64).fold(BigInt::from(1), |acc, i| acc * BigInt::from((a - i).max(0)))
}

/// Exact vertex count `(L)_k / |H|` at `n`.
pub fn vertex_count_exact(spec: &FiGraphSpec, orbit: usize, n: i64) -> BigInt {
    let o = &spec.vertex_orbits[orbit];
    falling(spec.labels_at(n), o.arity) / BigInt::from(o.group().order())
}

/// Number of `z` with `(z, y)` in the orbit `p`, for one fixed roof `y`:
/// `|class| * (L - k_y)_f / |H_z|`, with `f` the unmatched slots of `z`.
pub fn roofed_size_exact(spec: &FiGraphSpec, p: &PairPattern, n: i64) -> BigInt {
    let ky = spec.arity(p.right);
    let kz = spec.arity(p.left);
    let f = kz - p.matches.len();
    let hz = spec.vertex_orbits[p.left].group().order();
    BigInt::from(pattern_class_size(spec, p)) * falling(spec.labels_at(n) - ky as i64, f) / BigInt::from(hz)
}

/// Size of the pair orbit `p` at `n`.
pub fn pair_orbit_size_exact(spec: &FiGraphSpec, p: &PairPattern, n: i64) -> BigInt {
    roofed_size_exact(spec, p, n) * vertex_count_exact(spec, p.right, n)
}

/// Closed-form partner count of one left vertex under `p`, as a
/// polynomial in `n`: `|class| * (L - k_left)_f / |H_right|`.
pub fn partner_count_exact_poly(spec: &FiGraphSpec, p: &PairPattern) -> Poly {
    let kl = spec.arity(p.left);
    let kr = spec.arity(p.right);
    let f = kr - p.matches.len();
    let hr = spec.vertex_orbits[p.right].group().order() as i64;
    let class = pattern_class_size(spec, p) as i64;
    Poly::falling((spec.shift + kl) as i64, f).scale(&crate::exactnum::rat(class, hr))
}

/// Closed-form vertex count `(L)_k / |H|` as a polynomial in `n`.
pub fn vertex_count_poly(spec: &FiGraphSpec, orbit: usize) -> Poly {
    let o = &spec.vertex_orbits[orbit];
    Poly::falling(spec.shift as i64, o.arity).scale(&crate::exactnum::rat(1, o.group().order() as i64))
}

/// Closed form of [`roofed_size_exact`] as a polynomial in `n`.
pub fn roofed_size_poly(spec: &FiGraphSpec, p: &PairPattern) -> Poly {
    let ky = spec.arity(p.right);
    let f = spec.arity(p.left) - p.matches.len();
    let hz = spec.vertex_orbits[p.left].group().order() as i64;
    let class = pattern_class_size(spec, p) as i64;
    Poly::falling((spec.shift + ky) as i64, f).scale(&crate::exactnum::rat(class, hz))
}
