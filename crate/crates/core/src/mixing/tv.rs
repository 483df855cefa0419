use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{rat_from_f64, rat_to_f64, Rational};
use crate::fispec::{instantiate, roofed_size_exact, vertex_count_exact, FiGraphSpec};
use crate::hitting::roofed_snapshot;
use crate::walks::{stationary, StationaryDist, TransitionRelation};

/// A mixing threshold, kept exact. `1/e` is taken as the nearest double.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Epsilon {
    pub label: String,
    pub value: Rational,
}

impl Epsilon {
    /// Accepts `p/q`, decimals, and `1/e`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let value = match t {
            "1/e" | "e^-1" | "exp(-1)" => rat_from_f64((-1f64).exp()).expect("finite"),
            _ => crate::exactnum::parse_rational(t).or_else(|_| {
                t.parse::<f64>()
                    .ok()
                    .and_then(rat_from_f64)
                    .ok_or_else(|| Error::Parse(format!("bad epsilon `{t}`")))
            })?,
        };
        let (zero, one) = (Rational::zero(), Rational::one());
        if value <= zero || value >= one {
            return Err(Error::Parse(format!("epsilon `{t}` must lie in (0, 1)")));
        }
        Ok(Epsilon { label: t.to_string(), value })
    }

    /// The complementary threshold `1 - eps`.
    pub fn complement(&self) -> Self {
        Epsilon {
            label: format!("1-({})", self.label),
            value: Rational::one() - &self.value,
        }
    }

    pub fn as_f64(&self) -> f64 {
        rat_to_f64(&self.value)
    }
}

/// The thresholds reported by default: `1/4`, `1/e` and `0.1`.
pub fn default_epsilons() -> Vec<Epsilon> {
    ["1/4", "1/e", "1/10"].iter().map(|s| Epsilon::parse(s).unwrap()).collect()
}

/// Exact `d(t)` is kept for this many leading steps; later steps only as
/// doubles, since the exact values grow linearly in `t`.
pub const EXACT_HEAD: usize = 64;

/// Total-variation profile at one `n`. Thresholds are decided exactly.
#[derive(Clone, Debug, Serialize)]
pub struct MixingProfile {
    pub family: String,
    pub walk: String,
    pub n: i64,
    /// Exact `d(t)`, worst case over starting vertex orbits, for
    /// `t < EXACT_HEAD`.
    #[serde(serialize_with = "ser_rationals")]
    pub d: Vec<Rational>,
    /// `d(t)` for every computed `t`.
    pub d_float: Vec<f64>,
    /// `(label, t_mix)`; `None` when not reached within the horizon.
    pub t_mix: Vec<(String, Option<usize>)>,
    /// Exact `(d(t_mix - 1), d(t_mix))` per threshold, when reached.
    #[serde(skip)]
    pub crossings: Vec<Option<(Rational, Rational)>>,
    #[serde(skip)]
    thresholds: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl MixingProfile {
    /// `min { t : d(t) <= eps }`. Exact for the thresholds the profile was
    /// computed with; any other `eps` is resolved on the exact head only.
    pub fn t_mix(&self, eps: &Epsilon) -> Option<usize> {
        if let Some(k) = self.thresholds.iter().position(|v| *v == eps.value) {
            return self.t_mix[k].1;
        }
        self.d.iter().position(|d| d <= &eps.value)
    }

    /// Number of steps computed (the horizon actually reached).
    pub fn steps(&self) -> usize {
        self.d_float.len() - 1
    }

    pub fn d_f64(&self) -> Vec<f64> {
        self.d_float.clone()
    }

    /// Exact `d(t_mix - 1)` and `d(t_mix)` for a computed threshold.
    pub fn crossing(&self, eps: &Epsilon) -> Option<&(Rational, Rational)> {
        let k = self.thresholds.iter().position(|v| *v == eps.value)?;
        self.crossings[k].as_ref()
    }
}

/// Period of the walk at `n`, as the gcd of return lengths in the roofed
/// chain of every vertex orbit. Return times to the roof vertex are
/// return times to the diagonal state, so this is the period of `G_n`.
pub fn period(spec: &FiGraphSpec, p: &TransitionRelation, n: i64) -> Result<u64> {
    let mut g = 0u64;
    for roof in 0..spec.vertex_orbits.len() {
        let (states, m) = roofed_snapshot(spec, p, roof, n)?;
        let diag = states.iter().position(|s| *s == spec.diagonal(roof)).expect("diagonal state");
        g = g.gcd(&chain_period(&m, diag));
    }
    Ok(g)
}

/// Period of the class of `start` by breadth-first levels.
fn chain_period(m: &[Vec<Rational>], start: usize) -> u64 {
    let k = m.len();
    let mut level: Vec<Option<u64>> = vec![None; k];
    level[start] = Some(0);
    let mut queue = std::collections::VecDeque::from([start]);
    let mut g = 0u64;
    while let Some(s) = queue.pop_front() {
        let ls = level[s].unwrap();
        for t in 0..k {
            if m[s][t].is_zero() {
                continue;
            }
            match level[t] {
                None => {
                    level[t] = Some(ls + 1);
                    queue.push_back(t);
                }
                Some(lt) => g = g.gcd(&(ls + 1).abs_diff(lt)),
            }
        }
    }
    g
}

/// Exact profile of one roof: `p_t` on roofed states started at the
/// diagonal, with integer-scaled powering so no fraction is reduced inside
/// the loop.
struct RoofPowering {
    /// `D * P` as integers.
    rows: Vec<Vec<(usize, BigInt)>>,
    den: BigInt,
    /// `v_t = D^t p_t`.
    v: Vec<BigInt>,
    scale: BigInt,
    /// Per state: `b * size(s) * pi(left)` as an integer, with the common
    /// denominator `b` of the stationary masses.
    target: Vec<BigInt>,
    b: BigInt,
}

impl RoofPowering {
    fn new(spec: &FiGraphSpec, p: &TransitionRelation, pi: &[Rational], roof: usize, n: i64) -> Result<Self> {
        let (states, m) = roofed_snapshot(spec, p, roof, n)?;
        let den = m.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let rows = m
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(t, x)| (t, (x * Rational::from(den.clone())).to_integer()))
                    .collect()
            })
            .collect();
        let b = pi.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let target = states
            .iter()
            .map(|s| {
                let a = (&pi[s.left] * Rational::from(b.clone())).to_integer();
                a * roofed_size_exact(spec, s, n)
            })
            .collect();
        let diag = states.iter().position(|s| *s == spec.diagonal(roof)).expect("diagonal state");
        let mut v = vec![BigInt::zero(); states.len()];
        v[diag] = BigInt::one();
        Ok(RoofPowering {
            rows,
            den,
            v,
            scale: BigInt::one(),
            target,
            b,
        })
    }

    /// Current distance as `(numerator, denominator)`, unreduced.
    fn distance(&self) -> (BigInt, BigInt) {
        let mut num = BigInt::zero();
        for (v, t) in self.v.iter().zip(&self.target) {
            num += (&self.b * v - t * &self.scale).abs();
        }
        (num, BigInt::from(2) * &self.b * &self.scale)
    }

    fn step(&mut self) {
        let mut next = vec![BigInt::zero(); self.v.len()];
        for (s, row) in self.rows.iter().enumerate() {
            if self.v[s].is_zero() {
                continue;
            }
            for (t, a) in row {
                next[*t] += &self.v[s] * a;
            }
        }
        self.v = next;
        self.scale *= &self.den;
    }
}

fn below(frac: &(BigInt, BigInt), eps: &Rational) -> bool {
    &frac.0 * eps.denom() <= eps.numer() * &frac.1
}

/// Checks that the stationary masses of the vertex orbits sum to one at `n`.
fn check_total_mass(spec: &FiGraphSpec, pi: &[Rational], n: i64) -> Result<()> {
    let total: Rational = pi
        .iter()
        .enumerate()
        .map(|(o, x)| x * Rational::from(vertex_count_exact(spec, o, n)))
        .sum();
    if !total.is_one() {
        return Err(Error::InvalidTransition(format!("stationary mass sums to {total} at n = {n}")));
    }
    Ok(())
}

/// Exact `d(t)` for `t = 0..=t_max`, stopping once every threshold in `eps`
/// is met. Periodic chains are rejected.
pub fn tv_profile(spec: &FiGraphSpec, p: &TransitionRelation, n: i64, t_max: usize, eps: &[Epsilon]) -> Result<MixingProfile> {
    let pi = stationary(spec, p)?;
    tv_profile_with(spec, p, &pi, n, t_max, eps)
}

/// As [`tv_profile`] with the stationary distribution supplied.
pub fn tv_profile_with(
    spec: &FiGraphSpec,
    p: &TransitionRelation,
    pi: &StationaryDist,
    n: i64,
    t_max: usize,
    eps: &[Epsilon],
) -> Result<MixingProfile> {
    if n < spec.min_instantiable_n() {
        return Err(Error::TooSmallN { n, min: spec.min_instantiable_n() });
    }
    let per = pi.per_vertex_at(n)?;
    check_total_mass(spec, &per, n)?;
    let per_period = period(spec, p, n)?;
    if per_period != 1 {
        return Err(Error::PeriodicChain { n, period: per_period });
    }
    let mut roofs: Vec<RoofPowering> =
        (0..spec.vertex_orbits.len()).map(|r| RoofPowering::new(spec, p, &per, r, n)).collect::<Result<_>>()?;
    let mut d = Vec::new();
    let mut d_float = Vec::new();
    let mut t_mix: Vec<Option<usize>> = vec![None; eps.len()];
    let mut crossings: Vec<Option<(Rational, Rational)>> = vec![None; eps.len()];
    let mut prev: Option<(BigInt, BigInt)> = None;
    for t in 0..=t_max {
        if t > 0 {
            roofs.iter_mut().for_each(RoofPowering::step);
        }
        // Worst roof, compared unreduced by cross-multiplication.
        let worst = roofs
            .iter()
            .map(RoofPowering::distance)
            .reduce(|a, b| if &b.0 * &a.1 > &a.0 * &b.1 { b } else { a })
            .expect("at least one vertex orbit");
        if let Some(q) = &prev {
            if &worst.0 * &q.1 > &q.0 * &worst.1 {
                return Err(Error::InvalidTransition(format!("d(t) increased at t = {t}, n = {n}")));
            }
        }
        d_float.push(frac_to_f64(&worst));
        if t < EXACT_HEAD {
            d.push(Rational::new(worst.0.clone(), worst.1.clone()));
        }
        for (k, e) in eps.iter().enumerate() {
            if t_mix[k].is_none() && below(&worst, &e.value) {
                t_mix[k] = Some(t);
                let at = Rational::new(worst.0.clone(), worst.1.clone());
                let before = prev.as_ref().map(|q| Rational::new(q.0.clone(), q.1.clone())).unwrap_or_else(|| at.clone());
                crossings[k] = Some((before, at));
            }
        }
        prev = Some(worst);
        if !eps.is_empty() && t_mix.iter().all(Option::is_some) {
            break;
        }
    }
    Ok(MixingProfile {
        family: spec.name.clone(),
        walk: p.label(),
        n,
        d,
        d_float,
        t_mix: eps.iter().zip(t_mix).map(|(e, t)| (e.label.clone(), t)).collect(),
        crossings,
        thresholds: eps.iter().map(|e| e.value.clone()).collect(),
    })
}

/// Double nearest to `a / b` without reducing the fraction.
fn frac_to_f64(f: &(BigInt, BigInt)) -> f64 {
    num_rational::Ratio::new_raw(f.0.clone(), f.1.clone()).to_f64().unwrap_or(f64::NAN)
}

/// Floating-point `d(t)` on the full vertex set of `G_n`, for `t = 0..=t_max`,
/// started from the first vertex of each orbit. An independent check of the
/// orbit reduction.
pub fn tv_full_state(spec: &FiGraphSpec, p: &TransitionRelation, pi: &StationaryDist, n: i64, t_max: usize) -> Result<Vec<f64>> {
    let g = instantiate(spec, n)?;
    let rows: Vec<Vec<(usize, f64)>> = p
        .relation
        .sparse_rows(spec, &g)?
        .into_iter()
        .map(|r| r.into_iter().map(|(j, a)| (j, rat_to_f64(&a))).collect())
        .collect();
    let per: Vec<f64> = pi.per_vertex_at(n)?.iter().map(rat_to_f64).collect();
    let target: Vec<f64> = g.vertices.iter().map(|v| per[v.orbit]).collect();
    let mut d = vec![0f64; t_max + 1];
    for o in 0..spec.vertex_orbits.len() {
        let mut cur = vec![0f64; g.vertex_count()];
        cur[g.orbit_vertices(o).start] = 1.0;
        for (t, slot) in d.iter_mut().enumerate() {
            if t > 0 {
                let mut next = vec![0f64; cur.len()];
                for (i, row) in rows.iter().enumerate() {
                    if cur[i] == 0.0 {
                        continue;
                    }
                    for &(j, a) in row {
                        next[j] += cur[i] * a;
                    }
                }
                cur = next;
            }
            let tv = 0.5 * cur.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum::<f64>();
            *slot = slot.max(tv);
        }
    }
    Ok(d)
}
