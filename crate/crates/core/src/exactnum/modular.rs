//! Arithmetic modulo word-sized primes: Gaussian elimination, evaluation of
//! rational functions, and reconstruction of rational functions in `n` from
//! images at many points and primes.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{Poly, RationalFunc, Rational};
use crate::error::{Error, Result};

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn invmod(a: u64, p: u64) -> Option<u64> {
    (!a.is_multiple_of(p)).then(|| powmod(a, p - 2, p))
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^62, in decreasing order.
pub fn primes() -> impl Iterator<Item = u64> {
    let mut cur = (1u64 << 62) + 1;
    std::iter::from_fn(move || {
        loop {
            cur -= 2;
            if is_prime(cur) {
                return Some(cur);
            }
        }
    })
}

pub fn int_mod(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

/// Image of a rational modulo `p`, if its denominator is invertible.
pub fn rat_mod(r: &Rational, p: u64) -> Option<u64> {
    let d = invmod(int_mod(r.denom(), p), p)?;
    Some(mulmod(int_mod(r.numer(), p), d, p))
}

/// A rational function with coefficients reduced modulo one prime.
#[derive(Clone, Debug)]
pub struct ModRatFunc {
    num: Vec<u64>,
    den: Vec<u64>,
    p: u64,
}

impl ModRatFunc {
    pub fn new(f: &RationalFunc, p: u64) -> Option<Self> {
        let red = |q: &Poly| q.coeffs().iter().map(|c| rat_mod(c, p)).collect::<Option<Vec<_>>>();
        Some(ModRatFunc {
            num: red(f.num())?,
            den: red(f.den())?,
            p,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Numerator and denominator values at `x`.
    pub fn eval_parts(&self, x: u64) -> (u64, u64) {
        (horner(&self.num, x, self.p), horner(&self.den, x, self.p))
    }

    pub fn eval(&self, x: u64) -> Option<u64> {
        let d = horner(&self.den, x, self.p);
        let n = horner(&self.num, x, self.p);
        Some(mulmod(n, invmod(d, self.p)?, self.p))
    }
}

fn horner(c: &[u64], x: u64, p: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &a| addmod(mulmod(acc, x, p), a, p))
}

/// Montgomery multiplication modulo an odd `p < 2^62`; values in the
/// Montgomery domain stay in `[0, p)`.
#[derive(Clone, Copy, Debug)]
struct Mont {
    p: u64,
    /// `-p^{-1} mod 2^64`
    neg_inv: u64,
    /// `2^128 mod p`
    r2: u64,
}

impl Mont {
    fn new(p: u64) -> Self {
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        Mont {
            p,
            neg_inv: inv.wrapping_neg(),
            r2: mulmod(r, r, p),
        }
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline]
    fn to(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }

    #[inline]
    fn from(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }
}

/// LU factorization of a square matrix modulo `p`.
pub struct LuMod {
    n: usize,
    /// Factors in the Montgomery domain; the diagonal of `U` is inverted.
    lu: Vec<u64>,
    perm: Vec<usize>,
    mont: Mont,
}

impl LuMod {
    /// Returns `None` if the matrix is singular modulo `p`.
    pub fn factor(mut a: Vec<u64>, n: usize, p: u64) -> Option<Self> {
        let mont = Mont::new(p);
        for x in a.iter_mut() {
            *x = mont.to(*x);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let piv = (k..n).find(|&r| a[r * n + k] != 0)?;
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let inv = mont.to(invmod(mont.from(a[k * n + k]), p)?);
            a[k * n + k] = inv;
            let (top, rest) = a.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..(k + 1) * n];
            for i in 0..n - k - 1 {
                let row = &mut rest[i * n..(i + 1) * n];
                if row[k] == 0 {
                    continue;
                }
                let f = mont.mul(row[k], inv);
                row[k] = f;
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    if u != 0 {
                        *x = submod(*x, mont.mul(f, u), p);
                    }
                }
            }
        }
        Some(LuMod { n, lu: a, perm, mont })
    }

    pub fn solve(&self, b: &[u64]) -> Vec<u64> {
        let (n, m, p) = (self.n, self.mont, self.mont.p);
        let mut y: Vec<u64> = self.perm.iter().map(|&i| m.to(b[i])).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc = submod(acc, m.mul(self.lu[i * n + j], y[j]), p);
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc = submod(acc, m.mul(self.lu[i * n + j], y[j]), p);
            }
            y[i] = m.mul(acc, self.lu[i * n + i]);
        }
        y.into_iter().map(|v| m.from(v)).collect()
    }
}

/// Dense polynomial over Z/p, ascending, trimmed.
type MPoly = Vec<u64>;

fn trim(mut a: MPoly) -> MPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn deg(a: &MPoly) -> isize {
    a.len() as isize - 1
}

fn pmul(a: &MPoly, b: &MPoly, p: u64) -> MPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addmod(out[i + j], mulmod(x, y, p), p);
        }
    }
    trim(out)
}

fn psub(a: &MPoly, b: &MPoly, p: u64) -> MPoly {
    let len = a.len().max(b.len());
    trim((0..len).map(|i| submod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p)).collect())
}

fn pdivrem(a: &MPoly, b: &MPoly, p: u64) -> (MPoly, MPoly) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let inv = invmod(b[db], p).unwrap();
    let mut r = a.clone();
    let mut q = vec![0; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = mulmod(r[i + db], inv, p);
        if c == 0 {
            continue;
        }
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] = submod(r[i + j], mulmod(c, bj, p), p);
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

/// Degree of `gcd(a, b)` modulo a prime that keeps both leading
/// coefficients; an upper bound for the degree over Q.
pub(crate) fn gcd_degree_bound(a: &[Rational], b: &[Rational]) -> Option<usize> {
    let p = primes().take(4).find(|&p| {
        let ok = |c: &[Rational]| c.iter().all(|x| rat_mod(x, p).is_some()) && rat_mod(c.last().unwrap(), p) != Some(0);
        ok(a) && ok(b)
    })?;
    let red = |c: &[Rational]| -> MPoly { c.iter().map(|x| rat_mod(x, p).unwrap()).collect() };
    let (mut x, mut y) = (red(a), red(b));
    while !y.is_empty() {
        let (_, r) = pdivrem(&x, &y, p);
        x = y;
        y = r;
    }
    Some(x.len() - 1)
}

/// Interpolation nodes modulo `p` with the divided-difference inverses
/// and the node polynomial precomputed, shared by every interpolant.
struct Nodes<'a> {
    xs: &'a [u64],
    p: u64,
    /// `inv[j][i] = 1 / (x_i - x_{i-j})` for `i >= j`.
    inv: Vec<Vec<u64>>,
    /// `prod (x - x_i)`
    m: MPoly,
}

impl<'a> Nodes<'a> {
    fn new(xs: &'a [u64], p: u64) -> Self {
        let n = xs.len();
        let mut inv = vec![Vec::new()];
        for j in 1..n {
            let diffs: Vec<u64> = (0..n).map(|i| if i >= j { submod(xs[i], xs[i - j], p) } else { 1 }).collect();
            inv.push(batch_invert(&diffs, p));
        }
        let mut m: MPoly = vec![1];
        for &x in xs {
            m = pmul(&m, &vec![submod(0, x, p), 1], p);
        }
        Nodes { xs, p, inv, m }
    }

    /// Interpolant of degree below `xs.len()`.
    fn interpolate(&self, ys: &[u64]) -> MPoly {
        let (n, p, xs) = (self.xs.len(), self.p, self.xs);
        let mut dd = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                dd[i] = mulmod(submod(dd[i], dd[i - 1], p), self.inv[j][i], p);
            }
        }
        let mut f: MPoly = Vec::new();
        for i in (0..n).rev() {
            f = pmul(&f, &vec![submod(0, xs[i], p), 1], p);
            if f.is_empty() {
                f = vec![dd[i]];
            } else {
                f[0] = addmod(f[0], dd[i], p);
            }
            f = trim(f);
        }
        f
    }
}

/// Inverts every entry with one modular inversion; entries must be nonzero.
pub fn batch_invert(v: &[u64], p: u64) -> Vec<u64> {
    let mut prefix = Vec::with_capacity(v.len());
    let mut acc = 1u64;
    for &x in v {
        prefix.push(acc);
        acc = mulmod(acc, x, p);
    }
    let mut inv = invmod(acc, p).expect("distinct nodes");
    let mut out = vec![0u64; v.len()];
    for i in (0..v.len()).rev() {
        out[i] = mulmod(inv, prefix[i], p);
        inv = mulmod(inv, v[i], p);
    }
    out
}

/// Rational function with slack: returns `(num, monic den)` mod p when the
/// data over-determines the result by at least `slack` points.
fn reconstruct_mod(nodes: &Nodes, ys: &[u64], slack: usize) -> Option<(MPoly, MPoly)> {
    let (xs, p) = (nodes.xs, nodes.p);
    if ys.iter().all(|&y| y == 0) {
        return (xs.len() > slack).then(|| (Vec::new(), vec![1]));
    }
    let (f, m) = (nodes.interpolate(ys), nodes.m.clone());
    // Extended Euclid on (m, f); track t with r = s*m + t*f.
    let (mut r0, mut r1) = (m, f);
    let (mut t0, mut t1): (MPoly, MPoly) = (Vec::new(), vec![1]);
    let mut best: Option<(usize, MPoly, MPoly)> = None;
    while !r1.is_empty() {
        let (q, r2) = pdivrem(&r0, &r1, p);
        let qd = deg(&q) as usize;
        if best.as_ref().is_none_or(|b| qd > b.0) {
            best = Some((qd, r1.clone(), t1.clone()));
        }
        let t2 = psub(&t0, &pmul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let (qd, r, t) = best?;
    if qd < slack + 1 {
        return None;
    }
    let inv = invmod(*t.last()?, p)?;
    let num: MPoly = r.iter().map(|&c| mulmod(c, inv, p)).collect();
    let den: MPoly = t.iter().map(|&c| mulmod(c, inv, p)).collect();
    if xs.iter().any(|&x| horner(&den, x, p) == 0) {
        return None;
    }
    Some((num, den))
}

/// Rational number with `|a|, b <= sqrt(m / 2)` congruent to `u` mod `m`.
pub fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    let (a, b) = if t1.sign() == Sign::Minus { (-r1, -t1) } else { (r1, t1) };
    Some(Rational::new(a, b))
}

fn crt(a: &BigInt, m: &BigInt, b: u64, p: u64) -> BigInt {
    let am = int_mod(a, p);
    let minv = invmod(int_mod(m, p), p).unwrap();
    let k = mulmod(submod(b, am, p), minv, p);
    a + m * BigInt::from(k)
}

/// Shape of a reconstructed component: numerator and denominator lengths.
type Shape = (usize, usize);

/// Reconstructs `dim` rational functions in `n` from an evaluator that maps
/// a point and prime to the images of all components (or `None` at a bad
/// point). Candidates are accepted once two successive primes agree; the
/// caller is expected to validate the result exactly.
pub fn reconstruct_ratfuncs<F>(dim: usize, eval: F) -> Result<Vec<RationalFunc>>
where
    F: Fn(u64, u64) -> Option<Vec<u64>> + Sync,
{
    reconstruct_ratfuncs_with(dim, Some, |&p, x| eval(x, p))
}

/// As [`reconstruct_ratfuncs`], with per-prime setup: `prepare(p)` builds
/// a context once per prime (or `None` to skip the prime) and
/// `eval(ctx, x)` evaluates at one point.
pub fn reconstruct_ratfuncs_with<C, P, F>(dim: usize, prepare: P, eval: F) -> Result<Vec<RationalFunc>>
where
    C: Sync,
    P: Fn(u64) -> Option<C>,
    F: Fn(&C, u64) -> Option<Vec<u64>> + Sync,
{
    const SLACK: usize = 3;
    const MAX_POINTS: usize = 4096;
    let mut modulus = BigInt::one();
    let mut acc: Vec<(Vec<BigInt>, Vec<BigInt>)> = Vec::new();
    let mut shape: Option<Vec<Shape>> = None;
    let mut prev: Option<Vec<(Vec<Rational>, Vec<Rational>)>> = None;
    let mut npoints = 16usize;
    for p in primes().take(200) {
        let Some(ctx) = prepare(p) else {
            continue;
        };
        let mut xs: Vec<u64> = Vec::new();
        let mut ys: Vec<Vec<u64>> = vec![Vec::new(); dim];
        let mut next_x = 0u64;
        let images = loop {
            let want = npoints - xs.len();
            let cand: Vec<u64> = (0..want as u64 + 4)
                .map(|i| {
                    let k = next_x + i + 1;
                    mulmod(k, 0x9E37_79B9_7F4A_7C15 % p, p)
                })
                .collect();
            next_x += cand.len() as u64;
            let vals: Vec<(u64, Option<Vec<u64>>)> = cand.par_iter().map(|&x| (x, eval(&ctx, x))).collect();
            for (x, v) in vals {
                if xs.len() >= npoints {
                    break;
                }
                if let Some(v) = v {
                    xs.push(x);
                    for (c, y) in v.into_iter().enumerate() {
                        ys[c].push(y);
                    }
                }
            }
            if xs.len() < npoints {
                continue;
            }
            let nodes = Nodes::new(&xs, p);
            let rec: Option<Vec<(MPoly, MPoly)>> = (0..dim)
                .into_par_iter()
                .map(|c| reconstruct_mod(&nodes, &ys[c], SLACK))
                .collect();
            match rec {
                Some(r) => break r,
                None if npoints >= MAX_POINTS => return Err(Error::NoRationalFit { max_num: MAX_POINTS, max_den: MAX_POINTS }),
                None => npoints *= 2,
            }
        };
        let this_shape: Vec<Shape> = images.iter().map(|(a, b)| (a.len(), b.len())).collect();
        match &shape {
            None => {
                // Later primes only need enough points for the known degrees.
                npoints = this_shape.iter().map(|x| x.0 + x.1).max().unwrap_or(0) + SLACK + 2;
                shape = Some(this_shape);
                acc = images
                    .iter()
                    .map(|(a, b)| {
                        (
                            a.iter().map(|&c| BigInt::from(c)).collect(),
                            b.iter().map(|&c| BigInt::from(c)).collect(),
                        )
                    })
                    .collect();
                modulus = BigInt::from(p);
            }
            Some(s) if *s == this_shape => {
                for (slot, (a, b)) in acc.iter_mut().zip(&images) {
                    for (x, &c) in slot.0.iter_mut().zip(a) {
                        *x = crt(x, &modulus, c, p);
                    }
                    for (x, &c) in slot.1.iter_mut().zip(b) {
                        *x = crt(x, &modulus, c, p);
                    }
                }
                modulus *= BigInt::from(p);
            }
            Some(s) => {
                // Lower total degree wins: the other primes were unlucky.
                let total = |v: &Vec<Shape>| v.iter().map(|x| x.0 + x.1).sum::<usize>();
                if total(&this_shape) < total(s) {
                    shape = None;
                    prev = None;
                }
                continue;
            }
        }
        // Coefficient lifts are compared across primes before any
        // polynomial arithmetic happens.
        let cand: Option<Vec<(Vec<Rational>, Vec<Rational>)>> = acc
            .par_iter()
            .map(|(a, b)| {
                let num = a.iter().map(|c| rational_reconstruct(c, &modulus)).collect::<Option<Vec<_>>>()?;
                let den = b.iter().map(|c| rational_reconstruct(c, &modulus)).collect::<Option<Vec<_>>>()?;
                Some((num, den))
            })
            .collect();
        if let Some(c) = cand {
            if prev.as_ref() == Some(&c) {
                return c
                    .into_par_iter()
                    .map(|(num, den)| {
                        let den = Poly::new(den);
                        if den.is_zero() {
                            return Err(Error::NoRationalFit { max_num: num.len(), max_den: 0 });
                        }
                        Ok(RationalFunc::new(Poly::new(num), den))
                    })
                    .collect();
            }
            prev = Some(c);
        }
    }
    Err(Error::NoRationalFit { max_num: MAX_POINTS, max_den: MAX_POINTS })
}

/// Solves `A X = B` over the rationals by solving modulo successive primes
/// and reconstructing. The answer is verified exactly before it is returned.
pub fn solve_rational_modular(a: &[Vec<Rational>], rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = a.len();
    // Clear denominators row by row so every entry is an integer.
    let mut ia: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    let mut ib: Vec<Vec<BigInt>> = vec![Vec::with_capacity(n); rhs.len()];
    for i in 0..n {
        let mut l = BigInt::one();
        for v in a[i].iter().chain(rhs.iter().map(|b| &b[i])) {
            l = l.lcm(v.denom());
        }
        let scale = |v: &Rational| (v * Rational::from(l.clone())).to_integer();
        ia.push(a[i].iter().map(scale).collect());
        for (k, b) in rhs.iter().enumerate() {
            ib[k].push(scale(&b[i]));
        }
    }
    let mut modulus = BigInt::one();
    let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; rhs.len()];
    let mut prev: Option<Vec<Vec<Rational>>> = None;
    let mut singular = 0;
    for p in primes().take(4000) {
        let flat: Vec<u64> = ia.iter().flat_map(|r| r.iter().map(|v| int_mod(v, p))).collect();
        let Some(lu) = LuMod::factor(flat, n, p) else {
            singular += 1;
            if singular >= 3 {
                return Err(Error::SingularMatrix);
            }
            continue;
        };
        let sols: Vec<Vec<u64>> = ib
            .par_iter()
            .map(|b| lu.solve(&b.iter().map(|v| int_mod(v, p)).collect::<Vec<_>>()))
            .collect();
        for (slot, sol) in acc.iter_mut().zip(&sols) {
            for (x, &c) in slot.iter_mut().zip(sol) {
                *x = if modulus.is_one() { BigInt::from(c) } else { crt(x, &modulus, c, p) };
            }
        }
        modulus *= BigInt::from(p);
        let cand: Option<Vec<Vec<Rational>>> = acc
            .par_iter()
            .map(|v| v.iter().map(|c| rational_reconstruct(c, &modulus)).collect())
            .collect();
        let Some(cand) = cand else {
            prev = None;
            continue;
        };
        if prev.as_ref() == Some(&cand) {
            let exact = cand.par_iter().zip(rhs.par_iter()).all(|(x, b)| {
                (0..n).all(|i| {
                    let s: Rational = a[i].iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c * v).sum();
                    s == b[i]
                })
            });
            if exact {
                return Ok(cand);
            }
        }
        prev = Some(cand);
    }
    Err(Error::SingularMatrix)
}
