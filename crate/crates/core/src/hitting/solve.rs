use super::chain::RoofedOrbitChain;
use crate::error::{Error, Result};
use crate::exactnum::modular::{addmod, batch_invert, mulmod, reconstruct_ratfuncs_with, submod, LuMod, ModRatFunc};
use crate::exactnum::{binomial, rat_int, solve_linear, RatMatrix, RationalFunc, Rational};
use crate::fispec::PairPattern;
use num_traits::Zero;

/// Chains up to this many off-diagonal states are solved by fraction-free
/// elimination; larger ones by modular reconstruction.
const DIRECT_LIMIT: usize = 12;

/// Expected hitting times `Q([z, y])` of the roof from each roofed state.
#[derive(Clone, Debug)]
pub struct HittingTable {
    pub roof: usize,
    pub states: Vec<PairPattern>,
    pub diagonal: usize,
    pub q: Vec<RationalFunc>,
    /// `n` at which the symbolic values matched the oracle.
    pub validated: Vec<i64>,
}

impl HittingTable {
    pub fn get(&self, p: &PairPattern) -> Option<&RationalFunc> {
        self.states.binary_search(p).ok().map(|i| &self.q[i])
    }
}

/// Raw and derived moments of hitting times, index `[i - 1][state]`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub order: usize,
    pub roof: usize,
    pub states: Vec<PairPattern>,
    pub diagonal: usize,
    pub raw: Vec<Vec<RationalFunc>>,
    pub central: Vec<Vec<RationalFunc>>,
    pub cumulants: Vec<Vec<RationalFunc>>,
}

impl MomentTable {
    pub fn variance(&self, state: usize) -> Option<&RationalFunc> {
        self.central.get(1).map(|c| &c[state])
    }

    pub fn hitting(&self) -> HittingTable {
        HittingTable {
            roof: self.roof,
            states: self.states.clone(),
            diagonal: self.diagonal,
            q: self.raw[0].clone(),
            validated: Vec::new(),
        }
    }
}

/// Central moments `mu_k = sum_j C(k, j) m_j (-m_1)^(k - j)` from raw
/// moments `m_1..m_order`, with `m_0 = 1`.
pub fn central_from_raw<T>(raw: &[T], int: impl Fn(i64) -> T) -> Vec<T>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + std::ops::Neg<Output = T>,
{
    let m = |j: usize| if j == 0 { int(1) } else { raw[j - 1].clone() };
    let neg_mean = -raw[0].clone();
    (1..=raw.len())
        .map(|k| {
            let mut pows = vec![int(1)];
            for i in 0..k {
                pows.push(pows[i].clone() * neg_mean.clone());
            }
            (0..=k).fold(int(0), |acc, j| acc + int(small_binomial(k, j)) * m(j) * pows[k - j].clone())
        })
        .collect()
}

/// Cumulants `k_n = m_n - sum_{k<n} C(n-1, k-1) k_k m_{n-k}`.
pub fn cumulants_from_raw<T>(raw: &[T], int: impl Fn(i64) -> T) -> Vec<T>
where
    T: Clone + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let mut out: Vec<T> = Vec::with_capacity(raw.len());
    for n in 1..=raw.len() {
        let mut acc = raw[n - 1].clone();
        for k in 1..n {
            acc = acc - int(small_binomial(n - 1, k - 1)) * out[k - 1].clone() * raw[n - k - 1].clone();
        }
        out.push(acc);
    }
    out
}

pub(crate) fn small_binomial(n: usize, k: usize) -> i64 {
    binomial(n as u64, k as u64).try_into().expect("binomial fits in i64")
}

/// Moment blocks on the off-diagonal states over Q(n), indexed by order.
struct Solved {
    raw: Vec<Vec<RationalFunc>>,
    /// Central moments and cumulants, when reconstructed alongside `raw`.
    derived: Option<(Vec<Vec<RationalFunc>>, Vec<Vec<RationalFunc>>)>,
}

/// Raw moments of orders `1..=order` on the off-diagonal states over Q(n).
fn raw_moments(chain: &RoofedOrbitChain, order: usize) -> Result<Solved> {
    let idx = chain.off_diagonal();
    let dim = idx.len();
    if dim == 0 {
        return Ok(Solved {
            raw: vec![Vec::new(); order],
            derived: None,
        });
    }
    let sub: Vec<Vec<RationalFunc>> = idx.iter().map(|&s| idx.iter().map(|&t| chain.transitions[s][t].clone()).collect()).collect();
    let out = if dim <= DIRECT_LIMIT {
        let a: Vec<Vec<RationalFunc>> = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| if r == c { &RationalFunc::one() - &sub[r][c] } else { -&sub[r][c] })
                    .collect()
            })
            .collect();
        let a = RatMatrix::from_rows(a);
        let pt = RatMatrix::from_rows(sub.clone());
        let mut out: Vec<Vec<RationalFunc>> = Vec::new();
        for i in 1..=order {
            let mut rhs = vec![RationalFunc::one(); dim];
            for (j, mj) in out.iter().enumerate() {
                let c = RationalFunc::int(small_binomial(i, j + 1));
                for (r, v) in pt.mul_vec(mj).into_iter().enumerate() {
                    rhs[r] = &rhs[r] + &(&c * &v);
                }
            }
            out.push(solve_linear(&a, &rhs)?);
        }
        Solved { raw: out, derived: None }
    } else {
        modular_moments(&sub, order)?
    };
    verify_moments(chain, &out)?;
    Ok(out)
}

/// Integers modulo a word-size prime, for reusing the generic moment
/// conversions inside the modular solver.
#[derive(Clone, Copy)]
struct ModP {
    v: u64,
    p: u64,
}

impl std::ops::Add for ModP {
    type Output = ModP;
    fn add(self, o: ModP) -> ModP {
        ModP { v: addmod(self.v, o.v, self.p), p: self.p }
    }
}

impl std::ops::Sub for ModP {
    type Output = ModP;
    fn sub(self, o: ModP) -> ModP {
        ModP { v: submod(self.v, o.v, self.p), p: self.p }
    }
}

impl std::ops::Mul for ModP {
    type Output = ModP;
    fn mul(self, o: ModP) -> ModP {
        ModP { v: mulmod(self.v, o.v, self.p), p: self.p }
    }
}

impl std::ops::Neg for ModP {
    type Output = ModP;
    fn neg(self) -> ModP {
        ModP { v: submod(0, self.v, self.p), p: self.p }
    }
}

fn modular_moments(sub: &[Vec<RationalFunc>], order: usize) -> Result<Solved> {
    let dim = sub.len();
    let prepare = |p: u64| -> Option<(u64, Vec<(usize, usize, ModRatFunc)>)> {
        let mut cells = Vec::new();
        for (r, row) in sub.iter().enumerate() {
            for (c, f) in row.iter().enumerate() {
                if !f.is_zero() {
                    cells.push((r, c, ModRatFunc::new(f, p)?));
                }
            }
        }
        Some((p, cells))
    };
    let flat = reconstruct_ratfuncs_with(dim * (3 * order - 2), prepare, |(p, cells), x| {
        let p = *p;
        let parts: Vec<(u64, u64)> = cells.iter().map(|(_, _, f)| f.eval_parts(x)).collect();
        let dens: Vec<u64> = parts.iter().map(|&(_, d)| d).collect();
        if dens.contains(&0) {
            return None;
        }
        let inv = batch_invert(&dens, p);
        let mut a = vec![0u64; dim * dim];
        let mut pt: Vec<(usize, usize, u64)> = Vec::with_capacity(cells.len());
        for r in 0..dim {
            a[r * dim + r] = 1;
        }
        for ((&(r, c, _), &(num, _)), &di) in cells.iter().zip(&parts).zip(&inv) {
            let v = mulmod(num, di, p);
            pt.push((r, c, v));
            a[r * dim + c] = submod(a[r * dim + c], v, p);
        }
        let lu = LuMod::factor(a, dim, p)?;
        let apply = |v: &[u64]| -> Vec<u64> {
            let mut out = vec![0u64; dim];
            for &(r, c, a) in &pt {
                out[r] = addmod(out[r], mulmod(a, v[c], p), p);
            }
            out
        };
        let mut out: Vec<Vec<u64>> = Vec::with_capacity(order);
        for i in 1..=order {
            let mut rhs = vec![1u64; dim];
            for (j, mj) in out.iter().enumerate().map(|(j, v)| (j + 1, v)) {
                let c = small_binomial(i, j) as u64 % p;
                for (r, v) in apply(mj).into_iter().enumerate() {
                    rhs[r] = addmod(rhs[r], mulmod(c, v, p), p);
                }
            }
            out.push(lu.solve(&rhs));
        }
        // Orders 2.. of the central moments and cumulants follow per state.
        let int = |k: i64| ModP { v: k.rem_euclid(p as i64) as u64, p };
        let mut central = vec![0u64; (order - 1) * dim];
        let mut cumul = vec![0u64; (order - 1) * dim];
        for r in 0..dim {
            let m: Vec<ModP> = out.iter().map(|v| ModP { v: v[r], p }).collect();
            let (mu, ka) = (central_from_raw(&m, int), cumulants_from_raw(&m, int));
            for i in 1..order {
                central[(i - 1) * dim + r] = mu[i].v;
                cumul[(i - 1) * dim + r] = ka[i].v;
            }
        }
        let mut flat = out.concat();
        flat.extend(central);
        flat.extend(cumul);
        Some(flat)
    })?;
    let mut blocks: Vec<Vec<RationalFunc>> = flat.chunks(dim).map(|c| c.to_vec()).collect();
    let cumul = blocks.split_off(2 * order - 1);
    let central = blocks.split_off(order);
    Ok(Solved {
        raw: blocks,
        derived: Some((central, cumul)),
    })
}

/// Exact residual check of the moment systems at every snapshot `n` and at
/// a few points beyond the sweep.
fn verify_moments(chain: &RoofedOrbitChain, solved: &Solved) -> Result<()> {
    let raw = &solved.raw;
    let idx = chain.off_diagonal();
    let last = chain.snapshots.keys().copied().max().unwrap_or(chain.onset);
    let mut ns: Vec<i64> = chain.snapshots.keys().copied().collect();
    ns.extend([last + 1, last + 7, last + 31]);
    for n in ns {
        let m = chain.matrix_at(n)?;
        let vals: Vec<Vec<Rational>> = raw.iter().map(|v| v.iter().map(|f| f.eval(n)).collect::<Result<_>>()).collect::<Result<_>>()?;
        let sparse: Vec<Vec<(usize, &Rational)>> = idx
            .iter()
            .map(|&s| idx.iter().enumerate().filter(|(_, &t)| !m[s][t].is_zero()).map(|(c, &t)| (c, &m[s][t])).collect())
            .collect();
        let apply = |v: &[Rational]| -> Vec<Rational> { sparse.iter().map(|row| row.iter().map(|&(c, a)| a * &v[c]).sum()).collect() };
        for i in 1..=raw.len() {
            let mut rhs = vec![rat_int(1); idx.len()];
            for j in 1..i {
                let c = Rational::from(binomial(i as u64, j as u64));
                for (r, v) in apply(&vals[j - 1]).into_iter().enumerate() {
                    rhs[r] += &c * v;
                }
            }
            let pm = apply(&vals[i - 1]);
            for r in 0..idx.len() {
                if vals[i - 1][r] != &rhs[r] + &pm[r] {
                    return Err(Error::NoRationalFit { max_num: 0, max_den: 0 });
                }
            }
        }
        if let Some((central, cumul)) = &solved.derived {
            for r in 0..idx.len() {
                let m: Vec<Rational> = vals.iter().map(|v| v[r].clone()).collect();
                let (mu, ka) = (central_from_raw(&m, rat_int), cumulants_from_raw(&m, rat_int));
                for i in 1..raw.len() {
                    if central[i - 1][r].eval(n)? != mu[i] || cumul[i - 1][r].eval(n)? != ka[i] {
                        return Err(Error::NoRationalFit { max_num: 0, max_den: 0 });
                    }
                }
            }
        }
    }
    Ok(())
}

fn embed(chain: &RoofedOrbitChain, v: Vec<RationalFunc>) -> Vec<RationalFunc> {
    let mut out = vec![RationalFunc::zero(); chain.len()];
    for (&s, f) in chain.off_diagonal().iter().zip(v) {
        out[s] = f;
    }
    out
}

/// Solves `(I - P~) Q = 1` on the non-diagonal states.
pub fn hitting_symbolic(chain: &RoofedOrbitChain) -> Result<HittingTable> {
    Ok(moments_symbolic(chain, 1)?.hitting())
}

/// Raw moments up to `order` by the binomial recursion, plus central
/// moments and cumulants.
pub fn moments_symbolic(chain: &RoofedOrbitChain, order: usize) -> Result<MomentTable> {
    let solved = raw_moments(chain, order.max(1))?;
    let raw: Vec<Vec<RationalFunc>> = solved.raw.into_iter().map(|v| embed(chain, v)).collect();
    let k = chain.len();
    if let Some((central_hi, cumul_hi)) = solved.derived {
        // order 1: zero central moment, first cumulant is the mean
        let central = std::iter::once(vec![RationalFunc::zero(); k])
            .chain(central_hi.into_iter().map(|v| embed(chain, v)))
            .collect();
        let cumulants = std::iter::once(raw[0].clone()).chain(cumul_hi.into_iter().map(|v| embed(chain, v))).collect();
        return Ok(MomentTable {
            order: raw.len(),
            roof: chain.roof,
            states: chain.states.clone(),
            diagonal: chain.diagonal,
            raw,
            central,
            cumulants,
        });
    }
    let per_state = |s: usize| -> Vec<RationalFunc> { raw.iter().map(|v| v[s].clone()).collect() };
    let mut central = vec![vec![RationalFunc::zero(); k]; raw.len()];
    let mut cumulants = vec![vec![RationalFunc::zero(); k]; raw.len()];
    for s in chain.off_diagonal() {
        let r = per_state(s);
        for (i, v) in central_from_raw(&r, RationalFunc::int).into_iter().enumerate() {
            central[i][s] = v;
        }
        for (i, v) in cumulants_from_raw(&r, RationalFunc::int).into_iter().enumerate() {
            cumulants[i][s] = v;
        }
    }
    Ok(MomentTable {
        order: raw.len(),
        roof: chain.roof,
        states: chain.states.clone(),
        diagonal: chain.diagonal,
        raw,
        central,
        cumulants,
    })
}
