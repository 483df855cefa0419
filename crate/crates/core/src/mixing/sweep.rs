use rayon::prelude::*;
use serde::Serialize;

use super::tv::{tv_profile_with, Epsilon, MixingProfile};
use crate::error::{Error, Result};
use crate::exactnum::{rat_int, rat_to_f64, Rational};
use crate::fispec::FiGraphSpec;
use crate::walks::{rho, stationary, RhoProfile, TransitionRelation};

/// Horizon for a single profile.
pub const DEFAULT_T_MAX: usize = 100_000;

/// Growth shape of `t_mix` in `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Constant,
    Linear,
    Quadratic,
    Cubic,
}

impl Trend {
    pub fn degree(self) -> u32 {
        self as u32
    }

    fn from_degree(k: usize) -> Self {
        [Trend::Constant, Trend::Linear, Trend::Quadratic, Trend::Cubic][k]
    }
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Trend::Constant => "constant",
            Trend::Linear => "linear",
            Trend::Quadratic => "quadratic",
            Trend::Cubic => "cubic",
        };
        f.write_str(s)
    }
}

/// Least-squares comparison of `c * n^k`, `k = 0..=3`.
#[derive(Clone, Debug, Serialize)]
pub struct TrendFit {
    pub trend: Trend,
    /// Fitted `c` for the winning shape.
    pub coefficient: f64,
    /// Relative residual `||y - c n^k|| / ||y||` per shape.
    pub residuals: [f64; 4],
    /// The winner's residual is under half of the runner-up's.
    pub unambiguous: bool,
    /// The `n` values the fit used.
    pub window: Vec<i64>,
}

/// Classifies on the largest half of the points to skip transients.
pub fn classify_trend(points: &[(i64, f64)]) -> Result<TrendFit> {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let half = &pts[pts.len() / 2..];
    if half.len() < 2 {
        return Err(Error::InsufficientPoints { needed: 3, got: points.len() });
    }
    let norm = half.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
    let mut residuals = [0f64; 4];
    let mut coeffs = [0f64; 4];
    for (k, (res, coef)) in residuals.iter_mut().zip(coeffs.iter_mut()).enumerate() {
        let basis: Vec<f64> = half.iter().map(|p| (p.0 as f64).powi(k as i32)).collect();
        let c = half.iter().zip(&basis).map(|(p, b)| p.1 * b).sum::<f64>() / basis.iter().map(|b| b * b).sum::<f64>();
        let r = half.iter().zip(&basis).map(|(p, b)| (p.1 - c * b).powi(2)).sum::<f64>().sqrt();
        *coef = c;
        *res = if norm > 0.0 { r / norm } else { 0.0 };
    }
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| residuals[a].total_cmp(&residuals[b]).then(a.cmp(&b)));
    let (best, second) = (order[0], order[1]);
    Ok(TrendFit {
        trend: Trend::from_degree(best),
        coefficient: coeffs[best],
        residuals,
        unambiguous: residuals[best] < 0.5 * residuals[second],
        window: half.iter().map(|p| p.0).collect(),
    })
}

/// `t_mix(eps)` over a range of `n`, with a trend fit.
#[derive(Clone, Debug, Serialize)]
pub struct MixingSweep {
    pub family: String,
    pub walk: String,
    pub eps: String,
    pub points: Vec<(i64, usize)>,
    pub trend: TrendFit,
}

/// Exact profiles at every `n` in `ns`, down to the smallest threshold.
pub fn profiles(spec: &FiGraphSpec, p: &TransitionRelation, ns: &[i64], eps: &[Epsilon]) -> Result<Vec<MixingProfile>> {
    let pi = stationary(spec, p)?;
    ns.par_iter().map(|&n| tv_profile_with(spec, p, &pi, n, DEFAULT_T_MAX, eps)).collect()
}

fn t_mix_or_err(prof: &MixingProfile, eps: &Epsilon) -> Result<usize> {
    prof.t_mix(eps).ok_or_else(|| {
        Error::InvalidTransition(format!("d(t) stayed above {} within {} steps at n = {}", eps.label, DEFAULT_T_MAX, prof.n))
    })
}

pub fn mixing_sweep(spec: &FiGraphSpec, p: &TransitionRelation, ns: &[i64], eps: &Epsilon) -> Result<MixingSweep> {
    let profs = profiles(spec, p, ns, std::slice::from_ref(eps))?;
    sweep_from_profiles(spec, p, &profs, eps)
}

/// Sweep summary from profiles already computed down to `eps`.
pub fn sweep_from_profiles(spec: &FiGraphSpec, p: &TransitionRelation, profiles: &[MixingProfile], eps: &Epsilon) -> Result<MixingSweep> {
    let points: Vec<(i64, usize)> = profiles.iter().map(|pr| Ok((pr.n, t_mix_or_err(pr, eps)?))).collect::<Result<_>>()?;
    let trend = classify_trend(&points.iter().map(|&(n, t)| (n, t as f64)).collect::<Vec<_>>())?;
    Ok(MixingSweep {
        family: spec.name.clone(),
        walk: p.label(),
        eps: eps.label.clone(),
        points,
        trend,
    })
}

/// Check of `t_mix(1/4)(n) <= C / rho(n)` with the least feasible `C`.
#[derive(Clone, Debug, Serialize)]
pub struct RhoBound {
    pub family: String,
    pub walk: String,
    /// `(n, t_mix(1/4), rho(n))`
    #[serde(serialize_with = "ser_rows")]
    pub rows: Vec<(i64, usize, Rational)>,
    /// `max_n t_mix(n) * rho(n)`
    #[serde(serialize_with = "ser_rational")]
    pub c_min: Rational,
    /// The same maximum over the larger half of the sweep, as a hint of
    /// whether `C` has settled.
    #[serde(serialize_with = "ser_rational")]
    pub c_upper_half: Rational,
    pub holds: bool,
    #[serde(skip)]
    pub rho: RhoProfile,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_rows<S: serde::Serializer>(rows: &[(i64, usize, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rows.iter().map(|(n, t, r)| (n, t, r.to_string())))
}

pub fn rho_bound_check(spec: &FiGraphSpec, p: &TransitionRelation, ns: &[i64]) -> Result<RhoBound> {
    let rho = rho(spec, p, ns)?;
    let eps = Epsilon::parse("1/4")?;
    let sweep = mixing_sweep(spec, p, ns, &eps)?;
    rho_bound_from(spec, p, rho, &sweep)
}

/// As [`rho_bound_check`], reusing a `t_mix(1/4)` sweep over the same `n`.
pub fn rho_bound_from(spec: &FiGraphSpec, p: &TransitionRelation, rho: RhoProfile, sweep: &MixingSweep) -> Result<RhoBound> {
    let rows: Vec<(i64, usize, Rational)> = sweep
        .points
        .iter()
        .map(|&(n, t)| {
            let r = rho
                .values
                .iter()
                .find(|v| v.0 == n)
                .map(|v| v.1.clone())
                .ok_or_else(|| Error::InvalidSpec(format!("rho not sampled at n = {n}")))?;
            Ok((n, t, r))
        })
        .collect::<Result<_>>()?;
    let product = |(_, t, r): &(i64, usize, Rational)| rat_int(*t as i64) * r;
    let c_min = rows.iter().map(product).max().unwrap_or_else(|| rat_int(0));
    let c_upper_half = rows[rows.len() / 2..].iter().map(product).max().unwrap_or_else(|| rat_int(0));
    let holds = rows.iter().all(|(_, t, r)| r > &rat_int(0) && rat_int(*t as i64) * r <= c_min);
    Ok(RhoBound {
        family: spec.name.clone(),
        walk: p.label(),
        rows,
        c_min,
        c_upper_half,
        holds,
        rho,
    })
}

/// Direction of the cutoff window across a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowTrend {
    Narrowing,
    Flat,
    Widening,
}

/// Widths `t_mix(eps) - t_mix(1 - eps)` per `n`. Diagnostics only.
#[derive(Clone, Debug, Serialize)]
pub struct CutoffDiagnostic {
    pub family: String,
    pub walk: String,
    pub eps: String,
    /// `(n, t_mix(eps), t_mix(1 - eps), width)`
    pub rows: Vec<(i64, usize, usize, usize)>,
    /// Least-squares slope of width against `n`.
    pub slope: f64,
    pub trend: WindowTrend,
}

pub fn cutoff_diagnostic(spec: &FiGraphSpec, p: &TransitionRelation, ns: &[i64], eps: &Epsilon) -> Result<CutoffDiagnostic> {
    let (lo, hi) = if eps.value < Rational::new(1.into(), 2.into()) {
        (eps.clone(), eps.complement())
    } else {
        (eps.complement(), eps.clone())
    };
    let profs = profiles(spec, p, ns, &[lo.clone(), hi.clone()])?;
    cutoff_from_profiles(spec, p, &profs, &lo)
}

/// As [`cutoff_diagnostic`] from profiles computed down to `eps < 1/2`.
pub fn cutoff_from_profiles(spec: &FiGraphSpec, p: &TransitionRelation, profiles: &[MixingProfile], eps: &Epsilon) -> Result<CutoffDiagnostic> {
    let hi = eps.complement();
    let rows: Vec<(i64, usize, usize, usize)> = profiles
        .iter()
        .map(|pr| {
            let (a, b) = (t_mix_or_err(pr, eps)?, t_mix_or_err(pr, &hi)?);
            Ok((pr.n, a, b, a.saturating_sub(b)))
        })
        .collect::<Result<_>>()?;
    let k = rows.len() as f64;
    let mean_n = rows.iter().map(|r| r.0 as f64).sum::<f64>() / k;
    let mean_w = rows.iter().map(|r| r.3 as f64).sum::<f64>() / k;
    let sxx: f64 = rows.iter().map(|r| (r.0 as f64 - mean_n).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| (r.0 as f64 - mean_n) * (r.3 as f64 - mean_w)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    // Half a step of total change across the window counts as movement.
    let span = rows.last().map_or(0, |r| r.0) - rows.first().map_or(0, |r| r.0);
    let change = slope * span as f64;
    let trend = if change > 0.5 {
        WindowTrend::Widening
    } else if change < -0.5 {
        WindowTrend::Narrowing
    } else {
        WindowTrend::Flat
    };
    Ok(CutoffDiagnostic {
        family: spec.name.clone(),
        walk: p.label(),
        eps: eps.label.clone(),
        rows,
        slope,
        trend,
    })
}

/// `d(1)` as a double, for quick reporting.
pub fn one_step_distance(profile: &MixingProfile) -> Option<f64> {
    profile.d.get(1).map(rat_to_f64)
}
