use num_traits::Zero;

use super::{matrix::solve_field, rat_int, Poly, QMatrix, RationalFunc, Rational};
use crate::error::{Error, Result};

/// Knobs shared by the fitting routines.
#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    /// Points that must agree beyond those used to determine the fit.
    pub holdout: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { holdout: 3 }
    }
}

/// Newton interpolation through the given points.
fn interpolate(points: &[(i64, Rational)]) -> Poly {
    let n = points.len();
    let xs: Vec<Rational> = points.iter().map(|p| rat_int(p.0)).collect();
    let mut dd: Vec<Rational> = points.iter().map(|p| p.1.clone()).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = Poly::zero();
    for i in (0..n).rev() {
        p = &(&p * &Poly::new(vec![-xs[i].clone(), Rational::from_integer(1.into())])) + &Poly::constant(dd[i].clone());
    }
    p
}

fn check_distinct(points: &[(i64, Rational)]) -> Result<()> {
    let mut xs: Vec<i64> = points.iter().map(|p| p.0).collect();
    xs.sort_unstable();
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSpec("fit points must have distinct n".into()));
    }
    Ok(())
}

/// Fits the lowest-degree polynomial of degree at most `max_degree` that
/// reproduces every point, with at least three points held out.
pub fn fit_polynomial(points: &[(i64, Rational)], max_degree: usize) -> Result<Poly> {
    fit_polynomial_with(points, max_degree, FitOptions::default())
}

pub fn fit_polynomial_with(points: &[(i64, Rational)], max_degree: usize, opts: FitOptions) -> Result<Poly> {
    let needed = max_degree + 1 + opts.holdout;
    if points.len() < needed {
        return Err(Error::InsufficientPoints { needed, got: points.len() });
    }
    check_distinct(points)?;
    for d in 0..=max_degree {
        let p = interpolate(&points[..d + 1]);
        if points[d + 1..].iter().all(|(n, v)| p.eval_int(*n) == *v) {
            return Ok(p);
        }
    }
    Err(Error::NoPolynomialFit { max_degree })
}

/// Fits `v(n) = p(n) / den(n)` where the denominator is known in advance.
pub fn fit_with_denominator(points: &[(i64, Rational)], den: &Poly, max_degree: usize) -> Result<RationalFunc> {
    let scaled: Vec<(i64, Rational)> = points.iter().map(|(n, v)| (*n, v * den.eval_int(*n))).collect();
    let p = fit_polynomial(&scaled, max_degree)?;
    Ok(RationalFunc::new(p, den.clone()))
}

/// Solves for `num` of degree `a` and monic `den` of degree `b` through
/// the first `a + b + 1` points.
fn rational_through(points: &[(i64, Rational)], a: usize, b: usize) -> Option<RationalFunc> {
    let m = a + b + 1;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (n, v) in &points[..m] {
        let x = rat_int(*n);
        let mut row = Vec::with_capacity(m);
        let mut pw = Rational::from_integer(1.into());
        for _ in 0..=a {
            row.push(pw.clone());
            pw *= &x;
        }
        let mut pw = Rational::from_integer(1.into());
        for _ in 0..b {
            row.push(-(v * &pw));
            pw *= &x;
        }
        // x^b coefficient of den is 1.
        rhs.push(v * &pw);
        rows.push(row);
    }
    let sol = solve_field(&QMatrix::from_rows(rows), &[rhs]).ok()?.pop()?;
    let num = Poly::new(sol[..=a].to_vec());
    let mut dc = sol[a + 1..].to_vec();
    dc.push(Rational::from_integer(1.into()));
    let den = Poly::new(dc);
    if points[..m].iter().any(|(n, _)| den.eval_int(*n).is_zero()) {
        return None;
    }
    Some(RationalFunc::new(num, den))
}

/// Rational interpolation with degree escalation from `(0, 0)`. Returns the
/// first fit of minimal total degree that reproduces every point; ties go
/// to the smaller denominator degree.
pub fn fit_rational(points: &[(i64, Rational)], max_num: usize, max_den: usize) -> Result<RationalFunc> {
    let holdout = FitOptions::default().holdout;
    let needed = max_num + max_den + 2 + holdout;
    if points.len() < needed {
        return Err(Error::InsufficientPoints { needed, got: points.len() });
    }
    check_distinct(points)?;
    for total in 0..=max_num + max_den {
        for b in 0..=total.min(max_den) {
            let a = total - b;
            if a > max_num {
                continue;
            }
            let Some(f) = rational_through(points, a, b) else {
                continue;
            };
            if points.iter().all(|(n, v)| f.eval(*n).map(|x| x == *v).unwrap_or(false)) {
                return Ok(f);
            }
        }
    }
    Err(Error::NoRationalFit { max_num, max_den })
}

/// Retries `fit_rational` after dropping the smallest `n` until a fit
/// validates. Returns the fit and the first `n` it covers.
pub fn fit_rational_stabilized(points: &[(i64, Rational)], max_num: usize, max_den: usize) -> Result<(RationalFunc, i64)> {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let needed = max_num + max_den + 5;
    let mut last = Err(Error::NoRationalFit { max_num, max_den });
    while pts.len() >= needed {
        match fit_rational(&pts, max_num, max_den) {
            Ok(f) => return Ok((f, pts[0].0)),
            Err(e) => last = Err(e),
        }
        pts.remove(0);
    }
    if points.len() < needed {
        return Err(Error::InsufficientPoints { needed, got: points.len() });
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn sample(f: &RationalFunc, ns: std::ops::RangeInclusive<i64>) -> Vec<(i64, Rational)> {
        ns.map(|n| (n, f.eval(n).unwrap())).collect()
    }

    #[test]
    fn identity_polynomial() {
        let pts: Vec<_> = (3..=7).map(|n| (n, rat_int(n))).collect();
        assert_eq!(fit_polynomial(&pts, 1).unwrap(), Poly::x());
        let pts: Vec<_> = (3..=9).map(|n| (n, rat_int(5))).collect();
        assert_eq!(fit_polynomial(&pts, 2).unwrap(), Poly::from_ints(&[5]));
    }

    #[test]
    fn requires_holdout() {
        let pts: Vec<_> = (3..=7).map(|n| (n, rat_int(n))).collect();
        assert!(matches!(fit_polynomial(&pts, 2), Err(Error::InsufficientPoints { .. })));
    }

    #[test]
    fn complete_graph_pair_count() {
        // #{z : z != x, z != y} counted directly on [n]
        let pts: Vec<_> = (4..=10)
            .map(|n| {
                let c = (0..n).filter(|&z| z != 0 && z != 1).count() as i64;
                (n, rat_int(c))
            })
            .collect();
        assert_eq!(fit_polynomial(&pts, 3).unwrap(), Poly::linear_root(2));
    }

    #[test]
    fn polynomial_rejects_non_polynomial() {
        let pts: Vec<_> = (1..=10).map(|n| (n, rat(1, n))).collect();
        assert!(matches!(fit_polynomial(&pts, 4), Err(Error::NoPolynomialFit { .. })));
    }

    #[test]
    fn rational_examples() {
        let f = RationalFunc::new(Poly::one(), Poly::linear_root(1));
        assert_eq!(fit_rational(&sample(&f, 3..=12), 2, 2).unwrap(), f);
        let g = RationalFunc::from(Poly::from_ints(&[-1, 2]));
        assert_eq!(fit_rational(&sample(&g, 2..=10), 2, 2).unwrap(), g);
        let h = RationalFunc::new(Poly::from_ints(&[1, 0, 1]), Poly::from_ints(&[2, 1]));
        assert_eq!(fit_rational(&sample(&h, 1..=15), 3, 3).unwrap(), h);
    }

    #[test]
    fn stabilized_drops_transients() {
        let f = RationalFunc::new(Poly::one(), Poly::linear_root(1));
        let mut pts = sample(&f, 3..=14);
        pts[0].1 = rat_int(7);
        pts[1].1 = rat_int(9);
        let (g, onset) = fit_rational_stabilized(&pts, 1, 1).unwrap();
        assert_eq!(g, f);
        assert_eq!(onset, 5);
    }
}
