//! Exact arithmetic: rationals, polynomials and rational functions in `n`,
//! radicals, linear solving and fit-and-validate interpolation.

mod fit;
mod matrix;
pub mod modular;
mod parse;
mod poly;
mod ratfunc;
mod sqrt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub use fit::{fit_polynomial, fit_polynomial_with, fit_rational, fit_rational_stabilized, fit_with_denominator, FitOptions};
pub use modular::solve_rational_modular;
pub use matrix::{solve_linear, solve_rational, Field, Matrix, QMatrix, RatMatrix};
pub use parse::{parse_ratfunc, parse_rational};
pub use poly::{rational_sqrt, Poly};
pub use ratfunc::RationalFunc;
pub use sqrt::SqrtRational;

pub type Rational = num_rational::BigRational;

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Specialization of `f` at `n`.
pub fn rf_eval(f: &RationalFunc, n: i64) -> crate::Result<Rational> {
    f.eval(n)
}

/// Nearest double.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational equal to a finite double.
pub fn rat_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
