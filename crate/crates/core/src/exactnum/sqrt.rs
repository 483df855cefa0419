use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use super::{rational_sqrt, Poly, RationalFunc, Rational};

/// `factor(n) * sqrt(radicand(n))`, valid for integers `n >= threshold`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SqrtRational {
    radicand: Poly,
    factor: RationalFunc,
    threshold: i64,
}

impl SqrtRational {
    /// Builds the value and pulls square factors out of the radicand.
    /// Returns `None` if the radicand is eventually negative.
    pub fn new(radicand: Poly, factor: RationalFunc) -> Option<Self> {
        if radicand.is_zero() || factor.is_zero() {
            return Some(Self::from_rational(RationalFunc::zero()));
        }
        if radicand.lead().is_negative() {
            return None;
        }
        let threshold = nonnegative_from(&radicand);
        let mut out = SqrtRational {
            radicand,
            factor,
            threshold,
        };
        out.simplify();
        Some(out)
    }

    /// `sqrt(a) * f` for a rational function `a`, rewritten over a
    /// polynomial radicand as `sqrt(num * den) / den`.
    pub fn sqrt_of(a: &RationalFunc, factor: RationalFunc) -> Option<Self> {
        let rad = a.num() * a.den();
        let f = &factor / &RationalFunc::from(a.den().clone());
        Self::new(rad, f)
    }

    pub fn from_rational(f: RationalFunc) -> Self {
        SqrtRational {
            radicand: Poly::one(),
            factor: f,
            threshold: 0,
        }
    }

    pub fn radicand(&self) -> &Poly {
        &self.radicand
    }

    pub fn factor(&self) -> &RationalFunc {
        &self.factor
    }

    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    /// The rational value when the radicand is a perfect square.
    pub fn as_rational(&self) -> Option<&RationalFunc> {
        (self.radicand == Poly::one()).then_some(&self.factor)
    }

    /// `radicand * factor^2` as a rational function.
    pub fn squared(&self) -> RationalFunc {
        &RationalFunc::from(self.radicand.clone()) * &self.factor.pow(2)
    }

    pub fn eval_f64(&self, n: i64) -> f64 {
        let x = n as f64;
        let r = self.radicand.eval_int(n).to_f64().unwrap_or(f64::NAN);
        self.factor.eval_f64(x) * r.max(0.0).sqrt()
    }

    fn simplify(&mut self) {
        if let Some(s) = self.radicand.sqrt() {
            self.threshold = self.threshold.max(nonnegative_from(&s));
            self.factor = &self.factor * &RationalFunc::from(s);
            self.radicand = Poly::one();
            return;
        }
        // prim = (a/b) * radicand, so sqrt(radicand) = sqrt(a*b*prim) / a.
        let prim = self.radicand.primitive();
        let c = prim.lead() / self.radicand.lead();
        let ab = Rational::from_integer(c.numer() * c.denom());
        let inv_a = Rational::from_integer(c.numer().clone()).recip();
        match rational_sqrt(&ab) {
            Some(r) => {
                self.radicand = prim;
                self.factor = self.factor.scale(&(r * inv_a));
            }
            None => {
                self.radicand = prim.scale(&ab);
                self.factor = self.factor.scale(&inv_a);
            }
        }
    }
}

/// Smallest `t >= 0` with `p(m) >= 0` for every integer `m >= t`, given a
/// positive leading coefficient.
fn nonnegative_from(p: &Poly) -> i64 {
    let bound = p.root_bound();
    let mut t = (bound.ceil().to_integer()).to_i64().unwrap_or(i64::MAX / 2);
    while t > 0 && !p.eval_int(t - 1).is_negative() {
        t -= 1;
    }
    t
}

impl fmt::Display for SqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        if self.factor.is_zero() {
            return f.write_str("0");
        }
        write!(f, "({})*sqrt({})", self.factor, self.radicand)
    }
}

impl fmt::Debug for SqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SqrtRational({self})")
    }
}

impl Zero for SqrtRational {
    fn zero() -> Self {
        Self::from_rational(RationalFunc::zero())
    }
    fn is_zero(&self) -> bool {
        self.factor.is_zero()
    }
}

impl std::ops::Add for SqrtRational {
    type Output = SqrtRational;
    /// Only defined when both share a radicand.
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        assert_eq!(self.radicand, rhs.radicand, "sum of unlike radicals");
        SqrtRational {
            factor: &self.factor + &rhs.factor,
            threshold: self.threshold.max(rhs.threshold),
            radicand: self.radicand,
        }
    }
}
