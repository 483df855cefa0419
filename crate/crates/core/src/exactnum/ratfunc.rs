use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{rat_int, Poly, Rational};
use crate::error::{Error, Result};

/// Element of Q(n), kept reduced with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunc {
    num: Poly,
    den: Poly,
}

impl RationalFunc {
    /// Builds `num / den` in lowest terms. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.degree() > 0 {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        } else {
            (num, den)
        };
        let inv = den.lead().recip();
        RationalFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn try_new(num: Poly, den: Poly) -> Option<Self> {
        (!den.is_zero()).then(|| Self::new(num, den))
    }

    pub fn zero() -> Self {
        RationalFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunc {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rat_int(c))
    }

    /// The variable `n`.
    pub fn n() -> Self {
        Self::from(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    pub fn as_constant(&self) -> Option<Rational> {
        (self.num.degree() <= 0 && self.den.degree() == 0).then(|| self.num.coeff(0))
    }

    /// `deg(den) - deg(num)`, the decay order at infinity.
    pub fn decay_order(&self) -> isize {
        self.den.degree() - self.num.degree()
    }

    pub fn eval(&self, n: i64) -> Result<Rational> {
        let d = self.den.eval_int(n);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(n));
        }
        Ok(self.num.eval_int(n) / d)
    }

    pub fn eval_rational(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn recip(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        (!rhs.is_zero()).then(|| self * &rhs.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
}

impl Default for RationalFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Poly> for RationalFunc {
    fn from(p: Poly) -> Self {
        RationalFunc {
            num: p,
            den: Poly::one(),
        }
    }
}

impl From<Rational> for RationalFunc {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for RationalFunc {
    fn from(c: i64) -> Self {
        Self::int(c)
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == 0 {
            return write!(f, "{}", self.num);
        }
        // Print with integer coefficients on both sides.
        let den = self.den.primitive();
        let num = self.num.scale(&(den.lead() / self.den.lead()));
        let clear = Rational::from_integer(num.denominator_lcm());
        let (num, den) = (num.scale(&clear), den.scale(&clear));
        let wrap = |p: &Poly| {
            if p.term_count() > 1 || (p.degree() > 0 && !p.lead().is_one()) {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&num), wrap(&den))
    }
}

impl fmt::Debug for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunc({self})")
    }
}

impl Add for &RationalFunc {
    type Output = RationalFunc;
    fn add(self, rhs: &RationalFunc) -> RationalFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunc {
    type Output = RationalFunc;
    fn sub(self, rhs: &RationalFunc) -> RationalFunc {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunc {
    type Output = RationalFunc;
    fn mul(self, rhs: &RationalFunc) -> RationalFunc {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunc::zero();
        }
        RationalFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFunc {
    type Output = RationalFunc;
    /// Panics on division by zero; use `checked_div` otherwise.
    fn div(self, rhs: &RationalFunc) -> RationalFunc {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl Neg for &RationalFunc {
    type Output = RationalFunc;
    fn neg(self) -> RationalFunc {
        RationalFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunc {
            type Output = RationalFunc;
            fn $m(self, rhs: RationalFunc) -> RationalFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunc {
    type Output = RationalFunc;
    fn neg(self) -> RationalFunc {
        -&self
    }
}

impl std::iter::Sum for RationalFunc {
    fn sum<I: Iterator<Item = RationalFunc>>(iter: I) -> Self {
        iter.fold(RationalFunc::zero(), |a, b| &a + &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let f = RationalFunc::from(Poly::linear_root(1));
        assert_eq!(f.eval(5).unwrap(), rat_int(4));
        let g = RationalFunc::new(Poly::one(), Poly::linear_root(1));
        assert_eq!(g.eval(3).unwrap(), Rational::new(1.into(), 2.into()));
        assert!(matches!(g.eval(1), Err(Error::PoleAtPoint(1))));
        let h = RationalFunc::new(Poly::linear_root(2), Poly::linear_root(1));
        assert_eq!(h.eval(2).unwrap(), rat_int(0));
    }

    #[test]
    fn reduces_to_lowest_terms() {
        let f = RationalFunc::new(
            &Poly::linear_root(1) * &Poly::linear_root(3),
            Poly::linear_root(1).scale(&rat_int(2)),
        );
        assert!(f.is_polynomial());
        assert_eq!(f.to_string(), "1/2*n - 3/2");
    }

    #[test]
    fn display_fraction() {
        let f = RationalFunc::new(Poly::linear_root(2), Poly::linear_root(1));
        assert_eq!(f.to_string(), "(n - 2)/(n - 1)");
        let g = RationalFunc::new(Poly::from_ints(&[-1]), Poly::from_ints(&[0, 0, 1]));
        assert_eq!(g.to_string(), "-1/n^2");
        let h = RationalFunc::new(Poly::one(), Poly::from_ints(&[-4, 4]));
        assert_eq!(h.to_string(), "1/(4*n - 4)");
        let k = RationalFunc::new(Poly::from_ints(&[-1, 3]), Poly::from_ints(&[0, 2]));
        assert_eq!(k.to_string(), "(3*n - 1)/(2*n)");
    }
}
