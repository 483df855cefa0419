//! Parser for rational expressions in one variable `n`.
//!
//! Accepts integers, decimals, `n`, `+ - * / ^` and parentheses, plus
//! implicit multiplication such as `2n` or `3(n - 1)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Poly, RationalFunc, Rational};
use crate::error::{Error, Result};

pub fn parse_ratfunc(src: &str) -> Result<RationalFunc> {
    let mut p = Parser {
        s: src.as_bytes(),
        pos: 0,
        src,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err());
    }
    Ok(v)
}

/// Parses an exact rational such as `3`, `-2/7` or `0.125`.
pub fn parse_rational(src: &str) -> Result<Rational> {
    parse_ratfunc(src)?
        .as_constant()
        .ok_or_else(|| Error::Parse(src.to_string()))
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self) -> Error {
        Error::Parse(self.src.to_string())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunc> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.checked_div(&d).ok_or_else(|| self.err())?;
                }
                Some(b'n') | Some(b'(') => {
                    acc = &acc * &self.power()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunc> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunc> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = self.src[start..self.pos].parse().map_err(|_| self.err())?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunc> {
        match self.peek() {
            Some(b'n') => {
                self.pos += 1;
                Ok(RationalFunc::n())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            _ => Err(self.err()),
        }
    }

    fn number(&mut self) -> Result<RationalFunc> {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.') {
            self.pos += 1;
        }
        let text = &self.src[start..self.pos];
        let (int_part, frac_part) = match text.split_once('.') {
            Some((a, b)) => (a, b),
            None => (text, ""),
        };
        if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
            return Err(self.err());
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| self.err())?
        };
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let r = if den.is_one() {
            Rational::from_integer(num)
        } else {
            Rational::new(num, den)
        };
        Ok(RationalFunc::from(Poly::constant(r)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(s: &str) {
        let f = parse_ratfunc(s).unwrap();
        assert_eq!(parse_ratfunc(&f.to_string()).unwrap(), f, "{s} -> {f}");
    }

    #[test]
    fn parses_examples() {
        let f = parse_ratfunc("1/(n-1)").unwrap();
        assert_eq!(f.to_string(), "1/(n - 1)");
        let g = parse_ratfunc("(n^2+1)/(n+2)").unwrap();
        assert_eq!(g.eval(2).unwrap(), Rational::new(5.into(), 4.into()));
        assert_eq!(parse_ratfunc("2n - 1").unwrap().to_string(), "2*n - 1");
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1.into(), 4.into()));
        assert!(parse_ratfunc("1/(n-n)").is_err());
        assert!(parse_ratfunc("n +").is_err());
    }

    #[test]
    fn display_roundtrips() {
        for s in ["-1/n^2", "(4n-7)/(4(n-1))", "1/2*n - 3/2", "n(n-1)/2", "7", "-3/(4n-4)"] {
            roundtrip(s);
        }
    }
}
