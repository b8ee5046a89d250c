//! Exact rational arithmetic on machine-width integers.
//!
//! Probabilities in the enumeration oracle are carried as reduced
//! `i128` fractions. Every operation goes through checked integer
//! arithmetic and reports overflow instead of silently wrapping, so an
//! oracle value is either exact or an error — never approximate.

use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::RationalOverflow("division by zero denominator"));
        }
        let sign = if den < 0 { -1 } else { 1 };
        let num = num
            .checked_mul(sign)
            .ok_or(Error::RationalOverflow("new"))?;
        let den = den
            .checked_mul(sign)
            .ok_or(Error::RationalOverflow("new"))?;
        let g = gcd(num, den);
        if g == 0 {
            return Ok(Rational { num: 0, den: 1 });
        }
        Ok(Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn checked_add(self, other: Rational) -> Result<Rational> {
        // Reduce through gcd of denominators to keep intermediates small.
        let g = gcd(self.den, other.den);
        let lhs = self
            .num
            .checked_mul(other.den / g)
            .ok_or(Error::RationalOverflow("add"))?;
        let rhs = other
            .num
            .checked_mul(self.den / g)
            .ok_or(Error::RationalOverflow("add"))?;
        let num = lhs.checked_add(rhs).ok_or(Error::RationalOverflow("add"))?;
        let den = (self.den / g)
            .checked_mul(other.den)
            .ok_or(Error::RationalOverflow("add"))?;
        Rational::new(num, den)
    }

    pub fn checked_sub(self, other: Rational) -> Result<Rational> {
        let neg = Rational {
            num: other
                .num
                .checked_neg()
                .ok_or(Error::RationalOverflow("sub"))?,
            den: other.den,
        };
        self.checked_add(neg)
    }

    pub fn checked_mul(self, other: Rational) -> Result<Rational> {
        // Cross-reduce first.
        let g1 = gcd(self.num, other.den);
        let g2 = gcd(other.num, self.den);
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .ok_or(Error::RationalOverflow("mul"))?;
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .ok_or(Error::RationalOverflow("mul"))?;
        Rational::new(num, den)
    }

    pub fn checked_div(self, other: Rational) -> Result<Rational> {
        if other.num == 0 {
            return Err(Error::RationalOverflow("division by zero"));
        }
        self.checked_mul(Rational {
            num: other.den,
            den: other.num,
        })
        .and_then(|r| Rational::new(r.num, r.den))
    }

    pub fn checked_pow(self, exp: u32) -> Result<Rational> {
        let mut acc = Rational::ONE;
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // den > 0 on both sides; compare via i128 cross products when they
        // fit, falling back to f64 only on overflow (never triggered by the
        // reduced fractions the oracle produces, but keeps Ord total).
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
