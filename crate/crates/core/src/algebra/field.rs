//! The scalar abstraction shared by every kernel.
//!
//! All algorithms are written against [`Field`]; concrete instances are the
//! rationals, rational functions in one variable, prime fields and simple
//! algebraic extensions of those.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// An exact field. Division by zero panics; use [`Field::try_inv`] when the
/// divisor is not known to be nonzero.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn try_inv(&self) -> Option<Self>;

    fn from_int(n: i64) -> Self;

    /// Image of a rational number. Panics in characteristic `p` if `p`
    /// divides the denominator.
    fn from_rat(r: &Rat) -> Self;

    /// Scalar bringing a projective coefficient vector to canonical form, or
    /// `None` for the zero vector. The default makes the first nonzero entry 1.
    fn canonical_scale(coeffs: &[Self]) -> Option<Self> {
        coeffs.iter().find(|c| !c.is_zero()).and_then(|c| c.try_inv())
    }

    /// Characteristic, when this value determines it (0 for char-0 fields).
    fn characteristic(&self) -> u64 {
        0
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Field for Rat {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    /// Clears denominators and integer content; first nonzero entry positive.
    fn canonical_scale(coeffs: &[Self]) -> Option<Self> {
        let first = coeffs.iter().find(|c| !c.is_zero())?;
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            den_lcm = den_lcm.lcm(c.denom());
        }
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let mut s = Rat::new(den_lcm, num_gcd);
        if first.is_negative() {
            s = -s;
        }
        Some(s)
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Formats a rational as `"p/q"`, or `"p"` for integers.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_scale_clears_content() {
        let v = vec![rat(0, 1), rat(-2, 3), rat(4, 5)];
        let s = Rat::canonical_scale(&v).unwrap();
        let scaled: Vec<Rat> = v.iter().map(|c| c * &s).collect();
        assert_eq!(scaled, vec![int(0), int(5), int(-6)]);
    }

    #[test]
    fn rat_strings_round_trip() {
        for s in ["0", "1", "-7/3", "12/5"] {
            assert_eq!(rat_to_string(&parse_rat(s).unwrap()), s);
        }
        assert_eq!(rat_to_string(&parse_rat("4/6").unwrap()), "2/3");
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }
}
