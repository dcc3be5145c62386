//! Prime fields, used only for residue fields of p-adic places.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::field::{Field, Rat};

/// An element of `F_p`.
///
/// Constants created without a modulus (`zero()`, `one()`, `from_int`) stay
/// exact rationals until they meet a reduced element, which fixes `p`.
#[derive(Clone)]
pub enum Fp {
    Int(Rat),
    Mod { v: u64, p: u64 },
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let m = p as u128;
    let mut base = (b % p) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    b = acc as u64;
    b
}

fn reduce_rat(r: &Rat, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let n = r.numer().mod_floor(&pb).to_u64().unwrap();
    let d = r.denom().mod_floor(&pb).to_u64().unwrap();
    assert!(d != 0, "denominator divisible by {p}");
    ((n as u128 * inv_mod(d, p) as u128) % p as u128) as u64
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Fp {
        Fp::Mod { v: v.rem_euclid(p as i64) as u64, p }
    }

    pub fn from_rat_mod(r: &Rat, p: u64) -> Fp {
        Fp::Mod { v: reduce_rat(r, p), p }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Fp::Int(_) => None,
            Fp::Mod { p, .. } => Some(*p),
        }
    }

    /// Representative in `[0, p)`, when the modulus is known.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Fp::Int(_) => None,
            Fp::Mod { v, .. } => Some(*v),
        }
    }

    fn resolve(&self, p: u64) -> u64 {
        match self {
            Fp::Int(r) => reduce_rat(r, p),
            Fp::Mod { v, .. } => *v,
        }
    }

    fn common(&self, other: &Fp) -> Option<u64> {
        match (self.modulus(), other.modulus()) {
            (Some(p), Some(q)) => {
                assert_eq!(p, q, "mixed prime fields");
                Some(p)
            }
            (Some(p), None) | (None, Some(p)) => Some(p),
            (None, None) => None,
        }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fp::Int(r) => write!(f, "{r}"),
            Fp::Mod { v, p } => write!(f, "{v} mod {p}"),
        }
    }
}

impl PartialEq for Fp {
    fn eq(&self, other: &Fp) -> bool {
        match self.common(other) {
            Some(p) => self.resolve(p) == other.resolve(p),
            None => match (self, other) {
                (Fp::Int(a), Fp::Int(b)) => a == b,
                _ => unreachable!(),
            },
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt, $modop:expr) => {
        impl $tr for Fp {
            type Output = Fp;
            fn $m(self, rhs: Fp) -> Fp {
                match self.common(&rhs) {
                    None => match (self, rhs) {
                        (Fp::Int(a), Fp::Int(b)) => Fp::Int(a $op b),
                        _ => unreachable!(),
                    },
                    Some(p) => {
                        let a = self.resolve(p) as u128;
                        let b = rhs.resolve(p) as u128;
                        let f: fn(u128, u128, u128) -> u128 = $modop;
                        Fp::Mod { v: f(a, b, p as u128) as u64, p }
                    }
                }
            }
        }
    };
}

binop!(Add, add, +, |a, b, p| (a + b) % p);
binop!(Sub, sub, -, |a, b, p| (a + p - b) % p);
binop!(Mul, mul, *, |a, b, p| (a * b) % p);

impl Div for Fp {
    type Output = Fp;
    fn div(self, rhs: Fp) -> Fp {
        let inv = rhs.try_inv().expect("division by zero in F_p");
        self * inv
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        match self {
            Fp::Int(r) => Fp::Int(-r),
            Fp::Mod { v, p } => Fp::Mod { v: (p - v) % p, p },
        }
    }
}

impl Zero for Fp {
    fn zero() -> Fp {
        Fp::Int(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        match self {
            Fp::Int(r) => r.is_zero(),
            Fp::Mod { v, .. } => *v == 0,
        }
    }
}

impl One for Fp {
    fn one() -> Fp {
        Fp::Int(Rat::one())
    }
}

impl Field for Fp {
    fn try_inv(&self) -> Option<Fp> {
        match self {
            Fp::Int(r) => r.try_inv().map(Fp::Int),
            Fp::Mod { v, p } => (*v != 0).then(|| Fp::Mod { v: inv_mod(*v, *p), p: *p }),
        }
    }

    fn from_int(n: i64) -> Fp {
        Fp::Int(Rat::from_integer(BigInt::from(n)))
    }

    fn from_rat(r: &Rat) -> Fp {
        Fp::Int(r.clone())
    }

    fn characteristic(&self) -> u64 {
        self.modulus().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::rat;

    #[test]
    fn arithmetic_mod_seven() {
        let a = Fp::new(3, 7);
        let b = Fp::new(5, 7);
        assert_eq!(a.clone() + b.clone(), Fp::new(1, 7));
        assert_eq!(a.clone() * b.clone(), Fp::new(1, 7));
        assert_eq!(a.clone() / b.clone(), Fp::new(2, 7));
        assert_eq!(-a.clone(), Fp::new(4, 7));
        assert_eq!(a.clone() - b, Fp::new(5, 7));
    }

    #[test]
    fn unresolved_constants_adopt_modulus() {
        let half = Fp::from_rat(&rat(1, 2));
        let x = Fp::new(4, 7);
        assert_eq!(half * x, Fp::new(2, 7));
        assert_eq!(Fp::from_int(9), Fp::new(2, 7));
        assert!((Fp::from_int(7) - Fp::new(0, 7)).is_zero());
    }
}
