//! Discrete valuations on `Q` and `Q(c)`, with residue maps and lifts.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{rat_to_string, Field, Rat};
use super::fp::Fp;
use super::poly::UniPoly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub enum Place {
    /// The `p`-adic valuation on `Q`.
    PAdic(u64),
    /// The place of `Q(c)` given by a monic irreducible polynomial in `c`.
    Poly(UniPoly<Rat>),
    /// The degree valuation of `Q(c)`, uniformizer `1/c`.
    Infinity,
}

impl Place {
    /// The place `c = r`.
    pub fn at(r: Rat) -> Place {
        Place::Poly(UniPoly::linear_root(r))
    }

    /// The root `r` of a degree-one place `c - r`.
    pub fn linear_root(&self) -> Option<Rat> {
        match self {
            Place::Poly(h) if h.degree() == Some(1) => Some(-h.coeff(0) / h.coeff(1)),
            _ => None,
        }
    }

    pub fn is_function_field(&self) -> bool {
        !matches!(self, Place::PAdic(_))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::PAdic(p) => write!(f, "p:{p}"),
            Place::Infinity => write!(f, "inf"),
            Place::Poly(h) => write!(f, "poly:{}", poly_string(h, "c")),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Human-readable polynomial, highest degree first, e.g. `c^2-2`.
pub fn poly_string(h: &UniPoly<Rat>, var: &str) -> String {
    if h.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, c) in h.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push(if neg { '-' } else { '+' });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if i == 0 || !abs.is_one() {
            s.push_str(&rat_to_string(&abs));
            if i > 0 {
                s.push('*');
            }
        }
        s.push_str(&mono);
    }
    s
}

fn padic_int(n: &BigInt, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        k += 1;
    }
    k
}

/// Fields carrying the valuations of a given family of places.
pub trait LocalField: Field {
    type Residue: Field;

    /// `None` encodes the valuation of zero.
    fn valuation(&self, place: &Place) -> Result<Option<i64>>;

    fn uniformizer(place: &Place) -> Result<Self>;

    /// Reduction of an element of valuation `>= 0`.
    fn residue(&self, place: &Place) -> Result<Self::Residue>;

    /// A fixed lift of a residue class to the valuation ring.
    fn lift(r: &Self::Residue, place: &Place) -> Result<Self>;

    /// Image under a totally ramified base change of degree `e`, together
    /// with the place lying over `place`.
    fn ramify(&self, place: &Place, e: u32) -> Result<Self>;

    fn ramified_place(place: &Place, e: u32) -> Result<Place>;
}

impl LocalField for Rat {
    type Residue = Fp;

    fn valuation(&self, place: &Place) -> Result<Option<i64>> {
        let Place::PAdic(p) = place else {
            return Err(Error::PlaceMismatch(format!("{place} is not a place of Q")));
        };
        if self.is_zero() {
            return Ok(None);
        }
        Ok(Some(padic_int(self.numer(), *p) - padic_int(self.denom(), *p)))
    }

    fn uniformizer(place: &Place) -> Result<Rat> {
        match place {
            Place::PAdic(p) => Ok(Rat::from_integer(BigInt::from(*p))),
            _ => Err(Error::PlaceMismatch(format!("{place} is not a place of Q"))),
        }
    }

    fn residue(&self, place: &Place) -> Result<Fp> {
        let Place::PAdic(p) = place else {
            return Err(Error::PlaceMismatch(format!("{place} is not a place of Q")));
        };
        match self.valuation(place)? {
            Some(v) if v < 0 => Err(Error::NotNormalized),
            _ => Ok(Fp::from_rat_mod(self, *p)),
        }
    }

    fn lift(r: &Fp, place: &Place) -> Result<Rat> {
        let Place::PAdic(p) = place else {
            return Err(Error::PlaceMismatch(format!("{place} is not a place of Q")));
        };
        let v = (r.clone() + Fp::new(0, *p)).residue().unwrap();
        Ok(Rat::from_integer(BigInt::from(v)))
    }

    fn ramify(&self, place: &Place, e: u32) -> Result<Rat> {
        Err(Error::RamificationNeeded { step: format!("degree {e} over {place}") })
    }

    fn ramified_place(place: &Place, e: u32) -> Result<Place> {
        Err(Error::RamificationNeeded { step: format!("degree {e} over {place}") })
    }
}

/// The substitution realizing base change of degree `e` at a place of
/// `Q(c)`: `c -> c^e` at infinity, `c -> r + c^e` at `c = r`.
pub fn ramification_substitution(place: &Place, e: u32) -> Result<RatFunc> {
    let ce = RatFunc::from_poly(UniPoly::monomial(Rat::one(), e as usize));
    match place {
        Place::Infinity => Ok(ce),
        Place::Poly(_) => match place.linear_root() {
            Some(r) => Ok(RatFunc::constant(r) + ce),
            None => Err(Error::Unsupported(format!("ramified base change at {place}"))),
        },
        Place::PAdic(_) => Err(Error::RamificationNeeded { step: format!("degree {e} over {place}") }),
    }
}

impl LocalField for RatFunc {
    type Residue = Rat;

    fn valuation(&self, place: &Place) -> Result<Option<i64>> {
        if self.is_zero() {
            return Ok(None);
        }
        match place {
            Place::PAdic(_) => Err(Error::PlaceMismatch(format!("{place} is not a place of Q(c)"))),
            Place::Infinity => Ok(Some(
                self.den().degree().unwrap() as i64 - self.num().degree().unwrap() as i64,
            )),
            Place::Poly(h) => {
                let a = self.num().multiplicity(h).unwrap_or(0) as i64;
                let b = self.den().multiplicity(h).unwrap_or(0) as i64;
                Ok(Some(a - b))
            }
        }
    }

    fn uniformizer(place: &Place) -> Result<RatFunc> {
        match place {
            Place::PAdic(_) => Err(Error::PlaceMismatch(format!("{place} is not a place of Q(c)"))),
            Place::Infinity => Ok(RatFunc::one() / RatFunc::var()),
            Place::Poly(h) => Ok(RatFunc::from_poly(h.clone())),
        }
    }

    fn residue(&self, place: &Place) -> Result<Rat> {
        let v = self.valuation(place)?;
        match v {
            None => return Ok(Rat::zero()),
            Some(v) if v < 0 => return Err(Error::NotNormalized),
            Some(v) if v > 0 => return Ok(Rat::zero()),
            _ => {}
        }
        match place {
            Place::Infinity => Ok(self.num().lead() / self.den().lead()),
            Place::Poly(_) => {
                let r = place.linear_root().ok_or_else(|| {
                    Error::Unsupported(format!("residue field of {place} is a proper extension of Q"))
                })?;
                Ok(self.eval(&r).expect("unit has no pole"))
            }
            Place::PAdic(_) => unreachable!(),
        }
    }

    fn lift(r: &Rat, place: &Place) -> Result<RatFunc> {
        match place {
            Place::PAdic(_) => Err(Error::PlaceMismatch(format!("{place} is not a place of Q(c)"))),
            _ => Ok(RatFunc::constant(r.clone())),
        }
    }

    fn ramify(&self, place: &Place, e: u32) -> Result<RatFunc> {
        Ok(self.subs(&ramification_substitution(place, e)?))
    }

    fn ramified_place(place: &Place, e: u32) -> Result<Place> {
        ramification_substitution(place, e)?;
        Ok(match place {
            Place::Infinity => Place::Infinity,
            _ => Place::at(Rat::zero()),
        })
    }
}

/// Primes dividing a nonzero integer, in increasing order.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut k = 2u64;
    while BigInt::from(k) * BigInt::from(k) <= n {
        let kb = BigInt::from(k);
        if (&n % &kb).is_zero() {
            out.push(k);
            while (&n % &kb).is_zero() {
                n /= &kb;
            }
        }
        k += 1;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor exceeds u64"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{int, rat};

    #[test]
    fn padic_valuations() {
        let p = Place::PAdic(3);
        assert_eq!(rat(18, 5).valuation(&p).unwrap(), Some(2));
        assert_eq!(rat(5, 9).valuation(&p).unwrap(), Some(-2));
        assert_eq!(int(0).valuation(&p).unwrap(), None);
        assert_eq!(rat(7, 2).residue(&p).unwrap(), Fp::new(2, 3));
        assert!(rat(1, 3).residue(&p).is_err());
    }

    #[test]
    fn function_field_valuations() {
        let c = RatFunc::var();
        let x = (c.clone() * c.clone() + RatFunc::one()) / c.clone();
        assert_eq!(x.valuation(&Place::Infinity).unwrap(), Some(-1));
        assert_eq!(x.valuation(&Place::at(int(0))).unwrap(), Some(-1));
        assert_eq!(x.valuation(&Place::at(int(1))).unwrap(), Some(0));
        assert_eq!(x.residue(&Place::at(int(1))).unwrap(), int(2));
        let y = c.clone() / (c.clone() * int_rf(2) + RatFunc::one());
        assert_eq!(y.residue(&Place::Infinity).unwrap(), rat(1, 2));
        let irr = Place::Poly(UniPoly::new(vec![int(1), int(0), int(1)]));
        assert!(matches!(y.residue(&irr), Err(Error::Unsupported(_))));
    }

    fn int_rf(n: i64) -> RatFunc {
        RatFunc::from_int(n)
    }

    #[test]
    fn display_and_primes() {
        assert_eq!(Place::at(int(2)).to_string(), "poly:c-2");
        assert_eq!(Place::at(int(0)).to_string(), "poly:c");
        assert_eq!(prime_divisors(&BigInt::from(360)), vec![2, 3, 5]);
    }
}
