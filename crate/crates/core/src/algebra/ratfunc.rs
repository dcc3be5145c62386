//! The rational function field `Q(c)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::field::{Field, Rat};
use super::poly::UniPoly;

/// A reduced fraction `num / den` with `den` monic.
#[derive(Clone, PartialEq)]
pub struct RatFunc {
    num: UniPoly<Rat>,
    den: UniPoly<Rat>,
}

impl RatFunc {
    pub fn new(num: UniPoly<Rat>, den: UniPoly<Rat>) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = UniPoly::gcd(&num, &den);
        let num = num.div_exact(&g).unwrap();
        let den = den.div_exact(&g).unwrap();
        let lc = den.lead().recip();
        RatFunc { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn from_poly(p: UniPoly<Rat>) -> RatFunc {
        RatFunc { num: p, den: UniPoly::one() }
    }

    pub fn constant(c: Rat) -> RatFunc {
        RatFunc::from_poly(UniPoly::constant(c))
    }

    /// The indeterminate `c`.
    pub fn var() -> RatFunc {
        RatFunc::from_poly(UniPoly::x())
    }

    pub fn num(&self) -> &UniPoly<Rat> {
        &self.num
    }

    pub fn den(&self) -> &UniPoly<Rat> {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value, if this is a constant.
    pub fn as_constant(&self) -> Option<Rat> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    /// Substitutes `c -> g`.
    pub fn subs(&self, g: &RatFunc) -> RatFunc {
        let embed = |c: &Rat| RatFunc::constant(c.clone());
        self.num.eval_in(g, embed) / self.den.eval_in(g, embed)
    }

    /// Value at `c = r`, or `None` at a pole.
    pub fn eval(&self, r: &Rat) -> Option<Rat> {
        let d = self.den.eval(r);
        (!d.is_zero()).then(|| self.num.eval(r) / d)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "[{:?}]/[{:?}]", self.num, self.den)
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den);
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        self + (-rhs)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: RatFunc) -> RatFunc {
        self * rhs.try_inv().expect("division by zero in Q(c)")
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den }
    }
}

impl Zero for RatFunc {
    fn zero() -> RatFunc {
        RatFunc { num: UniPoly::zero(), den: UniPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> RatFunc {
        RatFunc::constant(Rat::one())
    }
}

impl Field for RatFunc {
    fn try_inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            None
        } else {
            Some(RatFunc::new(self.den.clone(), self.num.clone()))
        }
    }

    fn from_int(n: i64) -> RatFunc {
        RatFunc::constant(Rat::from_int(n))
    }

    fn from_rat(r: &Rat) -> RatFunc {
        RatFunc::constant(r.clone())
    }
}
