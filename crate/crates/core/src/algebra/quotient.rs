//! Simple algebraic extensions `F[z]/(m)`.
//!
//! With `m` irreducible this is a field (the "symbolic root" of `m`). The
//! same type hosts the étale algebras used for trace computations, where `m`
//! may be reducible and [`Field::try_inv`] can fail on zero divisors.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::field::{Field, Rat};
use super::fp::Fp;
use super::poly::UniPoly;
use super::ratfunc::RatFunc;

/// Fields that may appear under an extension. Extensions of extensions are
/// deliberately not instances.
pub trait BaseField: Field {}
impl BaseField for Rat {}
impl BaseField for RatFunc {}
impl BaseField for Fp {}

#[derive(Clone)]
pub struct QuotientElem<F: BaseField> {
    rep: UniPoly<F>,
    modulus: Option<Arc<UniPoly<F>>>,
}

impl<F: BaseField> QuotientElem<F> {
    pub fn new(rep: UniPoly<F>, modulus: Arc<UniPoly<F>>) -> Self {
        assert!(modulus.degree().unwrap_or(0) >= 1, "modulus must be nonconstant");
        let rep = rep.rem(&modulus);
        QuotientElem { rep, modulus: Some(modulus) }
    }

    /// The class of `z` in `F[z]/(modulus)`.
    pub fn generator(modulus: &Arc<UniPoly<F>>) -> Self {
        Self::new(UniPoly::x(), modulus.clone())
    }

    pub fn embed(c: F) -> Self {
        QuotientElem { rep: UniPoly::constant(c), modulus: None }
    }

    pub fn rep(&self) -> &UniPoly<F> {
        &self.rep
    }

    pub fn modulus(&self) -> Option<&Arc<UniPoly<F>>> {
        self.modulus.as_ref()
    }

    /// The base-field value when this element lies in `F`.
    pub fn as_base(&self) -> Option<F> {
        self.rep.is_constant().then(|| self.rep.coeff(0))
    }

    fn common(&self, other: &Self) -> Option<Arc<UniPoly<F>>> {
        match (&self.modulus, &other.modulus) {
            (Some(a), Some(b)) => {
                assert!(Arc::ptr_eq(a, b) || a == b, "elements of different extensions");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }

    fn build(rep: UniPoly<F>, m: Option<Arc<UniPoly<F>>>) -> Self {
        match m {
            Some(m) => Self::new(rep, m),
            None => QuotientElem { rep, modulus: None },
        }
    }

    /// Matrix of multiplication by `self` on the basis `1, z, ..., z^{k-1}`.
    pub fn multiplication_matrix(&self) -> Vec<Vec<F>> {
        let m = self.modulus.as_ref().expect("element of an extension");
        let k = m.degree().unwrap();
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let prod = (&self.rep * &UniPoly::monomial(F::one(), j)).rem(m);
            cols.push((0..k).map(|i| prod.coeff(i)).collect::<Vec<F>>());
        }
        (0..k).map(|i| (0..k).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Trace of multiplication by `self`.
    pub fn trace(&self) -> F {
        match &self.modulus {
            None => self.rep.coeff(0),
            Some(_) => {
                let mat = self.multiplication_matrix();
                (0..mat.len()).fold(F::zero(), |acc, i| acc + mat[i][i].clone())
            }
        }
    }
}

impl<F: BaseField> fmt::Debug for QuotientElem<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.modulus {
            Some(m) => write!(f, "[{:?} mod {:?}]", self.rep, m),
            None => write!(f, "{:?}", self.rep),
        }
    }
}

impl<F: BaseField> PartialEq for QuotientElem<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep
    }
}

impl<F: BaseField> Add for QuotientElem<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let m = self.common(&rhs);
        Self::build(&self.rep + &rhs.rep, m)
    }
}

impl<F: BaseField> Sub for QuotientElem<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let m = self.common(&rhs);
        Self::build(&self.rep - &rhs.rep, m)
    }
}

impl<F: BaseField> Mul for QuotientElem<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let m = self.common(&rhs);
        Self::build(&self.rep * &rhs.rep, m)
    }
}

impl<F: BaseField> Div for QuotientElem<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.try_inv().expect("not invertible in quotient ring")
    }
}

impl<F: BaseField> Neg for QuotientElem<F> {
    type Output = Self;
    fn neg(self) -> Self {
        QuotientElem { rep: -&self.rep, modulus: self.modulus }
    }
}

impl<F: BaseField> Zero for QuotientElem<F> {
    fn zero() -> Self {
        Self::embed(F::zero())
    }
    fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

impl<F: BaseField> One for QuotientElem<F> {
    fn one() -> Self {
        Self::embed(F::one())
    }
}

impl<F: BaseField> Field for QuotientElem<F> {
    fn try_inv(&self) -> Option<Self> {
        match &self.modulus {
            None => self.rep.coeff(0).try_inv().map(Self::embed),
            Some(m) => {
                let (g, s, _) = UniPoly::xgcd(&self.rep, m);
                (g.degree() == Some(0)).then(|| Self::new(s, m.clone()))
            }
        }
    }

    fn from_int(n: i64) -> Self {
        Self::embed(F::from_int(n))
    }

    fn from_rat(r: &Rat) -> Self {
        Self::embed(F::from_rat(r))
    }

    fn characteristic(&self) -> u64 {
        self.rep.coeffs().iter().map(|c| c.characteristic()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::int;

    #[test]
    fn square_root_of_minus_one() {
        let m = Arc::new(UniPoly::new(vec![int(1), int(0), int(1)]));
        let i = QuotientElem::generator(&m);
        assert_eq!(i.clone() * i.clone(), QuotientElem::from_int(-1));
        let inv = i.try_inv().unwrap();
        assert_eq!(inv, -i.clone());
        assert_eq!(i.trace(), int(0));
        assert_eq!((i.clone() + QuotientElem::from_int(3)).trace(), int(6));
    }

    #[test]
    fn zero_divisor_has_no_inverse() {
        // z^2 - 1 = (z - 1)(z + 1)
        let m = Arc::new(UniPoly::new(vec![int(-1), int(0), int(1)]));
        let z = QuotientElem::generator(&m);
        assert!((z - QuotientElem::one()).try_inv().is_none());
    }
}
