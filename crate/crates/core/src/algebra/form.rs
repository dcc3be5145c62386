//! Homogeneous forms in `n + 1` variables.

use std::collections::BTreeMap;
use std::fmt;


use super::field::Field;
use super::matrix::SquareMatrix;
use super::poly::UniPoly;

pub type Exponent = Vec<u32>;

/// Exponent vectors of degree `d` in `n + 1` variables, in graded
/// lexicographic order with `x_0 > ... > x_n` (so `x_0^d` comes first).
pub fn monomials(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(vars: usize, d: u32, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if vars == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(vars - 1, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n + 1, d, &mut Vec::new(), &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Multinomial coefficient `d! / (e_0! ... e_n!)`.
pub fn multinomial(e: &[u32]) -> u64 {
    let mut total = 0u64;
    let mut acc = 1u64;
    for &k in e {
        total += k as u64;
        acc *= binomial(total, k as u64);
    }
    acc
}

#[derive(Clone, PartialEq)]
pub struct HomogForm<F> {
    n: usize,
    d: u32,
    terms: BTreeMap<Exponent, F>,
}

impl<F: Field> HomogForm<F> {
    pub fn zero(n: usize, d: u32) -> Self {
        HomogForm { n, d, terms: BTreeMap::new() }
    }

    pub fn from_terms(n: usize, d: u32, terms: impl IntoIterator<Item = (Exponent, F)>) -> Self {
        let mut f = Self::zero(n, d);
        for (e, c) in terms {
            f.add_term(e, c);
        }
        f
    }

    /// The coordinate `x_i` as a linear form.
    pub fn variable(n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[i] = 1;
        Self::from_terms(n, 1, [(e, F::one())])
    }

    pub fn linear(coeffs: &[F]) -> Self {
        let n = coeffs.len() - 1;
        Self::from_terms(
            n,
            1,
            coeffs.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; n + 1];
                e[i] = 1;
                (e, c.clone())
            }),
        )
    }

    pub fn constant(n: usize, c: F) -> Self {
        Self::from_terms(n, 0, [(vec![0; n + 1], c)])
    }

    pub fn add_term(&mut self, e: Exponent, c: F) {
        assert_eq!(e.len(), self.n + 1, "exponent length");
        assert_eq!(e.iter().sum::<u32>(), self.d, "exponent degree");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().clone() + c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> F {
        self.terms.get(e).cloned().unwrap_or_else(F::zero)
    }

    /// Nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &F)> {
        self.terms.iter()
    }

    /// Dense coefficients in graded lexicographic order.
    pub fn dense(&self) -> Vec<F> {
        monomials(self.n, self.d).iter().map(|e| self.coeff(e)).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> HomogForm<G> {
        HomogForm::from_terms(self.n, self.d, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.d), (other.n, other.d), "adding forms of different shape");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n, self.d + other.d);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.n, F::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self(B x)`: substitutes `x_k -> sum_l B[k][l] x_l`.
    pub fn substitute_linear(&self, b: &SquareMatrix<F>) -> Self {
        assert_eq!(b.size(), self.n + 1);
        let lin: Vec<Self> = (0..=self.n).map(|k| Self::linear(&b.rows()[k])).collect();
        let mut powers: Vec<Vec<Self>> = Vec::with_capacity(self.n + 1);
        for l in &lin {
            let mut ps = vec![Self::constant(self.n, F::one())];
            for k in 1..=self.d as usize {
                let next = ps[k - 1].mul(l);
                ps.push(next);
            }
            powers.push(ps);
        }
        let mut out = Self::zero(self.n, self.d);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.n, c.clone());
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    term = term.mul(&powers[k][ek as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitutes forms of a common degree for the variables.
    pub fn compose(&self, args: &[Self]) -> Self {
        assert_eq!(args.len(), self.n + 1);
        let target_n = args[0].n;
        let mut out = Self::zero(target_n, self.d * args[0].d);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target_n, c.clone());
            for (k, &ek) in e.iter().enumerate() {
                term = term.mul(&args[k].pow(ek));
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval(&self, point: &[F]) -> F {
        self.terms.iter().fold(F::zero(), |acc, (e, c)| {
            let m = e
                .iter()
                .zip(point)
                .fold(c.clone(), |m, (&k, x)| m * x.pow(k as u64));
            acc + m
        })
    }

    /// Evaluation after embedding the coefficients into a larger field.
    pub fn eval_in<G: Field>(&self, point: &[G], embed: impl Fn(&F) -> G) -> G {
        self.terms.iter().fold(G::zero(), |acc, (e, c)| {
            let m = e.iter().zip(point).fold(embed(c), |m, (&k, x)| m * x.pow(k as u64));
            acc + m
        })
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n, self.d.saturating_sub(1));
        if self.d == 0 {
            return out;
        }
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c.clone() * F::from_int(e[i] as i64));
            }
        }
        out
    }

    /// Binary form as a polynomial in `z = x/y`: coefficient of
    /// `x^i y^(d-i)` becomes the coefficient of `z^i`.
    /// Coefficients of `x^i y^(d-i)` for `i = 0..=d`.
    pub fn dense_binary(&self) -> Vec<F> {
        assert_eq!(self.n, 1, "binary form expected");
        (0..=self.d).map(|i| self.coeff(&[i, self.d - i])).collect()
    }

    pub fn to_uni(&self) -> UniPoly<F> {
        assert_eq!(self.n, 1, "binary form expected");
        let d = self.d as usize;
        UniPoly::new((0..=d).map(|i| self.coeff(&[i as u32, (d - i) as u32])).collect())
    }

    pub fn from_uni(p: &UniPoly<F>, d: u32) -> Self {
        let deg = p.degree().unwrap_or(0);
        assert!(deg <= d as usize, "polynomial degree exceeds form degree");
        Self::from_terms(
            1,
            d,
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i as u32, d - i as u32], c.clone())),
        )
    }
}

impl<F: Field> fmt::Debug for HomogForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = monomials(self.n, self.d)
            .iter()
            .filter_map(|e| {
                self.terms.get(e).map(|c| {
                    let mono: Vec<String> = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
                        .collect();
                    format!("({c:?}){}", if mono.is_empty() { String::new() } else { format!("*{}", mono.join("*")) })
                })
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{int, Rat};

    #[test]
    fn monomial_order_is_grlex() {
        assert_eq!(monomials(1, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let m = monomials(2, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m[0], vec![2, 0, 0]);
        assert_eq!(m[1], vec![1, 1, 0]);
        assert_eq!(m[5], vec![0, 0, 2]);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[1, 1]), 2);
        assert_eq!(multinomial(&[2, 1, 1]), 12);
        assert_eq!(binomial(5, 2), 10);
    }

    #[test]
    fn substitution_by_swap() {
        let f: HomogForm<Rat> = HomogForm::from_terms(1, 2, [(vec![2, 0], int(1)), (vec![1, 1], int(3))]);
        let swap = SquareMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        let g = f.substitute_linear(&swap);
        assert_eq!(g, HomogForm::from_terms(1, 2, [(vec![0, 2], int(1)), (vec![1, 1], int(3))]));
    }

    #[test]
    fn partials_and_eval() {
        // x^2 y - x y^2
        let f: HomogForm<Rat> = HomogForm::from_terms(1, 3, [(vec![2, 1], int(1)), (vec![1, 2], int(-1))]);
        assert_eq!(f.eval(&[int(2), int(1)]), int(2));
        assert_eq!(f.partial(0).eval(&[int(1), int(1)]), int(1));
        assert_eq!(f.to_uni(), UniPoly::new(vec![int(0), int(-1), int(1)]));
        assert_eq!(HomogForm::from_uni(&f.to_uni(), 3), f);
    }
}
