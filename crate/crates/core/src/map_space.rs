//! Degree-`d` rational self-maps of `P^n`, the conjugation action, resultants
//! and totally invariant hyperplanes.

use std::fmt;

use crate::algebra::factor::Factorable;
use crate::algebra::field::Field;
use crate::algebra::form::{binomial, monomials, Exponent, HomogForm};
use crate::algebra::matrix::SquareMatrix;
use crate::algebra::poly::UniPoly;
use crate::error::{Error, Result};

/// `N = (n+1) * binom(n+d, d) - 1`.
pub fn dimension_n(n: usize, d: u32) -> u64 {
    (n as u64 + 1) * binomial(n as u64 + d as u64, d as u64) - 1
}

/// `phi = (q_0 : ... : q_n)`.
#[derive(Clone, PartialEq)]
pub struct RationalMap<F> {
    n: usize,
    d: u32,
    comps: Vec<HomogForm<F>>,
}

impl<F: Field> RationalMap<F> {
    pub fn new(comps: Vec<HomogForm<F>>) -> Result<Self> {
        let n = comps.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::Parse("a map needs at least two components".into())
        })?;
        let d = comps[0].degree();
        for q in &comps {
            if q.n() != n || q.degree() != d {
                return Err(Error::Parse("components must be forms of one degree in n+1 variables".into()));
            }
        }
        if d < 1 {
            return Err(Error::Parse("degree must be positive".into()));
        }
        if comps.iter().all(|q| q.is_zero()) {
            return Err(Error::Parse("all components vanish".into()));
        }
        Ok(RationalMap { n, d, comps })
    }

    /// `(f : g)` on `P^1`.
    pub fn binary(f: HomogForm<F>, g: HomogForm<F>) -> Result<Self> {
        Self::new(vec![f, g])
    }

    /// The map `z -> num(z) / den(z)` as a pair of degree-`d` binary forms.
    pub fn from_fraction(num: &UniPoly<F>, den: &UniPoly<F>, d: u32) -> Result<Self> {
        Self::binary(HomogForm::from_uni(num, d), HomogForm::from_uni(den, d))
    }

    /// Builds a map from a dense coefficient vector (component-major, each
    /// component in graded lexicographic order).
    pub fn from_coeff_vector(n: usize, d: u32, v: &[F]) -> Result<Self> {
        let mons = monomials(n, d);
        if v.len() != (n + 1) * mons.len() {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got {}",
                (n + 1) * mons.len(),
                v.len()
            )));
        }
        let comps = (0..=n)
            .map(|i| {
                HomogForm::from_terms(
                    n,
                    d,
                    mons.iter().enumerate().map(|(k, e)| (e.clone(), v[i * mons.len() + k].clone())),
                )
            })
            .collect();
        Self::new(comps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn components(&self) -> &[HomogForm<F>] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &HomogForm<F> {
        &self.comps[i]
    }

    pub fn coeff(&self, i: usize, e: &[u32]) -> F {
        self.comps[i].coeff(e)
    }

    pub fn coeff_vector(&self) -> Vec<F> {
        self.comps.iter().flat_map(|q| q.dense()).collect()
    }

    /// Nonzero coefficients as `(component, exponent, value)`.
    pub fn nonzero_terms(&self) -> Vec<(usize, Exponent, F)> {
        let mut out = Vec::new();
        for (i, q) in self.comps.iter().enumerate() {
            for e in monomials(self.n, self.d) {
                let c = q.coeff(&e);
                if !c.is_zero() {
                    out.push((i, e, c));
                }
            }
        }
        out
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> RationalMap<G> {
        RationalMap { n: self.n, d: self.d, comps: self.comps.iter().map(|q| q.map(&f)).collect() }
    }

    /// Like [`map_coeffs`](Self::map_coeffs) but fails if every image
    /// coefficient vanishes.
    pub fn try_map_coeffs<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<RationalMap<G>> {
        let comps = self
            .comps
            .iter()
            .map(|q| {
                let terms: Result<Vec<_>> = q.terms().map(|(e, c)| Ok((e.clone(), f(c)?))).collect();
                Ok(HomogForm::from_terms(self.n, self.d, terms?))
            })
            .collect::<Result<Vec<_>>>()?;
        RationalMap::new(comps)
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map_coeffs(|c| c.clone() * s.clone())
    }

    /// Canonical projective representative.
    pub fn canonical(&self) -> Self {
        let s = F::canonical_scale(&self.coeff_vector()).expect("nonzero map");
        self.scale(&s)
    }

    pub fn projectively_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.canonical() == other.canonical()
    }

    /// `A phi A^{-1}` without rescaling.
    pub fn conjugate_raw(&self, a: &SquareMatrix<F>) -> Result<Self> {
        if a.size() != self.n + 1 {
            return Err(Error::Parse("matrix size does not match the map".into()));
        }
        let ainv = a.inverse()?;
        let pulled: Vec<HomogForm<F>> = self.comps.iter().map(|q| q.substitute_linear(&ainv)).collect();
        let comps = (0..=self.n)
            .map(|i| {
                (0..=self.n).fold(HomogForm::zero(self.n, self.d), |acc, j| {
                    acc.add(&pulled[j].scale(a.get(i, j)))
                })
            })
            .collect();
        Ok(RationalMap { n: self.n, d: self.d, comps })
    }

    /// Canonical form of `A phi A^{-1}`.
    pub fn conjugate(&self, a: &SquareMatrix<F>) -> Result<Self> {
        Ok(self.conjugate_raw(a)?.canonical())
    }

    /// The forms `q_i` with their coefficients given by a closure, useful for
    /// evaluation at points of an extension.
    pub fn eval_in<G: Field>(&self, point: &[G], embed: impl Fn(&F) -> G) -> Vec<G> {
        self.comps.iter().map(|q| q.eval_in(point, &embed)).collect()
    }

    /// Macaulay resultant of `(q_0, ..., q_n)`, normalized so that
    /// `Res(x_0^d, ..., x_n^d) = 1`. Supported for `n <= 2`.
    pub fn macaulay_resultant(&self) -> Result<F> {
        if self.n > 2 {
            return Err(Error::Unsupported("resultants for n >= 3".into()));
        }
        if let Some(r) = macaulay_quotient(&self.comps) {
            return Ok(r);
        }
        // the extraneous minor vanished: change coordinates by unipotent
        // matrices (determinant one, so the resultant is unchanged)
        for a in unipotent_candidates::<F>(self.n) {
            let moved: Vec<HomogForm<F>> = self.comps.iter().map(|q| q.substitute_linear(&a)).collect();
            if let Some(r) = macaulay_quotient(&moved) {
                return Ok(r);
            }
        }
        Err(Error::Unsupported("no coordinate change made the extraneous factor nonzero".into()))
    }

    pub fn is_morphism(&self) -> Result<bool> {
        Ok(!self.macaulay_resultant()?.is_zero())
    }

    /// Whether `sum a_i q_i` is proportional to `l^d`.
    pub fn is_polynomial_wrt(&self, l: &Hyperplane<F>) -> PolynomialTest<F> {
        let s = self
            .comps
            .iter()
            .zip(l.coeffs())
            .fold(HomogForm::zero(self.n, self.d), |acc, (q, a)| acc.add(&q.scale(a)));
        if s.is_zero() {
            return PolynomialTest::YesDegenerate;
        }
        match proportionality(&s, &HomogForm::linear(l.coeffs()).pow(self.d)) {
            Some(c) => PolynomialTest::Yes(c),
            None => PolynomialTest::No,
        }
    }

    /// `f y - g x`, for `n = 1`.
    pub fn fixed_point_form(&self) -> Result<HomogForm<F>> {
        if self.n != 1 {
            return Err(Error::Unsupported("fixed-point form is defined here for n = 1".into()));
        }
        let x = HomogForm::variable(1, 0);
        let y = HomogForm::variable(1, 1);
        Ok(self.comps[0].mul(&y).sub(&self.comps[1].mul(&x)))
    }
}

impl<F: Field + Factorable> RationalMap<F> {
    /// Irreducible binary forms `h` dividing the fixed-point form with
    /// `h(f, g) = c h^d`. Degree-one entries are totally invariant points.
    pub fn totally_invariant_points_n1(&self) -> Result<Vec<TotallyInvariant<F>>> {
        let fix = self.fixed_point_form()?;
        let (f, g) = (&self.comps[0], &self.comps[1]);
        let source = if fix.is_zero() { binary_gcd(f, g) } else { fix };
        let mut out = Vec::new();
        for (h, _) in binary_factors(&source)? {
            let image = h.compose(&[f.clone(), g.clone()]);
            let target = h.pow(self.d);
            let c = if image.is_zero() { Some(F::zero()) } else { proportionality(&image, &target) };
            if let Some(c) = c {
                let degenerate = c.is_zero();
                let orbit = h.degree() > 1;
                out.push(TotallyInvariant { h, c, degenerate, orbit });
            }
        }
        Ok(out)
    }
}

impl<F: Field> fmt::Debug for RationalMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|q| format!("{q:?}")).collect();
        write!(f, "({})", parts.join(" : "))
    }
}

/// The scalar `c` with `a = c b`, if it exists (`b` nonzero).
pub fn proportionality<F: Field>(a: &HomogForm<F>, b: &HomogForm<F>) -> Option<F> {
    let (e, bc) = b.terms().next()?;
    let c = a.coeff(e) / bc.clone();
    (a.sub(&b.scale(&c)).is_zero()).then_some(c)
}

fn unipotent_candidates<F: Field>(n: usize) -> Vec<SquareMatrix<F>> {
    let mut out = Vec::new();
    for k in 1..=6i64 {
        for lower in [false, true] {
            let rows = (0..=n)
                .map(|i| {
                    (0..=n)
                        .map(|j| {
                            if i == j {
                                F::one()
                            } else if (j > i) != lower {
                                F::from_int(k + (i + 2 * j) as i64)
                            } else {
                                F::zero()
                            }
                        })
                        .collect()
                })
                .collect();
            out.push(SquareMatrix::new(rows));
        }
    }
    // products of a lower and an upper factor
    let ups: Vec<_> = out.iter().step_by(2).cloned().collect();
    let lows: Vec<_> = out.iter().skip(1).step_by(2).cloned().collect();
    for (u, l) in ups.iter().zip(&lows) {
        out.push(u * l);
    }
    out
}

/// `det M / det M'` for the Macaulay matrix at the critical degree, or
/// `None` when the extraneous minor `M'` is singular.
fn macaulay_quotient<F: Field>(forms: &[HomogForm<F>]) -> Option<F> {
    let n = forms.len() - 1;
    let d = forms[0].degree();
    let big = (n as u32 + 1) * (d - 1) + 1;
    let mons = monomials(n, big);
    let index = |e: &Exponent| mons.iter().position(|m| m == e).unwrap();
    let mut rows = Vec::with_capacity(mons.len());
    let mut nonreduced = Vec::new();
    for (r, m) in mons.iter().enumerate() {
        let divisible: Vec<usize> = (0..=n).filter(|&i| m[i] >= d).collect();
        let i = divisible[0];
        if divisible.len() > 1 {
            nonreduced.push(r);
        }
        let mut shift = m.clone();
        shift[i] -= d;
        let mut row = vec![F::zero(); mons.len()];
        for (e, c) in forms[i].terms() {
            let prod: Exponent = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
            row[index(&prod)] = c.clone();
        }
        rows.push(row);
    }
    let minor: Vec<Vec<F>> = nonreduced
        .iter()
        .map(|&r| nonreduced.iter().map(|&c| rows[r][c].clone()).collect())
        .collect();
    let det_minor = if minor.is_empty() { F::one() } else { SquareMatrix::new(minor).det() };
    if det_minor.is_zero() {
        return None;
    }
    Some(SquareMatrix::new(rows).det() / det_minor)
}

#[derive(Clone, PartialEq)]
pub struct Hyperplane<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Hyperplane<F> {
    /// `a_0 x_0 + ... + a_n x_n = 0`, stored in canonical scaling.
    pub fn new(coeffs: Vec<F>) -> Result<Self> {
        let s = F::canonical_scale(&coeffs).ok_or_else(|| Error::Parse("zero hyperplane".into()))?;
        Ok(Hyperplane { coeffs: coeffs.into_iter().map(|c| c * s.clone()).collect() })
    }

    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut v = vec![F::zero(); n + 1];
        v[i] = F::one();
        Hyperplane { coeffs: v }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }
}

impl<F: Field> fmt::Debug for Hyperplane<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", HomogForm::linear(&self.coeffs))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PolynomialTest<F> {
    No,
    Yes(F),
    YesDegenerate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TotallyInvariant<F: Field> {
    /// Irreducible binary form cutting out the point (or its Galois orbit).
    pub h: HomogForm<F>,
    /// `h(f, g) = c h^d`.
    pub c: F,
    pub degenerate: bool,
    pub orbit: bool,
}

// ---------------------------------------------------------------- binary forms

/// Power of `y` dividing a nonzero binary form.
pub fn y_multiplicity<F: Field>(h: &HomogForm<F>) -> u32 {
    h.degree() - h.to_uni().degree().unwrap_or(0) as u32
}

/// Greatest common divisor of binary forms, monic in `z = x/y` and
/// carrying the common power of `y`. `gcd(f, 0) = f` up to scaling.
pub fn binary_gcd<F: Field>(f: &HomogForm<F>, g: &HomogForm<F>) -> HomogForm<F> {
    if f.is_zero() {
        return g.clone();
    }
    if g.is_zero() {
        return f.clone();
    }
    let u = UniPoly::gcd(&f.to_uni(), &g.to_uni());
    let k = y_multiplicity(f).min(y_multiplicity(g));
    let du = u.degree().unwrap_or(0) as u32;
    HomogForm::from_uni(&u, du + k)
}

/// Irreducible factors of a nonzero binary form, each as a binary form of
/// its own degree; the factor `y` (the point `(1:0)`) comes first.
pub fn binary_factors<F: Factorable>(h: &HomogForm<F>) -> Result<Vec<(HomogForm<F>, usize)>> {
    if h.is_zero() {
        return Err(Error::Unsupported("factoring the zero form".into()));
    }
    let mut out = Vec::new();
    let k = y_multiplicity(h);
    if k > 0 {
        out.push((HomogForm::variable(1, 1), k as usize));
    }
    for (p, m) in F::factor(&h.to_uni())? {
        let deg = p.degree().unwrap() as u32;
        out.push((HomogForm::from_uni(&p, deg), m));
    }
    Ok(out)
}

/// Vanishing order of a binary form at `P = (px : py)`; `None` means the
/// form is zero (order infinity).
pub fn vanishing_order<F: Field>(h: &HomogForm<F>, p: &[F; 2]) -> Option<u32> {
    if h.is_zero() {
        return None;
    }
    let (px, py) = (&p[0], &p[1]);
    assert!(!(px.is_zero() && py.is_zero()), "P = (0, 0)");
    if py.is_zero() {
        return Some(y_multiplicity(h));
    }
    let root = px.clone() / py.clone();
    let lin = UniPoly::linear_root(root);
    Some(h.to_uni().multiplicity(&lin).unwrap_or(0) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{int, Rat};
    use crate::algebra::ratfunc::RatFunc;
    use num_traits::{One, Zero};

    fn bf(c: &[i64]) -> HomogForm<Rat> {
        // coefficients of x^2, xy, y^2 (or general descending in x)
        let d = (c.len() - 1) as u32;
        HomogForm::from_terms(1, d, c.iter().enumerate().map(|(k, &v)| (vec![d - k as u32, k as u32], int(v))))
    }

    fn qmap(f: &[i64], g: &[i64]) -> RationalMap<Rat> {
        RationalMap::binary(bf(f), bf(g)).unwrap()
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(dimension_n(1, 2), 5);
        assert_eq!(dimension_n(1, 7), 15);
        assert_eq!(dimension_n(2, 2), 17);
        for n in 1..=3 {
            for d in 2..=4 {
                assert_eq!(dimension_n(n, d) + 1, ((n + 1) * monomials(n, d).len()) as u64);
            }
        }
    }

    #[test]
    fn conjugate_by_swap() {
        let phi = qmap(&[1, 0, 0], &[0, 0, 0]);
        let swap = SquareMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(phi.conjugate(&swap).unwrap(), qmap(&[0, 0, 0], &[0, 0, 1]));
        assert_eq!(phi.conjugate(&SquareMatrix::identity(2)).unwrap(), phi.canonical());
    }

    #[test]
    fn resultants() {
        assert_eq!(qmap(&[1, 0, 0], &[0, 0, 1]).macaulay_resultant().unwrap(), int(1));
        assert_eq!(qmap(&[1, -1, 0], &[0, 0, 0]).macaulay_resultant().unwrap(), int(0));
        assert!(qmap(&[1, 0, 1], &[0, 0, 1]).is_morphism().unwrap());
        assert!(!qmap(&[1, 0, 0], &[0, 1, 0]).is_morphism().unwrap());
        // n = 2: coordinate powers, and a cyclic permutation of them whose
        // extraneous minor vanishes
        let sq = |i: usize| HomogForm::<Rat>::variable(2, i).pow(2);
        let phi = RationalMap::new(vec![sq(0), sq(1), sq(2)]).unwrap();
        assert_eq!(phi.macaulay_resultant().unwrap(), int(1));
        let psi = RationalMap::new(vec![sq(1), sq(2), sq(0)]).unwrap();
        assert!(!psi.macaulay_resultant().unwrap().is_zero());
        let deg = RationalMap::new(vec![sq(0), HomogForm::variable(2, 0).mul(&HomogForm::variable(2, 1)), sq(2)]).unwrap();
        assert!(deg.macaulay_resultant().unwrap().is_zero());
    }

    #[test]
    fn polynomial_tests() {
        let y = Hyperplane::coordinate(1, 1);
        assert_eq!(qmap(&[1, 0, 3], &[0, 0, 1]).is_polynomial_wrt(&y), PolynomialTest::Yes(int(1)));
        assert_eq!(qmap(&[1, -1, 0], &[0, 0, 0]).is_polynomial_wrt(&y), PolynomialTest::YesDegenerate);
        let phi = qmap(&[1, 0, 1], &[0, 1, 0]);
        for l in [vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1], vec![2, 3]] {
            let h = Hyperplane::new(l.into_iter().map(int).collect()).unwrap();
            assert_eq!(phi.is_polynomial_wrt(&h), PolynomialTest::No);
        }
    }

    #[test]
    fn fixed_point_forms() {
        assert_eq!(qmap(&[1, 0, 0], &[0, 0, 1]).fixed_point_form().unwrap(), bf(&[0, 1, -1, 0]));
        let general = RationalMap::binary(
            HomogForm::from_terms(1, 2, [(vec![2, 0], int(2)), (vec![1, 1], int(3)), (vec![0, 2], int(5))]),
            HomogForm::from_terms(1, 2, [(vec![0, 2], int(7))]),
        )
        .unwrap();
        assert_eq!(general.fixed_point_form().unwrap(), bf(&[0, 2, 3 - 7, 5]));
    }

    #[test]
    fn totally_invariant() {
        let pts = qmap(&[1, 0, 0], &[0, 0, 1]).totally_invariant_points_n1().unwrap();
        let hs: Vec<_> = pts.iter().map(|t| t.h.clone()).collect();
        assert_eq!(hs, vec![HomogForm::variable(1, 1), HomogForm::variable(1, 0)]);
        let pts = qmap(&[1, 0, 5], &[0, 0, 1]).totally_invariant_points_n1().unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].h, HomogForm::variable(1, 1));
        assert!(qmap(&[1, 0, 1], &[0, 1, 0]).totally_invariant_points_n1().unwrap().is_empty());
    }

    #[test]
    fn vanishing_orders() {
        assert_eq!(vanishing_order(&bf(&[1, 0, 0]), &[int(0), int(1)]), Some(2));
        assert_eq!(vanishing_order(&bf(&[1, -1, 0]), &[int(1), int(1)]), Some(1));
        assert_eq!(vanishing_order(&bf(&[1, -1, 0, 0]).sub(&bf(&[0, 0, 0, 0])), &[int(1), int(0)]), Some(0));
        assert_eq!(vanishing_order(&bf(&[0, 1, -1, 0]), &[int(1), int(0)]), Some(1));
        assert_eq!(vanishing_order(&bf(&[0, 0, 0]), &[int(1), int(0)]), None);
    }

    #[test]
    fn transition_over_qc() {
        // c z^2 - c z + 1 conjugated by [[c, -c/2], [0, 1]]
        let c = RatFunc::var();
        let f = HomogForm::from_terms(1, 2, [(vec![2, 0], c.clone()), (vec![1, 1], -c.clone()), (vec![0, 2], RatFunc::one())]);
        let g = HomogForm::from_terms(1, 2, [(vec![0, 2], RatFunc::one())]);
        let phi = RationalMap::binary(f, g).unwrap();
        let half = RatFunc::from_rat(&crate::algebra::field::rat(1, 2));
        let a = SquareMatrix::new(vec![vec![c.clone(), -c.clone() * half.clone()], vec![RatFunc::zero(), RatFunc::one()]]);
        let kappa = c.clone() * half - c.clone() * c.clone() * RatFunc::from_rat(&crate::algebra::field::rat(1, 4));
        let expect = RationalMap::binary(
            HomogForm::from_terms(1, 2, [(vec![2, 0], RatFunc::one()), (vec![0, 2], kappa)]),
            HomogForm::from_terms(1, 2, [(vec![0, 2], RatFunc::one())]),
        )
        .unwrap();
        assert_eq!(phi.conjugate(&a).unwrap(), expect.canonical());
    }
}
