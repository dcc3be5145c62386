//! Conjugacy invariants of quadratic rational maps of `P^1`.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::factor::{rat_sqrt, Factorable};
use crate::algebra::field::{int, Field, Rat};
use crate::algebra::form::HomogForm;
use crate::algebra::matrix::SquareMatrix;
use crate::algebra::poly::UniPoly;
use crate::algebra::quotient::{BaseField, QuotientElem};
use crate::error::{Error, Result};
use crate::map_space::{binary_factors, RationalMap};
use crate::stability::{matrix_moving_to_infinity, point_of_linear};

fn require_quadratic<F: Field>(phi: &RationalMap<F>) -> Result<()> {
    if phi.n() != 1 || phi.d() != 2 {
        return Err(Error::Unsupported("quadratic maps of P^1 only".into()));
    }
    Ok(())
}

/// Multipliers of the fixed points, packaged in the algebra
/// `F[z]/(fixed-point polynomial)` after moving a non-fixed point to infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierData<F: BaseField> {
    pub fixed_point_form: HomogForm<F>,
    /// Conjugation applied before dehomogenizing.
    pub conjugator: SquareMatrix<F>,
    /// Class of `phi'(z)` in the algebra; its characteristic polynomial is
    /// the multiplier polynomial.
    pub multiplier: QuotientElem<F>,
    pub sigma1: F,
    pub sigma2: F,
}

fn small_points<F: Field>() -> impl Iterator<Item = [F; 2]> {
    std::iter::once([F::one(), F::zero()]).chain((0..).map(|k: i64| {
        let t = if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 };
        [F::from_int(t), F::one()]
    }))
}

pub fn sigma_invariants<F: BaseField>(phi: &RationalMap<F>) -> Result<MultiplierData<F>> {
    require_quadratic(phi)?;
    let fix = phi.fixed_point_form()?;
    if fix.is_zero() {
        return Err(Error::DegenerateFixedLocus("fixed-point form vanishes identically".into()));
    }
    if !phi.is_morphism()? {
        return Err(Error::DegenerateFixedLocus("map is not a morphism".into()));
    }
    // a cubic form vanishes at no more than three of these points
    let p = small_points::<F>().find(|p| !fix.eval(p).is_zero()).unwrap();
    let conjugator = matrix_moving_to_infinity(&p);
    let psi = phi.conjugate_raw(&conjugator)?;
    let f = psi.component(0).to_uni();
    let g = psi.component(1).to_uni();
    let fixed = &f - &(&UniPoly::x() * &g);
    debug_assert_eq!(fixed.degree(), Some(3));
    let modulus = Arc::new(fixed.monic());
    let z = QuotientElem::generator(&modulus);
    let at = |q: &UniPoly<F>| q.eval_in(&z, |c| QuotientElem::embed(c.clone()));
    let (fz, gz) = (at(&f), at(&g));
    let g_inv = gz.try_inv().ok_or_else(|| Error::DegenerateFixedLocus("pole at a fixed point".into()))?;
    let numer = at(&f.derivative()) * gz - fz * at(&g.derivative());
    let multiplier = numer * g_inv.clone() * g_inv;
    let sigma1 = multiplier.trace();
    let p2 = (multiplier.clone() * multiplier.clone()).trace();
    let sigma2 = (sigma1.clone() * sigma1.clone() - p2) / F::from_int(2);
    Ok(MultiplierData { fixed_point_form: fix, conjugator, multiplier, sigma1, sigma2 })
}

/// A quadratic morphism with prescribed `(σ1, σ2)`. Usually
/// `(2x^2 + (2-σ1)xy + (2-σ1)y^2 : -x^2 + (2+σ1)xy + (2-σ1-σ2)y^2)`; where
/// that degenerates the multiplier polynomial has a repeated root and
/// `(x^2 + m0 xy : m1 xy + y^2)`, with fixed points 0 and ∞ of multipliers
/// `m0` and `m1`, is used instead.
pub fn map_with_sigma<F: Field>(s1: &F, s2: &F) -> RationalMap<F> {
    let k = F::from_int;
    let f = HomogForm::from_terms(1, 2, [(vec![2, 0], k(2)), (vec![1, 1], k(2) - s1.clone()), (vec![0, 2], k(2) - s1.clone())]);
    let g = HomogForm::from_terms(
        1,
        2,
        [(vec![2, 0], k(-1)), (vec![1, 1], k(2) + s1.clone()), (vec![0, 2], k(2) - s1.clone() - s2.clone())],
    );
    let phi = RationalMap::binary(f, g).expect("nonzero map");
    if phi.is_morphism().unwrap_or(false) {
        return phi;
    }
    // t^3 - σ1 t^2 + σ2 t - (σ1 - 2)
    let p = UniPoly::new(vec![k(2) - s1.clone(), s2.clone(), -s1.clone(), k(1)]);
    let g = UniPoly::gcd(&p, &p.derivative()).monic();
    let mu = match g.degree() {
        Some(1) => -g.coeff(0),
        Some(2) => -g.coeff(1) / k(2),
        _ => unreachable!("the normal form only degenerates at a repeated multiplier"),
    };
    let nu = s1.clone() - mu.clone() - mu.clone();
    let (m0, m1) = if !(mu.clone() * nu.clone()).is_one() {
        (mu, nu)
    } else if !(mu.clone() * mu.clone()).is_one() {
        (mu.clone(), mu)
    } else {
        // all three multipliers are 1: z + 1/z
        let f = HomogForm::from_terms(1, 2, [(vec![2, 0], k(1)), (vec![0, 2], k(1))]);
        let g = HomogForm::from_terms(1, 2, [(vec![1, 1], k(1))]);
        return RationalMap::binary(f, g).expect("nonzero map");
    };
    let f = HomogForm::from_terms(1, 2, [(vec![2, 0], k(1)), (vec![1, 1], m0)]);
    let g = HomogForm::from_terms(1, 2, [(vec![1, 1], m1), (vec![0, 2], k(1))]);
    RationalMap::binary(f, g).expect("nonzero map")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionData {
    /// The chosen totally invariant point `(x : y)`.
    pub point: [Rat; 2],
    /// Coefficients of the fixed-point form divided by the linear form
    /// vanishing at `point`.
    pub residual: [Rat; 3],
    /// Number of totally invariant points found.
    pub candidates: usize,
}

impl ObstructionData {
    /// Whether the totally invariant point is a repeated fixed point.
    pub fn repeated_root(&self) -> bool {
        let [px, py] = &self.point;
        let [a, b, c] = &self.residual;
        (a.clone() * px * px + b.clone() * px * py + c.clone() * py * py).is_zero()
    }
}

/// When two totally invariant points exist, the smaller in lexicographic
/// order of canonical coordinates is chosen.
pub fn obstruction_data(phi: &RationalMap<Rat>) -> Result<ObstructionData> {
    require_quadratic(phi)?;
    let fix = phi.fixed_point_form()?;
    if fix.is_zero() {
        return Err(Error::NotPolynomial);
    }
    let mut points: Vec<[Rat; 2]> = phi
        .totally_invariant_points_n1()?
        .into_iter()
        .filter(|t| !t.orbit && !t.degenerate)
        .filter_map(|t| point_of_linear(&t.h))
        .map(|[x, y]| if x.is_zero() { [x, Rat::one()] } else { [Rat::one(), y / x] })
        .collect();
    points.sort();
    let Some(point) = points.first().cloned() else {
        return Err(Error::NotPolynomial);
    };
    let [px, py] = point.clone();
    let line = HomogForm::linear(&[-py, px]);
    let q = fix.to_uni().div_exact(&line.to_uni()).ok_or(Error::NotPolynomial)?;
    let residual = [q.coeff(2), q.coeff(1), q.coeff(0)];
    Ok(ObstructionData { point, residual, candidates: points.len() })
}

/// The Möbius map sending `p[i]` to `q[i]`, for three distinct points each.
pub fn mobius_through<K: Field>(p: &[[K; 2]; 3], q: &[[K; 2]; 3]) -> Option<SquareMatrix<K>> {
    // columns l1 p1, l2 p2 with l1 p1 + l2 p2 = p3 send (1:0),(0:1),(1:1) to p
    fn frame<K: Field>(p: &[[K; 2]; 3]) -> Option<SquareMatrix<K>> {
        let det = p[0][0].clone() * p[1][1].clone() - p[0][1].clone() * p[1][0].clone();
        let inv = det.try_inv()?;
        let l1 = (p[2][0].clone() * p[1][1].clone() - p[2][1].clone() * p[1][0].clone()) * inv.clone();
        let l2 = (p[0][0].clone() * p[2][1].clone() - p[0][1].clone() * p[2][0].clone()) * inv;
        if l1.is_zero() || l2.is_zero() {
            return None;
        }
        Some(SquareMatrix::new(vec![
            vec![l1.clone() * p[0][0].clone(), l2.clone() * p[1][0].clone()],
            vec![l1 * p[0][1].clone(), l2 * p[1][1].clone()],
        ]))
    }
    let a = frame(p)?;
    let b = frame(q)?;
    Some(&b * &a.inverse().ok()?)
}

fn canonical_matrix<K: Field>(a: &SquareMatrix<K>) -> SquareMatrix<K> {
    let flat: Vec<K> = a.rows().iter().flatten().cloned().collect();
    a.scale(&K::canonical_scale(&flat).expect("nonzero matrix"))
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

type Ext = QuotientElem<Rat>;

/// Automorphisms found among the Möbius maps permuting the fixed points.
#[derive(Clone, Debug, PartialEq)]
pub struct AutGroup {
    /// Elements defined over `Q`, canonically scaled.
    pub rational: Vec<SquareMatrix<Rat>>,
    /// Modulus of the extension holding the irrational fixed points.
    pub extension: Option<Arc<UniPoly<Rat>>>,
    /// Elements defined only over the extension.
    pub extension_elements: Vec<SquareMatrix<Ext>>,
    /// Set when candidates needed a larger field and were not checked.
    pub lower_bound: bool,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.rational.len() + self.extension_elements.len()
    }

    pub fn order_over_q(&self) -> usize {
        self.rational.len()
    }

    /// Every element fixes `phi` and the rational elements are closed
    /// under composition up to scalars.
    pub fn verify(&self, phi: &RationalMap<Rat>) -> bool {
        let canon = phi.canonical();
        let fixes = self.rational.iter().all(|a| phi.conjugate(a).is_ok_and(|p| p == canon));
        let closed = self.rational.iter().all(|a| {
            self.rational.iter().all(|b| {
                let ab = &(a * b);
                self.rational.iter().any(|c| c.projectively_eq(ab))
            })
        });
        let ext_ok = self.extension_elements.iter().all(|a| {
            let phi_k = phi.map_coeffs(|c| Ext::embed(c.clone()));
            phi_k.conjugate(a).is_ok_and(|p| p == phi_k.canonical())
        });
        fixes && closed && ext_ok
    }
}

fn automorphisms_over<K: Field>(phi: &RationalMap<K>, points: &[[K; 2]; 3]) -> Vec<SquareMatrix<K>> {
    let canon = phi.canonical();
    PERMUTATIONS
        .iter()
        .filter_map(|perm| {
            let target = [points[perm[0]].clone(), points[perm[1]].clone(), points[perm[2]].clone()];
            mobius_through(points, &target)
        })
        .map(|a| canonical_matrix(&a))
        .filter(|a| phi.conjugate(a).is_ok_and(|p| p == canon))
        .collect()
}

pub fn automorphisms_d2(phi: &RationalMap<Rat>) -> Result<AutGroup> {
    require_quadratic(phi)?;
    let fix = phi.fixed_point_form()?;
    if fix.is_zero() {
        return Err(Error::DegenerateConfiguration);
    }
    let factors = binary_factors(&fix)?;
    if factors.iter().any(|(_, m)| *m > 1) {
        return Err(Error::DegenerateConfiguration);
    }
    let mut linear: Vec<[Rat; 2]> = factors.iter().filter_map(|(h, _)| point_of_linear(h)).collect();
    let higher: Vec<&HomogForm<Rat>> = factors.iter().map(|(h, _)| h).filter(|h| h.degree() > 1).collect();
    let empty = AutGroup { rational: vec![], extension: None, extension_elements: vec![], lower_bound: false };
    match higher.as_slice() {
        [] => {
            let pts: [[Rat; 2]; 3] = [linear.remove(0), linear.remove(0), linear.remove(0)];
            Ok(AutGroup { rational: automorphisms_over(phi, &pts), ..empty })
        }
        [q] if q.degree() == 2 => {
            // the factor is not y, so q(z, 1) has degree 2
            let modulus = Arc::new(q.to_uni().monic());
            let alpha = Ext::generator(&modulus);
            let conj = Ext::embed(-modulus.coeff(1)) - alpha.clone();
            let r = &linear[0];
            let pts = [
                [Ext::embed(r[0].clone()), Ext::embed(r[1].clone())],
                [alpha, Ext::one()],
                [conj, Ext::one()],
            ];
            Ok(split_over_extension(phi, modulus, &pts))
        }
        [q] => match cubic_roots(q) {
            Some((modulus, pts)) => Ok(split_over_extension(phi, modulus, &pts)),
            None => {
                // non-Galois cubic: only the identity is checked
                let id = SquareMatrix::identity(2);
                let rational = if phi.conjugate(&id)? == phi.canonical() { vec![id] } else { vec![] };
                Ok(AutGroup { rational, lower_bound: true, ..empty })
            }
        },
        _ => unreachable!("a binary cubic has at most one factor of degree > 1"),
    }
}

/// Automorphisms through fixed points defined over `Q[z]/(modulus)`, split
/// into those with rational entries and the rest.
fn split_over_extension(phi: &RationalMap<Rat>, modulus: Arc<UniPoly<Rat>>, pts: &[[Ext; 2]; 3]) -> AutGroup {
    let phi_k = phi.map_coeffs(|c| Ext::embed(c.clone()));
    let mut rational = Vec::new();
    let mut extension_elements = Vec::new();
    for a in automorphisms_over(&phi_k, pts) {
        let base: Option<Vec<Vec<Rat>>> = a.rows().iter().map(|row| row.iter().map(|e| e.as_base()).collect()).collect();
        match base {
            Some(rows) => rational.push(SquareMatrix::new(rows)),
            None => extension_elements.push(a),
        }
    }
    AutGroup { rational, extension: Some(modulus), extension_elements, lower_bound: false }
}

/// The three roots of an irreducible binary cubic in `Q[z]/(q(z, 1))`, when
/// its discriminant is a rational square so that one root generates them all.
fn cubic_roots(q: &HomogForm<Rat>) -> Option<(Arc<UniPoly<Rat>>, [[Ext; 2]; 3])> {
    let m = q.to_uni().monic();
    if m.degree() != Some(3) {
        return None;
    }
    let (b, c, d) = (m.coeff(2), m.coeff(1), m.coeff(0));
    let disc = b.clone() * b.clone() * c.clone() * c.clone() - int(4) * c.pow(3) - int(4) * b.pow(3) * d.clone()
        - int(27) * d.clone() * d.clone()
        + int(18) * b.clone() * c.clone() * d.clone();
    let delta = rat_sqrt(&disc)?;
    let modulus = Arc::new(m);
    let alpha = Ext::generator(&modulus);
    // the other two roots have sum -(alpha + b) and difference delta / m'(alpha)
    let deriv = Ext::embed(int(3)) * alpha.clone() * alpha.clone() + Ext::embed(int(2) * b.clone()) * alpha.clone() + Ext::embed(c);
    let sum = -(alpha.clone() + Ext::embed(b));
    let diff = Ext::embed(delta) / deriv;
    let half = Ext::embed(Rat::new(1.into(), 2.into()));
    let beta = (sum.clone() + diff.clone()) * half.clone();
    let gamma = (sum - diff) * half;
    Some((modulus, [[alpha, Ext::one()], [beta, Ext::one()], [gamma, Ext::one()]]))
}

/// `phi` is polynomial with a totally invariant rational point, the
/// predicate the obstruction data is defined on.
pub fn is_polynomial_map<F: BaseField + Factorable>(phi: &RationalMap<F>) -> Result<bool> {
    Ok(phi.totally_invariant_points_n1()?.iter().any(|t| !t.orbit && !t.degenerate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::int;
    use crate::algebra::ratfunc::RatFunc;

    fn q_map(f: [i64; 3], g: [i64; 3]) -> RationalMap<Rat> {
        let form = |v: [i64; 3]| HomogForm::from_terms(1, 2, [(vec![2, 0], int(v[0])), (vec![1, 1], int(v[1])), (vec![0, 2], int(v[2]))]);
        RationalMap::binary(form(f), form(g)).unwrap()
    }

    #[test]
    fn sigma_of_squaring() {
        let m = sigma_invariants(&q_map([1, 0, 0], [0, 0, 1])).unwrap();
        assert_eq!((m.sigma1, m.sigma2), (int(2), int(0)));
    }

    #[test]
    fn sigma_of_polynomial_family() {
        let c = RatFunc::var();
        let f = HomogForm::from_terms(1, 2, [(vec![2, 0], RatFunc::one()), (vec![0, 2], c.clone())]);
        let g = HomogForm::from_terms(1, 2, [(vec![0, 2], RatFunc::one())]);
        let m = sigma_invariants(&RationalMap::binary(f, g).unwrap()).unwrap();
        assert_eq!(m.sigma1, RatFunc::from_int(2));
        assert_eq!(m.sigma2, RatFunc::from_int(4) * c);
    }

    #[test]
    fn sigma_is_conjugation_invariant() {
        let phi = q_map([1, 0, 1], [0, 0, 1]);
        let a = SquareMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let m = sigma_invariants(&phi.conjugate(&a).unwrap()).unwrap();
        assert_eq!((m.sigma1, m.sigma2), (int(2), int(4)));
    }

    #[test]
    fn degenerate_fixed_locus() {
        assert!(matches!(sigma_invariants(&q_map([1, 1, 0], [0, 1, 0])), Err(Error::DegenerateFixedLocus(_))));
        assert!(matches!(sigma_invariants(&q_map([0, 1, 1], [0, 0, 1])), Err(Error::DegenerateFixedLocus(_))));
    }

    #[test]
    fn prescribed_sigma() {
        for (s1, s2) in [(0, 0), (3, -7), (2, 4), (-5, 1), (2, 0), (3, 3), (3, -15), (6, 12)] {
            let m = sigma_invariants(&map_with_sigma(&int(s1), &int(s2))).unwrap();
            assert_eq!((m.sigma1, m.sigma2), (int(s1), int(s2)));
        }
    }

    #[test]
    fn obstruction_examples() {
        let o = obstruction_data(&q_map([3, 5, 7], [0, 0, 2])).unwrap();
        assert_eq!(o.point, [int(1), int(0)]);
        assert_eq!(o.residual, [int(3), int(3), int(7)]);
        assert!(!o.repeated_root());
        let o = obstruction_data(&q_map([0, 5, 7], [0, 0, 2])).unwrap();
        assert!(o.repeated_root());
        // z^2 has two totally invariant points, 0 and infinity
        let o = obstruction_data(&q_map([1, 0, 0], [0, 0, 1])).unwrap();
        assert_eq!(o.candidates, 2);
        assert_eq!(o.point, [int(0), int(1)]);
        assert!(matches!(obstruction_data(&q_map([1, 0, 1], [1, 0, -1])), Err(Error::NotPolynomial)));
    }

    #[test]
    fn automorphisms() {
        let sq = q_map([1, 0, 0], [0, 0, 1]);
        let g = automorphisms_d2(&sq).unwrap();
        assert_eq!(g.order(), 2);
        assert!(g.rational.contains(&SquareMatrix::from_ints(&[&[0, 1], &[1, 0]])));
        assert!(g.verify(&sq));

        let inv = q_map([0, 0, 1], [1, 0, 0]);
        let g = automorphisms_d2(&inv).unwrap();
        assert_eq!(g.order_over_q(), 2);
        assert_eq!(g.order(), 6);
        assert!(g.verify(&inv));

        let generic = q_map([2, -1, 1], [1, 1, -2]);
        let g = automorphisms_d2(&generic).unwrap();
        assert_eq!(g.order(), 1);

        // commutes with z -> 1/(1 - z); the fixed points generate a cyclic cubic field
        let cyclic = q_map([2, -2, -1], [1, -4, 1]);
        let g = automorphisms_d2(&cyclic).unwrap();
        assert!(!g.lower_bound);
        assert_eq!(g.order_over_q(), 3);
        assert!(g.rational.iter().any(|a| a.projectively_eq(&SquareMatrix::from_ints(&[&[0, 1], &[-1, 1]]))));
        assert!(g.verify(&cyclic));
    }
}
