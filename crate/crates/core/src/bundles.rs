//! Projective bundles over `P^1` glued from two charts, and their
//! Birkhoff–Grothendieck splitting types.

use num_traits::{One, Zero};

use crate::algebra::factor::nullspace;
use crate::algebra::field::{rat, Field, Rat};
use crate::algebra::matrix::SquareMatrix;
use crate::algebra::place::Place;
use crate::algebra::poly::UniPoly;
use crate::algebra::ratfunc::RatFunc;
use crate::error::{Error, Result};
use crate::map_space::RationalMap;
use crate::reduction::{has_semistable_reduction, scan_family, PlaceVerdict};

/// Whether `r` is a Laurent polynomial, i.e. its denominator is `c^k`.
pub fn is_laurent(r: &RatFunc) -> bool {
    let den = r.den();
    den.coeffs().iter().rev().skip(1).all(|c| c.is_zero())
}

fn den_shift(r: &RatFunc) -> i64 {
    r.den().degree().unwrap() as i64
}

/// Highest power of `c` in a nonzero Laurent polynomial.
pub fn laurent_max(r: &RatFunc) -> i64 {
    r.num().degree().unwrap() as i64 - den_shift(r)
}

/// Lowest power of `c` in a nonzero Laurent polynomial.
pub fn laurent_min(r: &RatFunc) -> i64 {
    let low = r.num().coeffs().iter().position(|c| !c.is_zero()).unwrap();
    low as i64 - den_shift(r)
}

/// Coefficient of `c^k`.
pub fn laurent_coeff(r: &RatFunc, k: i64) -> Rat {
    let i = k + den_shift(r);
    if i < 0 {
        Rat::zero()
    } else {
        r.num().coeff(i as usize)
    }
}

/// `lambda c^k`.
pub fn laurent_monomial(lambda: Rat, k: i64) -> RatFunc {
    let c = RatFunc::var();
    let p = if k >= 0 { c.pow(k as u64) } else { c.pow(k.unsigned_abs()).try_inv().unwrap() };
    RatFunc::constant(lambda) * p
}

/// Nonzero constant times a power of `c`.
fn is_laurent_unit(r: &RatFunc) -> bool {
    !r.is_zero() && is_laurent(r) && laurent_max(r) == laurent_min(r)
}

fn is_polynomial(r: &RatFunc) -> bool {
    r.is_zero() || r.den().is_constant()
}

fn is_polynomial_in_inverse(r: &RatFunc) -> bool {
    r.is_zero() || (is_laurent(r) && laurent_max(r) <= 0)
}

/// A transition matrix over the Laurent ring `Q[c, 1/c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    matrix: SquareMatrix<RatFunc>,
}

impl Cocycle {
    /// Scaled by a constant so that the lowest term of the first nonzero
    /// entry is monic.
    pub fn new(matrix: SquareMatrix<RatFunc>) -> Result<Cocycle> {
        if let Some(bad) = matrix.rows().iter().flatten().find(|e| !is_laurent(e)) {
            return Err(Error::NotACocycle(format!("entry {bad:?} is not a Laurent polynomial")));
        }
        let det = matrix.det();
        if !is_laurent_unit(&det) {
            return Err(Error::NotACocycle(format!("determinant {det:?} is not a unit")));
        }
        let first = matrix.rows().iter().flatten().find(|e| !e.is_zero()).unwrap();
        let k = laurent_min(first);
        let s = RatFunc::constant(laurent_coeff(first, k).recip());
        Ok(Cocycle { matrix: matrix.scale(&s) })
    }

    pub fn identity(size: usize) -> Cocycle {
        Cocycle { matrix: SquareMatrix::identity(size) }
    }

    pub fn matrix(&self) -> &SquareMatrix<RatFunc> {
        &self.matrix
    }
}

/// Birkhoff factorization `T = L diag(c^k) R` with `L` invertible over
/// `Q[c]` and `R` invertible over `Q[1/c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Birkhoff {
    pub left: SquareMatrix<RatFunc>,
    pub exponents: Vec<i64>,
    pub right: SquareMatrix<RatFunc>,
}

impl Birkhoff {
    pub fn verify(&self, t: &Cocycle) -> bool {
        let d = SquareMatrix::diagonal(self.exponents.iter().map(|&k| laurent_monomial(Rat::one(), k)).collect());
        let prod = &(&self.left * &d) * &self.right;
        let det_const = |m: &SquareMatrix<RatFunc>| m.det().as_constant().is_some_and(|x| !x.is_zero());
        prod == t.matrix
            && self.left.rows().iter().flatten().all(is_polynomial)
            && self.right.rows().iter().flatten().all(is_polynomial_in_inverse)
            && det_const(&self.left)
            && det_const(&self.right)
    }
}

/// Sorted exponents normalized to start at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingType(pub Vec<i64>);

impl SplittingType {
    pub fn from_exponents(k: &[i64]) -> SplittingType {
        let mut v = k.to_vec();
        v.sort_unstable();
        let m = v[0];
        SplittingType(v.into_iter().map(|x| x - m).collect())
    }
}

/// Row-reduces `c^N T` by unimodular polynomial row operations until its
/// leading row coefficient matrix is invertible.
pub fn birkhoff(t: &Cocycle) -> Birkhoff {
    let size = t.matrix.size();
    let shift = t.matrix.rows().iter().flatten().filter(|e| !e.is_zero()).map(laurent_min).min().unwrap();
    let mut m: Vec<Vec<RatFunc>> = t.matrix.scale(&laurent_monomial(Rat::one(), -shift)).rows().to_vec();
    let mut u = SquareMatrix::<RatFunc>::identity(size).rows().to_vec();
    loop {
        let degs: Vec<i64> =
            m.iter().map(|row| row.iter().filter(|e| !e.is_zero()).map(laurent_max).max().unwrap()).collect();
        let lead: Vec<Vec<Rat>> = (0..size).map(|j| (0..size).map(|i| laurent_coeff(&m[i][j], degs[i])).collect()).collect();
        let Some(v) = nullspace(lead, size).into_iter().next() else {
            let left = SquareMatrix::new(u).inverse().expect("unimodular");
            let right = SquareMatrix::new(
                m.iter().zip(&degs).map(|(row, &k)| row.iter().map(|e| e.clone() * laurent_monomial(Rat::one(), -k)).collect()).collect(),
            );
            return Birkhoff { left, exponents: degs.iter().map(|k| k + shift).collect(), right };
        };
        let r = (0..size).filter(|&i| !v[i].is_zero()).max_by_key(|&i| (degs[i], std::cmp::Reverse(i))).unwrap();
        let coef: Vec<RatFunc> = (0..size)
            .map(|i| if v[i].is_zero() { RatFunc::zero() } else { laurent_monomial(v[i].clone() / v[r].clone(), degs[r] - degs[i]) })
            .collect();
        let combine = |rows: &Vec<Vec<RatFunc>>| -> Vec<RatFunc> {
            (0..size).map(|j| (0..size).fold(RatFunc::zero(), |acc, i| acc + coef[i].clone() * rows[i][j].clone())).collect()
        };
        let new_m = combine(&m);
        let new_u = combine(&u);
        m[r] = new_m;
        u[r] = new_u;
    }
}

pub fn splitting_type(t: &Cocycle) -> SplittingType {
    SplittingType::from_exponents(&birkhoff(t).exponents)
}

/// Substitutes `c -> c^l` in every entry.
pub fn pullback_power(t: &Cocycle, l: u32) -> Cocycle {
    assert!(l >= 1);
    let cl = RatFunc::var().pow(l as u64);
    Cocycle { matrix: t.matrix.map(|e| e.subs(&cl)) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// Coordinate `c`.
    Finite,
    /// Coordinate `u = 1/c`.
    Infinite,
}

/// A family over one chart together with its fiber checks at the places
/// interior to that chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartModel {
    pub chart: Chart,
    pub family: RationalMap<RatFunc>,
    pub fibers: Vec<PlaceVerdict>,
}

impl ChartModel {
    pub fn new(chart: Chart, family: RationalMap<RatFunc>) -> Result<ChartModel> {
        let scan = scan_family(&family)?;
        let fibers = scan.places.into_iter().filter(|p| p.place != Place::Infinity).collect();
        Ok(ChartModel { chart, family, fibers })
    }

    pub fn interior_ok(&self) -> bool {
        self.fibers.iter().all(|p| p.semistable == Some(true))
    }

    /// The family written in the coordinate `c`.
    pub fn in_c(&self) -> RationalMap<RatFunc> {
        match self.chart {
            Chart::Finite => self.family.clone(),
            Chart::Infinite => {
                let inv = RatFunc::var().try_inv().unwrap();
                self.family.map_coeffs(|e| e.subs(&inv))
            }
        }
    }
}

/// `conjugate(U, T)` agrees with `V` on the overlap.
pub fn verify_transition(u: &ChartModel, v: &ChartModel, t: &Cocycle) -> Result<bool> {
    if u.family.n() != v.family.n() || u.family.d() != v.family.d() {
        return Err(Error::ChartMismatch("charts carry maps of different shape".into()));
    }
    if t.matrix.size() != u.family.n() + 1 {
        return Err(Error::ChartMismatch("transition has the wrong size".into()));
    }
    Ok(u.in_c().conjugate(&t.matrix)? == v.in_c().canonical())
}

/// Place of `Q(c)` corresponding to a finite place of the `u = 1/c` chart.
fn place_from_infinite_chart(p: &Place) -> Place {
    match p {
        Place::Poly(h) if h.coeff(0).is_zero() => Place::Infinity,
        Place::Poly(h) => {
            let mut rev = h.coeffs().to_vec();
            rev.reverse();
            Place::Poly(UniPoly::new(rev).monic())
        }
        other => other.clone(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleReport {
    pub splitting: SplittingType,
    /// Checked fibers in the coordinate `c`; every other fiber is a morphism.
    pub fibers: Vec<PlaceVerdict>,
}

impl BundleReport {
    pub fn all_semistable(&self) -> bool {
        self.fibers.iter().all(|p| p.semistable == Some(true))
    }
}

pub fn assemble_bundle(u: &ChartModel, v: &ChartModel, t: &Cocycle) -> Result<BundleReport> {
    if u.chart == v.chart {
        return Err(Error::ChartMismatch("assembly needs one finite and one infinite chart".into()));
    }
    if !verify_transition(u, v, t)? {
        return Err(Error::TransitionFails);
    }
    for chart in [u, v] {
        if let Some(bad) = chart.fibers.iter().find(|p| p.semistable != Some(true)) {
            return Err(Error::BadFiber(format!("{:?} chart, place {}", chart.chart, bad.place)));
        }
    }
    let (fin, inf) = if u.chart == Chart::Finite { (u, v) } else { (v, u) };
    let mut fibers = fin.fibers.clone();
    for p in &inf.fibers {
        let place = place_from_infinite_chart(&p.place);
        if !fibers.iter().any(|q| q.place == place) {
            fibers.push(PlaceVerdict { place, ..p.clone() });
        }
    }
    if !fibers.iter().any(|q| q.place == Place::Infinity) {
        let model = crate::reduction::LocalModel::new(inf.family.clone(), Place::at(Rat::zero()))?;
        let (ok, verdict) = has_semistable_reduction(&model)?;
        if ok != Some(true) {
            return Err(Error::BadFiber("place inf".into()));
        }
        fibers.push(PlaceVerdict { place: Place::Infinity, semistable: ok, verdict: Some(verdict), note: None });
    }
    Ok(BundleReport { splitting: splitting_type(t), fibers })
}

/// Matrix `[[γ, δ/2], [0, 1]]` conjugating `z -> γz^2 + δz + ε` to
/// `z -> z^2 + κ`, and `κ = γε + δ/2 - δ^2/4`.
pub fn quadratic_polynomial_transition(gamma: &RatFunc, delta: &RatFunc, eps: &RatFunc) -> (SquareMatrix<RatFunc>, RatFunc) {
    assert!(!gamma.is_zero());
    let half = RatFunc::constant(rat(1, 2));
    let quarter = RatFunc::constant(rat(1, 4));
    let m = SquareMatrix::new(vec![
        vec![gamma.clone(), delta.clone() * half.clone()],
        vec![RatFunc::zero(), RatFunc::one()],
    ]);
    let kappa = gamma.clone() * eps.clone() + delta.clone() * half - delta.clone() * delta.clone() * quarter;
    (m, kappa)
}

/// `(γx^2 + δxy + εy^2 : y^2)`.
pub fn quadratic_polynomial_map(gamma: &RatFunc, delta: &RatFunc, eps: &RatFunc) -> RationalMap<RatFunc> {
    use crate::algebra::form::HomogForm;
    let f = HomogForm::from_terms(1, 2, [(vec![2, 0], gamma.clone()), (vec![1, 1], delta.clone()), (vec![0, 2], eps.clone())]);
    let g = HomogForm::from_terms(1, 2, [(vec![0, 2], RatFunc::one())]);
    RationalMap::binary(f, g).expect("nonzero map")
}

/// Two-chart model of the polynomial curve with base coordinate `c^m` at
/// infinity: `z^2 + κ(c)` on the finite chart, `c^m z^2 - c^m z + 1` near
/// `c = ∞`, glued by the inverse of the completing-the-square matrix.
pub fn polynomial_curve_charts(m: u32) -> Result<(ChartModel, ChartModel, Cocycle)> {
    let cm = RatFunc::var().pow(m as u64);
    let (a, kappa) = quadratic_polynomial_transition(&cm, &-cm.clone(), &RatFunc::one());
    let u = ChartModel::new(Chart::Finite, quadratic_polynomial_map(&RatFunc::one(), &RatFunc::zero(), &kappa))?;
    // in u = 1/c the infinite chart is (x^2 - xy + u^m y^2 : u^m y^2)
    let um = RatFunc::var().pow(m as u64);
    let inf = {
        use crate::algebra::form::HomogForm;
        let f = HomogForm::from_terms(1, 2, [(vec![2, 0], RatFunc::one()), (vec![1, 1], -RatFunc::one()), (vec![0, 2], um.clone())]);
        let g = HomogForm::from_terms(1, 2, [(vec![0, 2], um)]);
        RationalMap::binary(f, g)?
    };
    let v = ChartModel::new(Chart::Infinite, inf)?;
    let t = Cocycle::new(a.inverse()?)?;
    Ok((u, v, t))
}
