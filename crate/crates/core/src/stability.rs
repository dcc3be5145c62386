//! Hilbert–Mumford stability of maps under conjugation.
//!
//! Weights follow the convention that the coefficient of `x^e` in `q_i` has
//! weight `a_i - a.e` under the one-parameter subgroup `a`; a point is
//! unstable when, after some conjugation, every nonzero coefficient has
//! positive weight for some `a`.

use std::sync::Arc;

use crate::algebra::factor::Factorable;
use crate::algebra::field::Field;
use crate::algebra::form::{binomial, HomogForm};
use crate::algebra::lp::{primitive_integer_vector, strict_cone_feasible, weak_cone_nonzero};
use crate::algebra::matrix::SquareMatrix;
use crate::algebra::poly::UniPoly;
use crate::algebra::quotient::{BaseField, QuotientElem};
use crate::error::{Error, Result};
use crate::map_space::{binary_factors, binary_gcd, y_multiplicity, RationalMap};

/// Integer weights `(a_0, ..., a_n)` with zero sum and coprime entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnePS(Vec<i64>);

impl OnePS {
    pub fn new(a: Vec<i64>) -> Result<OnePS> {
        if a.iter().sum::<i64>() != 0 || a.iter().all(|&x| x == 0) {
            return Err(Error::Parse(format!("{a:?} is not a nonzero weight vector with zero sum")));
        }
        let g = a.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        Ok(OnePS(a.into_iter().map(|x| x / g).collect()))
    }

    /// The subgroup `(n, -1, ..., -1)`.
    pub fn flag_weight(n: usize) -> OnePS {
        let mut a = vec![-1; n + 1];
        a[0] = n as i64;
        OnePS::new(a).unwrap()
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    /// Entries sorted non-increasing.
    pub fn sorted(&self) -> OnePS {
        let mut a = self.0.clone();
        a.sort_by(|x, y| y.cmp(x));
        OnePS(a)
    }
}

/// `a_i - a.e`.
pub fn hm_weight(a: &OnePS, i: usize, e: &[u32]) -> i64 {
    a.0[i] - a.0.iter().zip(e).map(|(x, &k)| x * k as i64).sum::<i64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub m1: u32,
    pub m2: u32,
    pub m1s: u32,
    pub m2s: u32,
}

impl Thresholds {
    pub fn for_degree(d: u32) -> Thresholds {
        Thresholds { m1: (d + 1) / 2, m2: (d + 3) / 2, m1s: d / 2, m2s: d / 2 + 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TorusVerdict {
    Unstable(OnePS),
    NotStable(OnePS),
    Fine,
}

/// Weight vectors `e_i - e` of the nonzero coefficients.
fn weight_vectors<F: Field>(phi: &RationalMap<F>) -> Vec<Vec<i64>> {
    phi.nonzero_terms()
        .into_iter()
        .map(|(i, e, _)| {
            let mut v: Vec<i64> = e.iter().map(|&k| -(k as i64)).collect();
            v[i] += 1;
            v
        })
        .collect()
}

/// Decides, in the given coordinates only, whether a diagonal subgroup
/// makes every nonzero coefficient of positive (or nonnegative) weight.
pub fn torus_verdict<F: Field>(phi: &RationalMap<F>) -> TorusVerdict {
    let vs = weight_vectors(phi);
    if let Some(a) = strict_cone_feasible(&vs) {
        return TorusVerdict::Unstable(OnePS::new(primitive_integer_vector(&a)).unwrap());
    }
    if let Some(a) = weak_cone_nonzero(&vs) {
        return TorusVerdict::NotStable(OnePS::new(primitive_integer_vector(&a)).unwrap());
    }
    TorusVerdict::Fine
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    Stable,
    SemistableNotStable,
    Unstable,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate<F: Field> {
    /// After conjugating by `matrix`, every nonzero coefficient has positive
    /// (or nonnegative) weight under `a`.
    OneParam { matrix: SquareMatrix<F>, a: OnePS },
    /// `n = 1`: a point `h = 0` (irreducible binary form) with
    /// `min(ord f, ord g)` and the order of the forced pencil member.
    /// `None` stands for an identically vanishing form.
    Point { h: HomogForm<F>, orders: [Option<u32>; 2] },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityVerdict<F: Field> {
    pub kind: VerdictKind,
    pub certificate: Option<Certificate<F>>,
    pub note: Option<String>,
}

impl<F: Field> StabilityVerdict<F> {
    fn plain(kind: VerdictKind) -> Self {
        StabilityVerdict { kind, certificate: None, note: None }
    }

    /// `Some(true)` for stable or semistable, `None` when undetermined.
    pub fn is_semistable(&self) -> Option<bool> {
        match self.kind {
            VerdictKind::Stable | VerdictKind::SemistableNotStable => Some(true),
            VerdictKind::Unstable => Some(false),
            VerdictKind::Undetermined => None,
        }
    }
}

fn at_least(o: Option<u32>, m: u32) -> bool {
    o.is_none_or(|o| o >= m)
}

fn order_or_inf<F: Field>(h: &HomogForm<F>, k: Option<u32>) -> Option<u32> {
    if h.is_zero() {
        None
    } else {
        k
    }
}

/// `[min(ord_P f, ord_P g), ord_P(P_y f - P_x g)]` at the point(s) `h = 0`.
pub fn point_orders<F: BaseField>(f: &HomogForm<F>, g: &HomogForm<F>, h: &HomogForm<F>) -> Result<[Option<u32>; 2]> {
    let min = |a: Option<u32>, b: Option<u32>| match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    };
    let hu = h.to_uni();
    if h.degree() == 1 && hu.degree() == Some(0) {
        // P = (1 : 0); the forced member is -g
        let of = order_or_inf(f, Some(y_multiplicity(f)));
        let og = order_or_inf(g, Some(y_multiplicity(g)));
        return Ok([min(of, og), og]);
    }
    if hu.degree() != Some(h.degree() as usize) {
        return Err(Error::Parse("point form must be irreducible".into()));
    }
    let m = Arc::new(hu.monic());
    let mult = |p: &UniPoly<F>| if p.is_zero() { None } else { Some(p.multiplicity(&m).unwrap_or(0) as u32) };
    let of = mult(&f.to_uni());
    let og = mult(&g.to_uni());
    let theta = QuotientElem::generator(&m);
    let emb = |p: &UniPoly<F>| p.map(|c| QuotientElem::embed(c.clone()));
    let forced = &emb(&f.to_uni()) - &emb(&g.to_uni()).scale(&theta);
    let lin = UniPoly::linear_root(theta);
    let oforced = if forced.is_zero() { None } else { Some(forced.multiplicity(&lin).unwrap_or(0) as u32) };
    Ok([min(of, og), oforced])
}

/// Complete decision for `n = 1` by the point criterion.
pub fn verdict_n1<F: BaseField + Factorable>(phi: &RationalMap<F>) -> Result<StabilityVerdict<F>> {
    if phi.n() != 1 {
        return Err(Error::Unsupported("verdict_n1 needs n = 1".into()));
    }
    let th = Thresholds::for_degree(phi.d());
    let (f, g) = (phi.component(0), phi.component(1));
    let common = binary_gcd(f, g);
    let mut weak = None;
    for (h, _) in binary_factors(&common)? {
        let orders = point_orders(f, g, &h)?;
        if at_least(orders[0], th.m1) && at_least(orders[1], th.m2) {
            return Ok(StabilityVerdict {
                kind: VerdictKind::Unstable,
                certificate: Some(Certificate::Point { h, orders }),
                note: None,
            });
        }
        if weak.is_none() && at_least(orders[0], th.m1s) && at_least(orders[1], th.m2s) {
            weak = Some(Certificate::Point { h, orders });
        }
    }
    Ok(match weak {
        Some(c) => StabilityVerdict { kind: VerdictKind::SemistableNotStable, certificate: Some(c), note: None },
        None => StabilityVerdict::plain(VerdictKind::Stable),
    })
}

/// `A` with `A P = (1 : 0)` for a rational point `P`; second row is the
/// linear form vanishing at `P`.
pub fn matrix_moving_to_infinity<F: Field>(p: &[F; 2]) -> SquareMatrix<F> {
    let (px, py) = (p[0].clone(), p[1].clone());
    let top = if px.is_zero() { vec![F::zero(), F::one()] } else { vec![F::one(), F::zero()] };
    SquareMatrix::new(vec![top, vec![py, -px]])
}

/// The rational point cut out by a linear binary form `h = u x + v y`.
pub fn point_of_linear<F: Field>(h: &HomogForm<F>) -> Option<[F; 2]> {
    if h.n() != 1 || h.degree() != 1 {
        return None;
    }
    let u = h.coeff(&[1, 0]);
    let v = h.coeff(&[0, 1]);
    Some([v, -u])
}

/// The equivalent `(A, (1, -1))` certificate for a rational point.
pub fn point_certificate_to_one_param<F: Field>(cert: &Certificate<F>) -> Option<Certificate<F>> {
    match cert {
        Certificate::OneParam { .. } => Some(cert.clone()),
        Certificate::Point { h, .. } => {
            let p = point_of_linear(h)?;
            Some(Certificate::OneParam {
                matrix: matrix_moving_to_infinity(&p),
                a: OnePS::new(vec![1, -1]).unwrap(),
            })
        }
    }
}

/// Re-checks a certificate from scratch.
pub fn verify_certificate<F: BaseField + Factorable>(
    phi: &RationalMap<F>,
    cert: &Certificate<F>,
    strict: bool,
) -> Result<bool> {
    match cert {
        Certificate::OneParam { matrix, a } => {
            if a.weights().len() != phi.n() + 1 {
                return Ok(false);
            }
            let psi = phi.conjugate_raw(matrix)?;
            Ok(psi.nonzero_terms().iter().all(|(i, e, _)| {
                let w = hm_weight(a, *i, e);
                if strict {
                    w > 0
                } else {
                    w >= 0
                }
            }))
        }
        Certificate::Point { h, .. } => {
            if phi.n() != 1 || h.n() != 1 || h.is_zero() {
                return Ok(false);
            }
            let irreducible = h.degree() == 1
                || matches!(F::factor(&h.to_uni())?.as_slice(), [(p, 1)] if p.degree() == Some(h.degree() as usize));
            if !irreducible {
                return Ok(false);
            }
            let th = Thresholds::for_degree(phi.d());
            let (m1, m2) = if strict { (th.m1, th.m2) } else { (th.m1s, th.m2s) };
            let o = point_orders(phi.component(0), phi.component(1), h)?;
            Ok(at_least(o[0], m1) && at_least(o[1], m2))
        }
    }
}

/// Permutation matrices of size `k`, identity first.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(rest: Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for (idx, &x) in rest.iter().enumerate() {
            let mut r = rest.clone();
            r.remove(idx);
            cur.push(x);
            rec(r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec((0..k).collect(), &mut Vec::new(), &mut out);
    out
}

/// Projective points of `P^n` with coordinates in `{-1, 0, 1}`, first
/// nonzero coordinate 1.
fn small_points(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let total = 3usize.pow(n as u32 + 1);
    for code in 0..total {
        let mut v = Vec::with_capacity(n + 1);
        let mut c = code;
        for _ in 0..=n {
            v.push((c % 3) as i64 - 1);
            c /= 3;
        }
        v.reverse();
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    // unit vectors first
    out.sort_by_key(|v| (v.iter().filter(|&&x| x != 0).count(), v.iter().map(|x| -x).collect::<Vec<_>>()));
    out
}

/// The conjugations tried for `n >= 2`: permutation matrices, then for
/// `n = 2` one matrix per flag (point, line through it) spanned by small
/// points, taking the point to `(1:0:0)` and the line to `x_2 = 0`.
pub fn search_set<F: Field>(n: usize) -> Vec<SquareMatrix<F>> {
    let mut out: Vec<SquareMatrix<F>> = permutations(n + 1).iter().map(|p| SquareMatrix::permutation(p)).collect();
    if n != 2 {
        return out;
    }
    let pts = small_points(2);
    let to_f = |v: &[i64]| v.iter().map(|&x| F::from_int(x)).collect::<Vec<F>>();
    let mut seen: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for p0 in &pts {
        for p1 in &pts {
            let line = cross(p0, p1);
            if line.iter().all(|&x| x == 0) {
                continue;
            }
            let line = normalize_int(&line);
            if seen.contains(&(p0.clone(), line.clone())) {
                continue;
            }
            seen.push((p0.clone(), line.clone()));
            let p2 = (0..3)
                .map(|k| {
                    let mut e = vec![0; 3];
                    e[k] = 1;
                    e
                })
                .find(|e| line.iter().zip(e).map(|(a, b)| a * b).sum::<i64>() != 0)
                .unwrap();
            let cols = [to_f(p0), to_f(p1), to_f(&p2)];
            let inv = SquareMatrix::new((0..3).map(|r| (0..3).map(|c| cols[c][r].clone()).collect()).collect());
            if let Ok(a) = inv.inverse() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
    }
    out
}

fn cross(a: &[i64], b: &[i64]) -> Vec<i64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize_int(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    let s = if v.iter().find(|&&x| x != 0).unwrap() < &0 { -g } else { g };
    v.iter().map(|x| x / s).collect()
}

/// Dispatching verdict. Complete for `n = 1`; for `n >= 2` a morphism is
/// stable, otherwise a fixed search for a destabilizing conjugation is run
/// and `Undetermined` is returned when it finds nothing.
pub fn verdict<F: BaseField + Factorable>(phi: &RationalMap<F>) -> Result<StabilityVerdict<F>> {
    if phi.n() == 1 {
        return verdict_n1(phi);
    }
    match phi.is_morphism() {
        Ok(true) => return Ok(StabilityVerdict::plain(VerdictKind::Stable)),
        Ok(false) | Err(Error::Unsupported(_)) => {}
        Err(e) => return Err(e),
    }
    let mut weak = None;
    for a in search_set::<F>(phi.n()) {
        let psi = phi.conjugate_raw(&a)?;
        match torus_verdict(&psi) {
            TorusVerdict::Unstable(w) => {
                return Ok(StabilityVerdict {
                    kind: VerdictKind::Unstable,
                    certificate: Some(Certificate::OneParam { matrix: a, a: w }),
                    note: None,
                })
            }
            TorusVerdict::NotStable(w) if weak.is_none() => {
                weak = Some(Certificate::OneParam { matrix: a, a: w })
            }
            _ => {}
        }
    }
    let note = match &weak {
        Some(_) => "not a morphism; a non-stability certificate was found but no destabilizing conjugation in the search set",
        None => "not a morphism and no certificate found in the search set",
    };
    Ok(StabilityVerdict { kind: VerdictKind::Undetermined, certificate: weak, note: Some(note.into()) })
}

/// Whether `a_0, ..., a_{d-1}` satisfy the quadratic relations cut out by
/// the orbit pattern `a_i = (-t)^i C(d,i) a_0`: for `i + j = k + l`, all
/// indices below `d`, `C(d,k) C(d,l) a_i a_j = C(d,i) C(d,j) a_k a_l`.
pub fn orbit_closure_relations_check<F: Field>(a: &[F], d: u32) -> bool {
    let d = d as usize;
    let b = |i: usize| F::from_int(binomial(d as u64, i as u64) as i64);
    let at = |i: usize| a.get(i).cloned().unwrap_or_else(F::zero);
    for i in 0..d {
        for j in i..d {
            for k in 0..d {
                let Some(l) = (i + j).checked_sub(k) else { continue };
                if l >= d || l < k {
                    continue;
                }
                let lhs = b(k) * b(l) * at(i) * at(j);
                let rhs = b(i) * b(j) * at(k) * at(l);
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{int, Rat};

    fn bf(c: &[i64]) -> HomogForm<Rat> {
        let d = (c.len() - 1) as u32;
        HomogForm::from_terms(1, d, c.iter().enumerate().map(|(k, &v)| (vec![d - k as u32, k as u32], int(v))))
    }

    fn qmap(f: &[i64], g: &[i64]) -> RationalMap<Rat> {
        RationalMap::binary(bf(f), bf(g)).unwrap()
    }

    #[test]
    fn weights() {
        let a = OnePS::new(vec![1, -1]).unwrap();
        assert_eq!(hm_weight(&a, 0, &[1, 1]), 1);
        assert_eq!(hm_weight(&a, 1, &[0, 2]), 1);
        assert_eq!(hm_weight(&OnePS::flag_weight(2), 0, &[0, 2, 0]), 4);
        assert_eq!(OnePS::new(vec![2, -2]).unwrap().weights(), &[1, -1]);
    }

    #[test]
    fn thresholds() {
        assert_eq!(Thresholds::for_degree(2), Thresholds { m1: 1, m2: 2, m1s: 1, m2s: 2 });
        assert_eq!(Thresholds::for_degree(3), Thresholds { m1: 2, m2: 3, m1s: 1, m2s: 2 });
    }

    #[test]
    fn torus() {
        assert_eq!(torus_verdict(&qmap(&[0, 1, 1], &[0, 0, 1])), TorusVerdict::Unstable(OnePS::new(vec![1, -1]).unwrap()));
        assert_eq!(torus_verdict(&qmap(&[1, 0, 0], &[0, 0, 1])), TorusVerdict::Fine);
        let x = |i| HomogForm::<Rat>::variable(2, i);
        let phi = RationalMap::new(vec![x(1).pow(2), x(1).pow(2), x(2).pow(2)]).unwrap();
        assert!(matches!(torus_verdict(&phi), TorusVerdict::Unstable(_)));
        let cert = Certificate::OneParam { matrix: SquareMatrix::identity(3), a: OnePS::flag_weight(2) };
        assert!(verify_certificate(&phi, &cert, true).unwrap());
    }

    #[test]
    fn verdicts_n1() {
        assert_eq!(verdict_n1(&qmap(&[1, 0, 1], &[0, 0, 1])).unwrap().kind, VerdictKind::Stable);
        let v = verdict_n1(&qmap(&[1, 0, 0], &[0, 0, 0])).unwrap();
        assert_eq!(v.kind, VerdictKind::Unstable);
        assert_eq!(v.certificate, Some(Certificate::Point { h: HomogForm::variable(1, 0), orders: [Some(2), Some(2)] }));
        assert_eq!(verdict_n1(&qmap(&[1, -1, 0], &[0, 0, 0])).unwrap().kind, VerdictKind::Stable);
        // (x^2 y : x y^2) is semistable but not stable
        let v = verdict_n1(&qmap(&[0, 1, 0, 0], &[0, 0, 1, 0])).unwrap();
        assert_eq!(v.kind, VerdictKind::SemistableNotStable);
    }

    #[test]
    fn certificates() {
        let phi = qmap(&[0, 1, 1], &[0, 0, 1]);
        let c = Certificate::OneParam { matrix: SquareMatrix::identity(2), a: OnePS::new(vec![1, -1]).unwrap() };
        assert!(verify_certificate(&phi, &c, true).unwrap());
        let phi = qmap(&[1, 0, 0], &[0, 0, 0]);
        let swap = Certificate::OneParam { matrix: SquareMatrix::from_ints(&[&[0, 1], &[1, 0]]), a: OnePS::new(vec![1, -1]).unwrap() };
        assert!(verify_certificate(&phi, &swap, true).unwrap());
        let v = verdict_n1(&phi).unwrap();
        let converted = point_certificate_to_one_param(v.certificate.as_ref().unwrap()).unwrap();
        assert!(verify_certificate(&phi, &converted, true).unwrap());
        let morph = qmap(&[1, 0, 1], &[0, 0, 1]);
        assert!(!verify_certificate(&morph, &c, true).unwrap());
        assert!(!verify_certificate(&morph, &swap, true).unwrap());
    }

    #[test]
    fn irrational_bad_point() {
        // f = g * (x^2 + y^2) shape: common factor x^2 + y^2 in degree 3
        let phi = qmap(&[1, 0, 1, 0], &[0, 1, 0, 1]);
        let v = verdict_n1(&phi).unwrap();
        assert_eq!(v.kind, VerdictKind::SemistableNotStable);
        assert!(verify_certificate(&phi, v.certificate.as_ref().unwrap(), false).unwrap());
    }

    #[test]
    fn relations() {
        // a_i = (-1)^i C(3, i) a_0
        let a: Vec<Rat> = vec![int(1), int(-3), int(3), int(-1)];
        assert!(orbit_closure_relations_check(&a, 3));
        assert!(!orbit_closure_relations_check(&[int(1), int(0), int(1), int(0)], 3));
        assert!(orbit_closure_relations_check(&[int(0), int(0), int(0)], 2));
    }

    #[test]
    fn search_set_shape() {
        let s = search_set::<Rat>(2);
        assert!(s[0].is_identity());
        assert!(s.len() > 6);
    }
}
