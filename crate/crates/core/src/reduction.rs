//! Integral models over discrete valuation rings and the conjugation
//! procedure that drives them to semistable reduction.

use num_traits::{One, Signed, Zero};

use crate::algebra::factor::Factorable;
use crate::algebra::field::Rat;
use crate::algebra::matrix::SquareMatrix;
use crate::algebra::place::{LocalField, Place};
use crate::algebra::quotient::BaseField;
use crate::algebra::ratfunc::RatFunc;
use crate::error::{Error, Result};
use crate::map_space::RationalMap;
use crate::stability::{
    hm_weight, point_certificate_to_one_param, verdict, Certificate, OnePS, StabilityVerdict, VerdictKind,
};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalModel<F: LocalField> {
    pub phi: RationalMap<F>,
    pub place: Place,
    pub normalized: bool,
}

impl<F: LocalField> LocalModel<F> {
    pub fn new(phi: RationalMap<F>, place: Place) -> Result<Self> {
        let m = LocalModel { phi, place, normalized: false };
        m.min_valuation()?;
        Ok(m)
    }

    /// Valuations of the nonzero coefficients, in coefficient order.
    pub fn valuations(&self) -> Result<Vec<i64>> {
        self.phi
            .nonzero_terms()
            .iter()
            .map(|(_, _, c)| Ok(c.valuation(&self.place)?.expect("nonzero coefficient")))
            .collect()
    }

    fn min_valuation(&self) -> Result<i64> {
        Ok(self.valuations()?.into_iter().min().expect("nonzero map"))
    }
}

fn pi_pow<F: LocalField>(place: &Place, k: i64) -> Result<F> {
    let pi = F::uniformizer(place)?;
    let base = if k < 0 { pi.try_inv().unwrap() } else { pi };
    Ok(base.pow(k.unsigned_abs()))
}

/// Scales by a power of the uniformizer so the minimum valuation is 0.
pub fn normalize_model<F: LocalField>(m: &LocalModel<F>) -> Result<LocalModel<F>> {
    Ok(normalize_with_shift(m)?.0)
}

fn normalize_with_shift<F: LocalField>(m: &LocalModel<F>) -> Result<(LocalModel<F>, i64)> {
    let shift = -m.min_valuation()?;
    let phi = if shift == 0 { m.phi.clone() } else { m.phi.scale(&pi_pow(&m.place, shift)?) };
    Ok((LocalModel { phi, place: m.place.clone(), normalized: true }, shift))
}

/// Coefficient-wise reduction of a normalized model.
pub fn reduce_mod<F: LocalField>(m: &LocalModel<F>) -> Result<RationalMap<F::Residue>> {
    if !m.normalized || m.min_valuation()? != 0 {
        return Err(Error::NotNormalized);
    }
    m.phi.try_map_coeffs(|c| c.residue(&m.place))
}

/// Stability of the reduction; `None` in the first slot when undetermined.
pub fn has_semistable_reduction<F>(m: &LocalModel<F>) -> Result<(Option<bool>, StabilityVerdict<F::Residue>)>
where
    F: LocalField,
    F::Residue: BaseField + Factorable,
{
    let red = reduce_mod(&normalize_model(m)?)?;
    let v = verdict(&red)?;
    Ok((v.is_semistable(), v))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step<F: LocalField> {
    /// Multiply every coefficient by `pi^shift`.
    Normalize { shift: i64 },
    /// Conjugate by a lifted residue matrix.
    Conjugate { matrix: SquareMatrix<F> },
    /// Conjugate by `diag(pi^k_0, ..., pi^k_n)`, where `k = s (a - a_0)`.
    Diagonal { a: OnePS, s: Rat, exponents: Vec<i64> },
    /// Totally ramified base change of degree `e`.
    BaseChange { e: u32 },
}

/// Normalized valuations of one iteration, kept for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub valuations: Vec<i64>,
    pub weights: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport<F: LocalField> {
    pub input: LocalModel<F>,
    pub output: LocalModel<F>,
    pub residue_map: RationalMap<F::Residue>,
    pub verdict: StabilityVerdict<F::Residue>,
    pub steps: Vec<Step<F>>,
    pub profiles: Vec<Profile>,
    /// Product of all base-change degrees.
    pub ramification: u32,
}

fn apply_step<F: LocalField>(m: &LocalModel<F>, step: &Step<F>) -> Result<LocalModel<F>> {
    let place = m.place.clone();
    Ok(match step {
        Step::Normalize { shift } => {
            let phi = if *shift == 0 { m.phi.clone() } else { m.phi.scale(&pi_pow(&place, *shift)?) };
            LocalModel { phi, place, normalized: true }
        }
        Step::Conjugate { matrix } => LocalModel { phi: m.phi.conjugate_raw(matrix)?, place, normalized: false },
        Step::Diagonal { exponents, .. } => {
            let d = SquareMatrix::diagonal(
                exponents.iter().map(|&k| pi_pow::<F>(&place, k)).collect::<Result<Vec<_>>>()?,
            );
            LocalModel { phi: m.phi.conjugate_raw(&d)?, place, normalized: false }
        }
        Step::BaseChange { e } => {
            let phi = m.phi.try_map_coeffs(|c| c.ramify(&place, *e))?;
            LocalModel { phi, place: F::ramified_place(&place, *e)?, normalized: false }
        }
    })
}

/// Applies recorded steps to a model.
pub fn replay<F: LocalField>(input: &LocalModel<F>, steps: &[Step<F>]) -> Result<LocalModel<F>> {
    steps.iter().try_fold(input.clone(), |m, s| apply_step(&m, s))
}

/// Smallest `s > 0` at which the minimum of `v + s w` over coefficients of
/// non-positive weight meets the minimum over positive weight.
pub fn crossing_step(vw: &[(i64, i64)]) -> Option<Rat> {
    let pos: Vec<_> = vw.iter().filter(|(_, w)| *w > 0).collect();
    let nonpos: Vec<_> = vw.iter().filter(|(_, w)| *w <= 0).collect();
    if nonpos.is_empty() || pos.is_empty() {
        return None;
    }
    let at = |s: &Rat, set: &[&(i64, i64)]| {
        set.iter().map(|(v, w)| Rat::from_integer((*v).into()) + s * Rat::from_integer((*w).into())).min().unwrap()
    };
    let mut best: Option<Rat> = None;
    for (v1, w1) in &pos {
        for (v2, w2) in &nonpos {
            let s = Rat::new((v2 - v1).into(), (w1 - w2).into());
            if !s.is_positive() || at(&s, &pos) < at(&s, &nonpos) {
                continue;
            }
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best
}

/// Iterates normalization, reduction, and conjugation by a lifted
/// destabilizing subgroup until the reduction is semistable.
pub fn semistable_model<F>(m: &LocalModel<F>, max_steps: usize) -> Result<ReductionReport<F>>
where
    F: LocalField + BaseField + Factorable,
    F::Residue: BaseField + Factorable,
{
    match verdict(&m.phi)?.kind {
        VerdictKind::Unstable => return Err(Error::GenericFiberNotSemistable),
        VerdictKind::Undetermined => return Err(Error::Undetermined("generic fiber".into())),
        _ => {}
    }
    let mut steps = Vec::new();
    let mut profiles = Vec::new();
    let mut ramification = 1u32;
    let mut cur = m.clone();
    for _ in 0..=max_steps {
        let (normed, shift) = normalize_with_shift(&cur)?;
        steps.push(Step::Normalize { shift });
        cur = normed;
        let red = reduce_mod(&cur)?;
        let v = verdict(&red)?;
        match v.kind {
            VerdictKind::Stable | VerdictKind::SemistableNotStable => {
                return Ok(ReductionReport {
                    input: m.clone(),
                    output: cur,
                    residue_map: red,
                    verdict: v,
                    steps,
                    profiles,
                    ramification,
                })
            }
            VerdictKind::Undetermined => {
                return Err(Error::Undetermined(format!("reduction at {}", cur.place)))
            }
            VerdictKind::Unstable => {}
        }
        if profiles.len() == max_steps {
            break;
        }
        let cert = v.certificate.as_ref().and_then(point_certificate_to_one_param).ok_or_else(|| {
            Error::Unsupported("destabilizing point is not rational over the residue field".into())
        })?;
        let Certificate::OneParam { matrix, a } = cert else { unreachable!() };
        let lifted = SquareMatrix::new(
            matrix
                .rows()
                .iter()
                .map(|r| r.iter().map(|x| F::lift(x, &cur.place)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        );
        let step = Step::Conjugate { matrix: lifted };
        cur = apply_step(&cur, &step)?;
        steps.push(step);

        let terms = cur.phi.nonzero_terms();
        let vals = cur.valuations()?;
        let weights: Vec<i64> = terms.iter().map(|(i, e, _)| hm_weight(&a, *i, e)).collect();
        let vw: Vec<(i64, i64)> = vals.iter().copied().zip(weights.iter().copied()).collect();
        profiles.push(Profile { valuations: vals, weights });
        let mut s = crossing_step(&vw).ok_or(Error::GenericFiberNotSemistable)?;

        // k_i = s (a_i - a_0) must be integral
        let g = a.weights().iter().fold(0i64, |g, &x| num_integer::gcd(g, x - a.weights()[0]));
        let q = s.denom().clone();
        let e = &q / num_integer::gcd(q.clone(), g.into());
        if !e.is_one() {
            let e: u32 = e.try_into().map_err(|_| Error::Unsupported("ramification degree overflow".into()))?;
            if !cur.place.is_function_field() {
                return Err(Error::RamificationNeeded { step: format!("s = {s} at {}", cur.place) });
            }
            let step = Step::BaseChange { e };
            cur = apply_step(&cur, &step)?;
            steps.push(step);
            ramification *= e;
            s *= Rat::from_integer(e.into());
        }
        let exponents: Vec<i64> = a
            .weights()
            .iter()
            .map(|&ai| {
                let k = &s * Rat::from_integer((ai - a.weights()[0]).into());
                debug_assert!(k.is_integer());
                i64::try_from(k.to_integer()).expect("exponent overflow")
            })
            .collect();
        let step = Step::Diagonal { a: a.clone(), s: s.clone(), exponents };
        cur = apply_step(&cur, &step)?;
        steps.push(step);
    }
    Err(Error::NonTerminating {
        steps: max_steps,
        diagnostic: format!("last model {:?} at {}", cur.phi, cur.place),
    })
}

/// Verdict of one place in a family scan.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaceVerdict {
    pub place: Place,
    /// `None` when the reduction could not be decided at this place.
    pub semistable: Option<bool>,
    pub verdict: Option<StabilityVerdict<Rat>>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyScan {
    pub places: Vec<PlaceVerdict>,
}

impl FamilyScan {
    pub fn bad_places(&self) -> Vec<&PlaceVerdict> {
        self.places.iter().filter(|p| p.semistable != Some(true)).collect()
    }
}

/// Checks every place where the reduction can fail to be a morphism:
/// factors of the resultant, factors of every coefficient's numerator and
/// denominator, and infinity. All other places reduce to morphisms.
pub fn scan_family(family: &RationalMap<RatFunc>) -> Result<FamilyScan> {
    let mut polys = Vec::new();
    let res = family.macaulay_resultant()?;
    if !res.is_zero() {
        polys.push(res.num().clone());
        polys.push(res.den().clone());
    }
    for (_, _, c) in family.nonzero_terms() {
        polys.push(c.num().clone());
        polys.push(c.den().clone());
    }
    let mut places: Vec<Place> = Vec::new();
    for p in polys {
        for (h, _) in Rat::factor(&p)? {
            let pl = Place::Poly(h);
            if !places.contains(&pl) {
                places.push(pl);
            }
        }
    }
    places.sort_by_cached_key(|p| match p {
        Place::Poly(h) => (h.degree().unwrap_or(0), format!("{:?}", h.coeffs())),
        _ => (usize::MAX, String::new()),
    });
    places.push(Place::Infinity);
    let mut out = Vec::new();
    for place in places {
        let model = LocalModel::new(family.clone(), place.clone())?;
        match has_semistable_reduction(&model) {
            Ok((ok, v)) => out.push(PlaceVerdict { place, semistable: ok, verdict: Some(v), note: None }),
            Err(Error::Unsupported(msg)) => {
                // residue field bigger than Q: a morphism fiber is still
                // detected by the valuation of the resultant
                let morphism = !res.is_zero() && {
                    let weight = (family.n() as i64 + 1) * (family.d() as i64).pow(family.n() as u32);
                    res.valuation(&place)? == Some(weight * model.valuations()?.into_iter().min().unwrap())
                };
                if morphism {
                    out.push(PlaceVerdict { place, semistable: Some(true), verdict: None, note: Some("reduction is a morphism".into()) })
                } else {
                    out.push(PlaceVerdict { place, semistable: None, verdict: None, note: Some(msg) })
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FamilyScan { places: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::int;
    use crate::algebra::form::HomogForm;
    use crate::algebra::field::Field;
    use crate::algebra::fp::Fp;

    fn c() -> RatFunc {
        RatFunc::var()
    }

    fn rf(n: i64) -> RatFunc {
        RatFunc::from_int(n)
    }

    fn qc_map(f: [RatFunc; 3], g: [RatFunc; 3]) -> RationalMap<RatFunc> {
        let form = |v: [RatFunc; 3]| {
            HomogForm::from_terms(1, 2, [(vec![2, 0], v[0].clone()), (vec![1, 1], v[1].clone()), (vec![0, 2], v[2].clone())])
        };
        RationalMap::binary(form(f), form(g)).unwrap()
    }

    fn x2_plus_c() -> RationalMap<RatFunc> {
        qc_map([rf(1), rf(0), c()], [rf(0), rf(0), rf(1)])
    }

    #[test]
    fn normalization_at_infinity() {
        let m = LocalModel::new(x2_plus_c(), Place::Infinity).unwrap();
        let n = normalize_model(&m).unwrap();
        assert_eq!(n.valuations().unwrap(), vec![1, 0, 1]);
        assert_eq!(normalize_model(&n).unwrap(), n);
        let red = reduce_mod(&n).unwrap();
        let expect = RationalMap::binary(HomogForm::from_terms(1, 2, [(vec![0, 2], int(1))]), HomogForm::zero(1, 2)).unwrap();
        assert_eq!(red, expect);
        assert_eq!(reduce_mod(&m), Err(Error::NotNormalized));
    }

    #[test]
    fn padic_normalization() {
        let p = Rat::from_integer(7.into());
        let f = HomogForm::from_terms(1, 2, [(vec![2, 0], p.clone()), (vec![0, 2], p.clone())]);
        let g = HomogForm::from_terms(1, 2, [(vec![0, 2], p.clone())]);
        let m = LocalModel::new(RationalMap::binary(f, g).unwrap(), Place::PAdic(7)).unwrap();
        let n = normalize_model(&m).unwrap();
        let red = reduce_mod(&n).unwrap();
        assert_eq!(red.coeff(0, &[2, 0]), Fp::new(1, 7));
        assert_eq!(red.coeff(1, &[0, 2]), Fp::new(1, 7));
    }

    #[test]
    fn reduction_verdicts() {
        let m = LocalModel::new(x2_plus_c(), Place::Infinity).unwrap();
        assert_eq!(has_semistable_reduction(&m).unwrap().0, Some(false));
        let m0 = LocalModel::new(x2_plus_c(), Place::at(int(0))).unwrap();
        assert_eq!(has_semistable_reduction(&m0).unwrap().0, Some(true));
        let chart = qc_map([c(), -c(), rf(1)], [rf(0), rf(0), rf(1)]);
        let mi = LocalModel::new(chart, Place::Infinity).unwrap();
        assert_eq!(has_semistable_reduction(&mi).unwrap().0, Some(true));
    }

    #[test]
    fn crossing() {
        // x^2 (v=1, w=-1), y^2 (v=0, w=3), g y^2 (v=1, w=1)
        assert_eq!(crossing_step(&[(1, -1), (0, 3), (1, 1)]), Some(Rat::new(1.into(), 4.into())));
    }

    #[test]
    fn polynomial_family_at_infinity() {
        let m = LocalModel::new(x2_plus_c(), Place::Infinity).unwrap();
        let report = semistable_model(&m, 64).unwrap();
        assert_eq!(report.verdict.is_semistable(), Some(true));
        assert_eq!(replay(&m, &report.steps).unwrap(), report.output);
        assert!(report.ramification > 1);
    }

    #[test]
    fn already_semistable_is_zero_step() {
        let m = LocalModel::new(x2_plus_c(), Place::at(int(1))).unwrap();
        let report = semistable_model(&m, 64).unwrap();
        assert_eq!(report.steps, vec![Step::Normalize { shift: 0 }]);
    }

    #[test]
    fn scans() {
        let scan = scan_family(&x2_plus_c()).unwrap();
        let bad: Vec<_> = scan.bad_places().iter().map(|p| p.place.clone()).collect();
        assert_eq!(bad, vec![Place::Infinity]);
        let chart = qc_map([c(), -c(), rf(1)], [rf(0), rf(0), rf(1)]);
        let bad: Vec<_> = scan_family(&chart).unwrap().bad_places().iter().map(|p| p.place.clone()).collect();
        assert_eq!(bad, vec![Place::at(int(0))]);
        let constant = qc_map([rf(1), rf(0), rf(0)], [rf(0), rf(0), rf(1)]);
        assert!(scan_family(&constant).unwrap().bad_places().is_empty());
    }
}
