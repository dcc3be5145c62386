//! JSON encoding of maps, verdicts, reports and cocycles. Keys are sorted
//! (serde_json's default map), so output is byte-stable.

use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::algebra::field::{parse_rat, rat_to_string, Field, Rat};
use crate::algebra::form::{monomials, HomogForm};
use crate::algebra::fp::Fp;
use crate::algebra::matrix::SquareMatrix;
use crate::algebra::place::{poly_string, LocalField, Place};
use crate::algebra::poly::UniPoly;
use crate::algebra::quotient::QuotientElem;
use crate::algebra::ratfunc::RatFunc;
use crate::bundles::{BundleReport, Chart, ChartModel, Cocycle, SplittingType};
use crate::error::{Error, Result};
use crate::map_space::RationalMap;
use crate::moduli::{AutGroup, MultiplierData, ObstructionData};
use crate::reduction::{FamilyScan, PlaceVerdict, ReductionReport, Step};
use crate::stability::{Certificate, StabilityVerdict, VerdictKind};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Scalars with a JSON representation.
pub trait JsonField: Field {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
    /// Name of the field, read off sample elements when it depends on them.
    fn field_name(sample: &[Self]) -> String;
}

fn rat_from_value(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s).ok_or_else(|| parse_err(format!("bad rational {s:?}"))),
        Value::Number(n) => n.as_i64().map(|k| Rat::from_integer(k.into())).ok_or_else(|| parse_err(format!("bad number {n}"))),
        other => Err(parse_err(format!("expected a rational, got {other}"))),
    }
}

fn poly_to_json(p: &UniPoly<Rat>) -> Value {
    let c: Vec<Value> = if p.is_zero() { vec![json!("0")] } else { p.coeffs().iter().map(|c| json!(rat_to_string(c))).collect() };
    Value::Array(c)
}

fn poly_from_json(v: &Value) -> Result<UniPoly<Rat>> {
    let arr = v.as_array().ok_or_else(|| parse_err("polynomial must be a coefficient array"))?;
    Ok(UniPoly::new(arr.iter().map(rat_from_value).collect::<Result<_>>()?))
}

impl JsonField for Rat {
    fn to_json(&self) -> Value {
        json!(rat_to_string(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        rat_from_value(v)
    }

    fn field_name(_: &[Self]) -> String {
        "Q".into()
    }
}

impl JsonField for RatFunc {
    fn to_json(&self) -> Value {
        json!({ "num": poly_to_json(self.num()), "den": poly_to_json(self.den()) })
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Object(o) => {
                let num = poly_from_json(o.get("num").ok_or_else(|| parse_err("missing num"))?)?;
                let den = match o.get("den") {
                    Some(d) => poly_from_json(d)?,
                    None => UniPoly::one(),
                };
                if den.is_zero() {
                    return Err(parse_err("zero denominator"));
                }
                Ok(RatFunc::new(num, den))
            }
            other => Ok(RatFunc::constant(rat_from_value(other)?)),
        }
    }

    fn field_name(_: &[Self]) -> String {
        "Q(c)".into()
    }
}

impl JsonField for Fp {
    fn to_json(&self) -> Value {
        match self {
            Fp::Int(r) => json!(rat_to_string(r)),
            Fp::Mod { v, .. } => json!(v.to_string()),
        }
    }

    fn from_json(_: &Value) -> Result<Self> {
        Err(parse_err("maps over finite fields are not accepted as input"))
    }

    fn field_name(sample: &[Self]) -> String {
        match sample.iter().find_map(|x| x.modulus()) {
            Some(p) => format!("F_{p}"),
            None => "F_p".into(),
        }
    }
}

impl JsonField for QuotientElem<Rat> {
    fn to_json(&self) -> Value {
        poly_to_json(self.rep())
    }

    fn from_json(_: &Value) -> Result<Self> {
        Err(parse_err("maps over extensions are not accepted as input"))
    }

    fn field_name(sample: &[Self]) -> String {
        match sample.iter().find_map(|x| x.modulus()) {
            Some(m) => format!("Q[z]/({})", poly_string(m, "z")),
            None => "Q".into(),
        }
    }
}

pub fn map_to_json<F: JsonField>(phi: &RationalMap<F>) -> Value {
    let terms = phi.nonzero_terms();
    let sample: Vec<F> = terms.iter().map(|(_, _, c)| c.clone()).collect();
    let coeffs: Vec<Value> = terms.iter().map(|(i, e, c)| json!({ "i": i, "exp": e, "v": c.to_json() })).collect();
    json!({ "n": phi.n(), "d": phi.d(), "field": F::field_name(&sample), "coeffs": coeffs })
}

pub fn map_from_json<F: JsonField>(v: &Value) -> Result<RationalMap<F>> {
    let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| parse_err("missing n"))? as usize;
    let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| parse_err("missing d"))? as u32;
    if n == 0 || d == 0 {
        return Err(parse_err("n and d must be positive"));
    }
    let allowed = monomials(n, d);
    let mut comps = vec![HomogForm::zero(n, d); n + 1];
    for t in v.get("coeffs").and_then(Value::as_array).ok_or_else(|| parse_err("missing coeffs"))? {
        let i = t.get("i").and_then(Value::as_u64).ok_or_else(|| parse_err("coefficient without i"))? as usize;
        let exp: Vec<u32> = t
            .get("exp")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("coefficient without exp"))?
            .iter()
            .map(|x| x.as_u64().and_then(|k| k.to_u32()).ok_or_else(|| parse_err("bad exponent")))
            .collect::<Result<_>>()?;
        if i > n || !allowed.contains(&exp) {
            return Err(parse_err(format!("term ({i}, {exp:?}) does not fit n = {n}, d = {d}")));
        }
        let c = F::from_json(t.get("v").ok_or_else(|| parse_err("coefficient without v"))?)?;
        comps[i].add_term(exp, c);
    }
    RationalMap::new(comps).map_err(|e| parse_err(e.to_string()))
}

/// A parsed map over one of the input fields.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMap {
    Q(RationalMap<Rat>),
    Qc(RationalMap<RatFunc>),
}

pub fn parse_map(v: &Value) -> Result<AnyMap> {
    match v.get("field").and_then(Value::as_str).unwrap_or("Q") {
        "Q" => Ok(AnyMap::Q(map_from_json(v)?)),
        "Q(c)" => Ok(AnyMap::Qc(map_from_json(v)?)),
        other => Err(parse_err(format!("unknown field {other:?}"))),
    }
}

pub fn matrix_to_json<F: JsonField>(m: &SquareMatrix<F>) -> Value {
    Value::Array(m.rows().iter().map(|r| Value::Array(r.iter().map(F::to_json).collect())).collect())
}

pub fn matrix_from_json<F: JsonField>(v: &Value) -> Result<SquareMatrix<F>> {
    let rows = v.as_array().ok_or_else(|| parse_err("matrix must be an array of rows"))?;
    let rows: Vec<Vec<F>> = rows
        .iter()
        .map(|r| r.as_array().ok_or_else(|| parse_err("matrix row must be an array"))?.iter().map(F::from_json).collect())
        .collect::<Result<_>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(parse_err("matrix must be square"));
    }
    Ok(SquareMatrix::new(rows))
}

fn order_json(o: &Option<u32>) -> Value {
    o.map_or(Value::Null, |k| json!(k))
}

pub fn certificate_to_json<F: JsonField>(c: &Certificate<F>) -> Value {
    match c {
        Certificate::OneParam { matrix, a } => json!({ "type": "1ps", "A": matrix_to_json(matrix), "a": a.weights() }),
        Certificate::Point { h, orders } => {
            let coeffs: Vec<Value> = h.dense_binary().iter().map(F::to_json).collect();
            json!({ "type": "point", "h": coeffs, "orders": [order_json(&orders[0]), order_json(&orders[1])] })
        }
    }
}

pub fn verdict_name(k: VerdictKind) -> &'static str {
    match k {
        VerdictKind::Stable => "stable",
        VerdictKind::SemistableNotStable => "semistable_not_stable",
        VerdictKind::Unstable => "unstable",
        VerdictKind::Undetermined => "undetermined",
    }
}

pub fn verdict_to_json<F: JsonField>(v: &StabilityVerdict<F>) -> Value {
    json!({
        "verdict": verdict_name(v.kind),
        "certificate": v.certificate.as_ref().map_or(Value::Null, certificate_to_json),
        "note": v.note,
    })
}

/// Parses `inf`, `p:7`, `poly:c`, `poly:c^2-2`.
pub fn parse_place(s: &str) -> Result<Place> {
    let s = s.trim();
    if s == "inf" {
        return Ok(Place::Infinity);
    }
    if let Some(p) = s.strip_prefix("p:") {
        let p: u64 = p.trim().parse().map_err(|_| parse_err(format!("bad prime in {s:?}")))?;
        if p < 2 || crate::algebra::place::prime_divisors(&p.into()) != vec![p] {
            return Err(parse_err(format!("{p} is not prime")));
        }
        return Ok(Place::PAdic(p));
    }
    if let Some(h) = s.strip_prefix("poly:") {
        let h = parse_poly(h, "c").ok_or_else(|| parse_err(format!("bad polynomial in {s:?}")))?;
        if h.degree().unwrap_or(0) == 0 {
            return Err(parse_err("place polynomial must be nonconstant"));
        }
        return Ok(Place::Poly(h.monic()));
    }
    Err(parse_err(format!("unknown place {s:?}")))
}

/// Parses sums of terms `q`, `q*c`, `c^k`, `q*c^k`, with `q` rational.
pub fn parse_poly(s: &str, var: &str) -> Option<UniPoly<Rat>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut coeffs: Vec<Rat> = Vec::new();
    for t in terms {
        let (neg, body) = match t.as_bytes().first()? {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (coef, k) = match body.find(var) {
            None => (parse_rat(body)?, 0usize),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let coef = if c.is_empty() { Rat::one() } else { parse_rat(c)? };
                let rest = &body[pos + var.len()..];
                let k = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse().ok()? };
                (coef, k)
            }
        };
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rat::zero());
        }
        coeffs[k] += if neg { -coef } else { coef };
    }
    Some(UniPoly::new(coeffs))
}

pub fn step_to_json<F: LocalField + JsonField>(s: &Step<F>) -> Value {
    match s {
        Step::Normalize { shift } => json!({ "type": "normalize", "shift": shift }),
        Step::Conjugate { matrix } => json!({ "type": "conjugate", "matrix": matrix_to_json(matrix) }),
        Step::Diagonal { a, s, exponents } => {
            json!({ "type": "diagonal", "a": a.weights(), "s": rat_to_string(s), "exponents": exponents })
        }
        Step::BaseChange { e } => json!({ "type": "base_change", "e": e }),
    }
}

pub fn report_to_json<F>(r: &ReductionReport<F>) -> Value
where
    F: LocalField + JsonField,
    F::Residue: JsonField,
{
    let profiles: Vec<Value> = r.profiles.iter().map(|p| json!({ "valuations": p.valuations, "weights": p.weights })).collect();
    json!({
        "place": r.input.place.to_string(),
        "output_place": r.output.place.to_string(),
        "input": map_to_json(&r.input.phi),
        "output": map_to_json(&r.output.phi),
        "residue_map": map_to_json(&r.residue_map),
        "stability": verdict_to_json(&r.verdict),
        "steps": r.steps.iter().map(step_to_json).collect::<Vec<_>>(),
        "profiles": profiles,
        "ramification": r.ramification,
    })
}

pub fn place_verdict_to_json(p: &PlaceVerdict) -> Value {
    json!({
        "place": p.place.to_string(),
        "semistable": p.semistable,
        "stability": p.verdict.as_ref().map_or(Value::Null, verdict_to_json),
        "note": p.note,
    })
}

pub fn scan_to_json(s: &FamilyScan) -> Value {
    let bad: Vec<String> = s.bad_places().iter().map(|p| p.place.to_string()).collect();
    json!({ "places": s.places.iter().map(place_verdict_to_json).collect::<Vec<_>>(), "bad_places": bad })
}

/// Laurent polynomial as `{"k": "coefficient"}` over its nonzero terms.
pub fn laurent_to_json(r: &RatFunc) -> Value {
    let mut m = Map::new();
    if !r.is_zero() {
        for k in crate::bundles::laurent_min(r)..=crate::bundles::laurent_max(r) {
            let c = crate::bundles::laurent_coeff(r, k);
            if !c.is_zero() {
                m.insert(k.to_string(), json!(rat_to_string(&c)));
            }
        }
    }
    Value::Object(m)
}

pub fn laurent_from_json(v: &Value) -> Result<RatFunc> {
    let o = v.as_object().ok_or_else(|| parse_err("Laurent entry must be an object"))?;
    let mut acc = RatFunc::zero();
    for (k, c) in o {
        let k: i64 = k.parse().map_err(|_| parse_err(format!("bad exponent {k:?}")))?;
        acc = acc + crate::bundles::laurent_monomial(rat_from_value(c)?, k);
    }
    Ok(acc)
}

pub fn cocycle_to_json(t: &Cocycle) -> Value {
    Value::Array(t.matrix().rows().iter().map(|r| Value::Array(r.iter().map(laurent_to_json).collect())).collect())
}

pub fn cocycle_from_json(v: &Value) -> Result<Cocycle> {
    let rows = v.as_array().ok_or_else(|| parse_err("cocycle must be an array of rows"))?;
    let rows: Vec<Vec<RatFunc>> = rows
        .iter()
        .map(|r| r.as_array().ok_or_else(|| parse_err("cocycle row must be an array"))?.iter().map(laurent_from_json).collect())
        .collect::<Result<_>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(parse_err("cocycle must be square"));
    }
    Cocycle::new(SquareMatrix::new(rows))
}

pub fn splitting_to_json(s: &SplittingType) -> Value {
    json!(s.0)
}

pub fn bundle_report_to_json(b: &BundleReport) -> Value {
    json!({
        "splitting_type": splitting_to_json(&b.splitting),
        "fibers": b.fibers.iter().map(place_verdict_to_json).collect::<Vec<_>>(),
        "all_semistable": b.all_semistable(),
    })
}

/// Charts file: `{"finite": map, "infinite": map, "transition": cocycle}`.
/// The infinite chart's map is written in `u = 1/c`, stored as the
/// variable of `Q(c)`.
pub fn charts_from_json(v: &Value) -> Result<(ChartModel, ChartModel, Cocycle)> {
    let qc = |key: &str| -> Result<RationalMap<RatFunc>> {
        let m = v.get(key).ok_or_else(|| parse_err(format!("missing {key}")))?;
        map_from_json(m)
    };
    let u = ChartModel::new(Chart::Finite, qc("finite")?)?;
    let w = ChartModel::new(Chart::Infinite, qc("infinite")?)?;
    let t = cocycle_from_json(v.get("transition").ok_or_else(|| parse_err("missing transition"))?)?;
    Ok((u, w, t))
}

pub fn charts_to_json(u: &ChartModel, v: &ChartModel, t: &Cocycle) -> Value {
    json!({ "finite": map_to_json(&u.family), "infinite": map_to_json(&v.family), "transition": cocycle_to_json(t) })
}

pub fn multiplier_to_json<F: JsonField + crate::algebra::quotient::BaseField>(m: &MultiplierData<F>) -> Value {
    let modulus: Vec<Value> = m.multiplier.modulus().map_or(vec![], |p| p.coeffs().iter().map(F::to_json).collect());
    let rep: Vec<Value> = m.multiplier.rep().coeffs().iter().map(F::to_json).collect();
    json!({
        "sigma1": m.sigma1.to_json(),
        "sigma2": m.sigma2.to_json(),
        "fixed_point_form": m.fixed_point_form.dense_binary().iter().map(F::to_json).collect::<Vec<_>>(),
        "conjugator": matrix_to_json(&m.conjugator),
        "multiplier": { "modulus": modulus, "rep": rep },
    })
}

pub fn obstruction_to_json(o: &ObstructionData) -> Value {
    json!({
        "point": o.point.iter().map(Rat::to_json).collect::<Vec<_>>(),
        "residual": o.residual.iter().map(Rat::to_json).collect::<Vec<_>>(),
        "repeated_root": o.repeated_root(),
        "candidates": o.candidates,
    })
}

pub fn aut_to_json(g: &AutGroup) -> Value {
    let modulus = g.extension.as_ref().map_or(Value::Null, |m: &Arc<UniPoly<Rat>>| poly_to_json(m));
    json!({
        "order": g.order(),
        "order_over_q": g.order_over_q(),
        "lower_bound": g.lower_bound,
        "rational": g.rational.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "extension_modulus": modulus,
        "extension": g.extension_elements.iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

/// Flattens a JSON value into `path = value` lines.
pub fn to_text(v: &Value) -> String {
    fn walk(path: &str, v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(o) if !o.is_empty() => {
                for (k, x) in o {
                    walk(&if path.is_empty() { k.clone() } else { format!("{path}.{k}") }, x, out)
                }
            }
            Value::Array(a) if !a.is_empty() && a.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{path}[{i}]"), x, out)
                }
            }
            leaf => out.push(format!("{path} = {leaf}")),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out.join("\n") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{int, rat};

    #[test]
    fn map_round_trip() {
        let src = json!({"n":1,"d":2,"field":"Q","coeffs":[{"i":0,"exp":[2,0],"v":"1"},{"i":0,"exp":[0,2],"v":"-1/3"},{"i":1,"exp":[0,2],"v":"1"}]});
        let AnyMap::Q(phi) = parse_map(&src).unwrap() else { panic!() };
        assert_eq!(phi.coeff(0, &[0, 2]), rat(-1, 3));
        assert_eq!(map_from_json::<Rat>(&map_to_json(&phi)).unwrap(), phi);
        let qc = json!({"n":1,"d":2,"field":"Q(c)","coeffs":[{"i":0,"exp":[2,0],"v":"1"},{"i":0,"exp":[0,2],"v":{"num":["0","1"],"den":["1"]}},{"i":1,"exp":[0,2],"v":"1"}]});
        let AnyMap::Qc(fam) = parse_map(&qc).unwrap() else { panic!() };
        assert_eq!(map_from_json::<RatFunc>(&map_to_json(&fam)).unwrap(), fam);
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(parse_map(&json!({"n":1,"d":2,"coeffs":[{"i":0,"exp":[1,0],"v":"1"}]})).is_err());
        assert!(parse_map(&json!({"n":1,"d":2,"coeffs":[]})).is_err());
        assert!(parse_map(&json!({"n":1,"d":2,"field":"R","coeffs":[]})).is_err());
    }

    #[test]
    fn places_and_polys() {
        assert_eq!(parse_place("inf").unwrap(), Place::Infinity);
        assert_eq!(parse_place("p:7").unwrap(), Place::PAdic(7));
        assert!(parse_place("p:8").is_err());
        assert_eq!(parse_place("poly:c").unwrap(), Place::at(int(0)));
        assert_eq!(parse_place("poly:c^2-2").unwrap().to_string(), "poly:c^2-2");
        assert_eq!(parse_poly("1/2*c^2 - c + 3", "c").unwrap(), UniPoly::new(vec![int(3), int(-1), rat(1, 2)]));
    }

    #[test]
    fn cocycle_round_trip() {
        let v = json!([[{"1":"1"},{"1":"-1/2"}],[{},{"0":"1"}]]);
        let t = cocycle_from_json(&v).unwrap();
        assert_eq!(cocycle_to_json(&t), v);
    }
}
