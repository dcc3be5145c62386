//! Example maps, families and cocycles shipped with the crate, with the
//! values expected of them.

use serde_json::{json, Value};

use crate::bundles::{assemble_bundle, splitting_type};
use crate::error::{Error, Result};
use crate::json::{
    charts_from_json, cocycle_from_json, map_from_json, parse_map, parse_place, verdict_name, AnyMap,
};
use crate::map_space::RationalMap;
use crate::reduction::{scan_family, semistable_model, LocalModel};
use crate::stability::{hm_weight, verdict, OnePS};
use crate::{Rat, RatFunc};

const BUILTIN: [(&str, &str); 3] = [
    ("stability", include_str!("../corpus/stability.json")),
    ("families", include_str!("../corpus/families.json")),
    ("bundles", include_str!("../corpus/bundles.json")),
];

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub kind: String,
    /// `stated`, `oracle` or `trivial`: where the expected value comes from.
    pub provenance: String,
    /// The entry as stored, including its payload and expectations.
    pub raw: Value,
}

impl CorpusEntry {
    pub fn from_json(v: &Value) -> Result<CorpusEntry> {
        let field = |k: &str| {
            v.get(k).and_then(Value::as_str).map(str::to_string).ok_or_else(|| Error::Parse(format!("corpus entry without {k}")))
        };
        Ok(CorpusEntry { name: field("name")?, kind: field("kind")?, provenance: field("provenance")?, raw: v.clone() })
    }

    pub fn to_json(&self) -> Value {
        self.raw.clone()
    }

    pub fn expected(&self) -> &Value {
        &self.raw["expected"]
    }

    pub fn q_map(&self) -> Result<RationalMap<Rat>> {
        map_from_json(&self.raw["map"])
    }

    pub fn qc_map(&self) -> Result<RationalMap<RatFunc>> {
        map_from_json(&self.raw["map"])
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    v.as_array().ok_or_else(|| Error::Parse("corpus must be an array".into()))?.iter().map(CorpusEntry::from_json).collect()
}

/// All built-in entries, in file order.
pub fn builtin() -> Vec<CorpusEntry> {
    BUILTIN.iter().flat_map(|(name, text)| parse_corpus(text).unwrap_or_else(|e| panic!("corpus {name}: {e}"))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub ok: bool,
    /// What was computed, in the same shape as the expectation.
    pub computed: Value,
}

fn bad_places(family: &RationalMap<RatFunc>) -> Result<Value> {
    let scan = scan_family(family)?;
    Ok(json!(scan.bad_places().iter().map(|p| p.place.to_string()).collect::<Vec<_>>()))
}

/// Recomputes an entry and compares with its expectation.
pub fn verify_entry(e: &CorpusEntry) -> Result<Outcome> {
    let exp = e.expected();
    let computed = match e.kind.as_str() {
        "stability" | "torus_family" => {
            let name = match parse_map(&e.raw["map"])? {
                AnyMap::Q(phi) => verdict_name(verdict(&phi)?.kind),
                AnyMap::Qc(phi) => verdict_name(verdict(&phi)?.kind),
            };
            let mut out = json!({ "verdict": name });
            if let Some(a) = exp.get("one_ps") {
                let a: Vec<i64> = serde_json::from_value(a.clone()).map_err(|err| Error::Parse(err.to_string()))?;
                let a = OnePS::new(a)?;
                let phi = e.q_map()?;
                let certified = phi.nonzero_terms().iter().all(|(i, ex, _)| hm_weight(&a, *i, ex) > 0);
                out["one_ps"] = if certified { json!(a.weights()) } else { Value::Null };
            }
            out
        }
        "family" => json!({ "bad_places": bad_places(&e.qc_map()?)? }),
        "reduction" => {
            let place = parse_place(e.raw["place"].as_str().ok_or_else(|| Error::Parse("reduction entry without place".into()))?)?;
            let report = semistable_model(&LocalModel::new(e.qc_map()?, place)?, 64)?;
            let mut out = json!({ "semistable": report.verdict.is_semistable() == Some(true) });
            if exp.get("steps").is_some() {
                out["steps"] = json!(report.steps.len());
            }
            out
        }
        "cocycle" => json!({ "splitting_type": splitting_type(&cocycle_from_json(&e.raw["cocycle"])?).0 }),
        "charts" => {
            let (u, v, t) = charts_from_json(&e.raw["charts"])?;
            let report = assemble_bundle(&u, &v, &t)?;
            json!({ "splitting_type": report.splitting.0, "all_semistable": report.all_semistable() })
        }
        other => return Err(Error::Parse(format!("unknown corpus kind {other:?}"))),
    };
    Ok(Outcome { name: e.name.clone(), ok: &computed == exp, computed })
}
