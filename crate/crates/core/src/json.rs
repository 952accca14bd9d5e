//! JSON forms of the public types, as consumed and emitted by the CLI.
//!
//! Integers are emitted as JSON numbers while they fit in 64 bits and as
//! decimal strings beyond that; both are accepted on input. Exact rationals
//! travel as `"p/q"` strings. Coefficients of trigonometric polynomials are
//! Gaussian rationals `{"re", "im"}` where possible and fall back to an
//! explicit cyclotomic form `{"conductor", "coeffs"}` (coset shifts
//! introduce roots of unity beyond `Q(i)`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cosets::{Coset, CosetUnion, SetExpr, SpdVerdict, UbiquityVerdict};
use crate::cyclo::{euler_phi, CycloNumber};
use crate::findual::{FiniteCharacter, FiniteElement, FiniteGroupSpec, VanishingVector};
use crate::lattice::LatticeSubgroup;
use crate::phase::{format_rational, parse_rational, Phase};
use crate::product::DualSliceMap;
use crate::trigpoly::{Character, GroupPoint, TrigPoly};
use crate::verify::{GramReport, MixedCoset, ScanOutcome};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("at {path}: {source}")]
    Invalid {
        path: String,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

impl JsonError {
    pub fn schema(path: &str, message: impl Into<String>) -> Self {
        JsonError::Schema { path: path.to_string(), message: message.into() }
    }

    pub fn invalid<E: std::error::Error + Send + Sync + 'static>(path: &str, source: E) -> Self {
        JsonError::Invalid { path: path.to_string(), source: Box::new(source) }
    }
}

pub fn bigint_to_json(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

pub fn bigint_from_json(v: &Value, path: &str) -> Result<BigInt, JsonError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(JsonError::schema(path, "expected an integer"))
            }
        }
        Value::String(s) => {
            s.parse().map_err(|_| JsonError::schema(path, format!("bad integer literal {s:?}")))
        }
        _ => Err(JsonError::schema(path, "expected an integer")),
    }
}

pub fn rational_to_json(q: &BigRational) -> Value {
    json!(format_rational(q))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<BigRational, JsonError> {
    match v {
        Value::String(s) => {
            parse_rational(s).ok_or_else(|| JsonError::schema(path, format!("bad rational {s:?}")))
        }
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                Err(JsonError::schema(path, "rationals must be strings like \"3/4\""))
            }
        }
        _ => Err(JsonError::schema(path, "expected a rational string")),
    }
}

fn int_vec_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(bigint_to_json).collect())
}

fn int_vec_from_json(v: &Value, path: &str) -> Result<Vec<BigInt>, JsonError> {
    let arr = v.as_array().ok_or_else(|| JsonError::schema(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| bigint_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

fn u64_vec_from_json(v: &Value, path: &str) -> Result<Vec<u64>, JsonError> {
    let arr = v.as_array().ok_or_else(|| JsonError::schema(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_u64().ok_or_else(|| {
                JsonError::schema(&format!("{path}[{i}]"), "expected a nonnegative integer")
            })
        })
        .collect()
}

fn field<'a>(v: &'a Value, name: &str, path: &str) -> Result<&'a Value, JsonError> {
    v.get(name).ok_or_else(|| JsonError::schema(path, format!("missing field {name:?}")))
}

pub fn subgroup_to_json(h: &LatticeSubgroup) -> Value {
    let rows: Vec<Value> = (0..h.rank()).map(|i| int_vec_to_json(h.basis().row(i))).collect();
    json!({ "r": h.ambient_rank(), "basis": rows })
}

pub fn subgroup_from_json(v: &Value, path: &str) -> Result<LatticeSubgroup, JsonError> {
    let r = field(v, "r", path)?
        .as_u64()
        .ok_or_else(|| JsonError::schema(path, "field \"r\" must be a positive integer"))?
        as usize;
    let basis = field(v, "basis", path)?;
    let rows_json =
        basis.as_array().ok_or_else(|| JsonError::schema(path, "\"basis\" must be an array"))?;
    let mut rows = Vec::new();
    for (i, row) in rows_json.iter().enumerate() {
        rows.push(int_vec_from_json(row, &format!("{path}.basis[{i}]"))?);
    }
    LatticeSubgroup::from_generator_rows(rows, r).map_err(|e| JsonError::invalid(path, e))
}

pub fn coset_to_json(c: &Coset) -> Value {
    json!({ "shift": int_vec_to_json(c.shift()), "subgroup": subgroup_to_json(c.subgroup()) })
}

pub fn coset_from_json(v: &Value, path: &str) -> Result<Coset, JsonError> {
    let shift = int_vec_from_json(field(v, "shift", path)?, &format!("{path}.shift"))?;
    let sub = subgroup_from_json(field(v, "subgroup", path)?, &format!("{path}.subgroup"))?;
    Coset::new(shift, sub).map_err(|e| JsonError::invalid(path, e))
}

pub fn set_expr_to_json(s: &SetExpr) -> Value {
    let (kind, u) = match s {
        SetExpr::Union(u) => ("union", u),
        SetExpr::Complement(u) => ("complement", u),
    };
    let pieces: Vec<Value> = u.pieces().iter().map(coset_to_json).collect();
    json!({ "kind": kind, "r": u.ambient_rank(), "pieces": pieces })
}

pub fn set_expr_from_json(v: &Value, path: &str) -> Result<SetExpr, JsonError> {
    let kind = field(v, "kind", path)?
        .as_str()
        .ok_or_else(|| JsonError::schema(path, "\"kind\" must be \"union\" or \"complement\""))?;
    let r = field(v, "r", path)?
        .as_u64()
        .ok_or_else(|| JsonError::schema(path, "field \"r\" must be a positive integer"))?
        as usize;
    let pieces_json = field(v, "pieces", path)?
        .as_array()
        .ok_or_else(|| JsonError::schema(path, "\"pieces\" must be an array"))?;
    let mut pieces = Vec::new();
    for (i, p) in pieces_json.iter().enumerate() {
        pieces.push(coset_from_json(p, &format!("{path}.pieces[{i}]"))?);
    }
    let union = CosetUnion::new(r, pieces).map_err(|e| JsonError::invalid(path, e))?;
    match kind {
        "union" => Ok(SetExpr::Union(union)),
        "complement" => Ok(SetExpr::Complement(union)),
        other => Err(JsonError::schema(path, format!("unknown kind {other:?}"))),
    }
}

pub fn group_spec_to_json(spec: &FiniteGroupSpec) -> Value {
    json!({ "invariants": spec.invariants() })
}

pub fn group_spec_from_json(v: &Value, path: &str) -> Result<FiniteGroupSpec, JsonError> {
    let inv = u64_vec_from_json(field(v, "invariants", path)?, &format!("{path}.invariants"))?;
    FiniteGroupSpec::new(inv).map_err(|e| JsonError::invalid(path, e))
}

pub fn cyclo_to_json(c: &CycloNumber) -> Value {
    if let Some((re, im)) = c.to_gaussian() {
        return json!({ "re": format_rational(&re), "im": format_rational(&im) });
    }
    let (nums, den) = c.coordinates();
    let coeffs: Vec<Value> = nums
        .iter()
        .map(|n| rational_to_json(&BigRational::new(n.clone(), den.clone())))
        .collect();
    json!({ "conductor": c.conductor(), "coeffs": coeffs })
}

pub fn cyclo_from_json(v: &Value, path: &str) -> Result<CycloNumber, JsonError> {
    if v.get("re").is_some() || v.get("im").is_some() {
        let re = match v.get("re") {
            Some(x) => rational_from_json(x, &format!("{path}.re"))?,
            None => BigRational::zero(),
        };
        let im = match v.get("im") {
            Some(x) => rational_from_json(x, &format!("{path}.im"))?,
            None => BigRational::zero(),
        };
        return Ok(CycloNumber::from_rational(4, &re)
            .add(&CycloNumber::imaginary_unit(4).mul(&CycloNumber::from_rational(4, &im))));
    }
    let conductor = field(v, "conductor", path)?
        .as_u64()
        .ok_or_else(|| JsonError::schema(path, "\"conductor\" must be a positive integer"))?;
    if conductor == 0 {
        return Err(JsonError::schema(path, "\"conductor\" must be a positive integer"));
    }
    let coeffs_json = field(v, "coeffs", path)?
        .as_array()
        .ok_or_else(|| JsonError::schema(path, "\"coeffs\" must be an array"))?;
    if coeffs_json.len() != euler_phi(conductor) as usize {
        return Err(JsonError::schema(
            path,
            format!("expected phi({conductor}) = {} coefficients", euler_phi(conductor)),
        ));
    }
    let mut acc = CycloNumber::zero(conductor);
    for (j, cj) in coeffs_json.iter().enumerate() {
        let q = rational_from_json(cj, &format!("{path}.coeffs[{j}]"))?;
        if q.is_zero() {
            continue;
        }
        let term = CycloNumber::from_rational(conductor, &q)
            .mul(&CycloNumber::root_of_unity(conductor, j as u64));
        acc = acc.add(&term);
    }
    Ok(acc)
}

fn phase_to_json(p: &Phase) -> Value {
    json!(format!("{p}"))
}

fn phase_from_json(v: &Value, path: &str) -> Result<Phase, JsonError> {
    Ok(Phase::new(rational_from_json(v, path)?))
}

pub fn trig_poly_to_json(p: &TrigPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(pt, c)| {
            let mut obj = Map::new();
            if let Value::Object(co) = cyclo_to_json(c) {
                obj.extend(co);
            }
            obj.insert("finite".into(), json!(pt.finite.0));
            obj.insert(
                "phases".into(),
                Value::Array(pt.torus.iter().map(phase_to_json).collect()),
            );
            Value::Object(obj)
        })
        .collect();
    json!({
        "invariants": p.spec().invariants(),
        "r": p.rank(),
        "terms": terms,
    })
}

pub fn trig_poly_from_json(v: &Value, path: &str) -> Result<TrigPoly, JsonError> {
    let spec = match v.get("invariants") {
        Some(inv) => FiniteGroupSpec::new(u64_vec_from_json(inv, &format!("{path}.invariants"))?)
            .map_err(|e| JsonError::invalid(path, e))?,
        None => FiniteGroupSpec::trivial(),
    };
    let r = field(v, "r", path)?
        .as_u64()
        .ok_or_else(|| JsonError::schema(path, "field \"r\" must be a nonnegative integer"))?
        as usize;
    let terms_json = field(v, "terms", path)?
        .as_array()
        .ok_or_else(|| JsonError::schema(path, "\"terms\" must be an array"))?;
    let mut terms = Vec::new();
    for (i, t) in terms_json.iter().enumerate() {
        let tpath = format!("{path}.terms[{i}]");
        let coeff = cyclo_from_json(t, &tpath)?;
        let finite = match t.get("finite") {
            Some(f) => FiniteElement(u64_vec_from_json(f, &format!("{tpath}.finite"))?),
            None => FiniteElement(Vec::new()),
        };
        let phases_json = field(t, "phases", &tpath)?
            .as_array()
            .ok_or_else(|| JsonError::schema(&tpath, "\"phases\" must be an array"))?;
        let mut torus = Vec::new();
        for (j, q) in phases_json.iter().enumerate() {
            torus.push(phase_from_json(q, &format!("{tpath}.phases[{j}]"))?);
        }
        terms.push((coeff, GroupPoint { finite, torus }));
    }
    TrigPoly::from_terms(spec, r, terms).map_err(|e| JsonError::invalid(path, e))
}

pub fn character_to_json(chi: &Character) -> Value {
    json!({ "char": chi.finite.0, "m": int_vec_to_json(&chi.torus) })
}

pub fn character_from_json(v: &Value, path: &str) -> Result<Character, JsonError> {
    let finite = FiniteCharacter(u64_vec_from_json(field(v, "char", path)?, &format!("{path}.char"))?);
    let torus = int_vec_from_json(field(v, "m", path)?, &format!("{path}.m"))?;
    Ok(Character { finite, torus })
}

pub fn slice_map_to_json(k: &DualSliceMap) -> Value {
    let slices: Vec<Value> = k
        .slices()
        .iter()
        .map(|(chi, set)| json!({ "char": chi.0, "set": set_expr_to_json(set) }))
        .collect();
    json!({
        "finiteDual": group_spec_to_json(k.spec()),
        "r": k.slices().first().map(|(_, s)| s.ambient_rank()).unwrap_or(1),
        "slices": slices,
    })
}

pub fn slice_map_from_json(v: &Value, path: &str) -> Result<DualSliceMap, JsonError> {
    let spec = group_spec_from_json(field(v, "finiteDual", path)?, &format!("{path}.finiteDual"))?;
    let r = field(v, "r", path)?
        .as_u64()
        .ok_or_else(|| JsonError::schema(path, "field \"r\" must be a positive integer"))?
        as usize;
    let slices_json = field(v, "slices", path)?
        .as_array()
        .ok_or_else(|| JsonError::schema(path, "\"slices\" must be an array"))?;
    let mut entries = Vec::new();
    for (i, s) in slices_json.iter().enumerate() {
        let spath = format!("{path}.slices[{i}]");
        let chi = FiniteCharacter(u64_vec_from_json(field(s, "char", &spath)?, &format!("{spath}.char"))?);
        let set = set_expr_from_json(field(s, "set", &spath)?, &format!("{spath}.set"))?;
        entries.push((chi, set));
    }
    DualSliceMap::new(spec, r, entries).map_err(|e| JsonError::invalid(path, e))
}

pub fn mixed_coset_to_json(c: &MixedCoset) -> Value {
    json!({
        "finiteDual": group_spec_to_json(&c.spec),
        "r": c.rank,
        "rep": character_to_json(&c.rep),
        "lattice": subgroup_to_json(&c.lattice),
        "index": bigint_to_json(&c.index()),
    })
}

pub fn mixed_coset_from_json(v: &Value, path: &str) -> Result<MixedCoset, JsonError> {
    let spec = group_spec_from_json(field(v, "finiteDual", path)?, &format!("{path}.finiteDual"))?;
    let rank = field(v, "r", path)?
        .as_u64()
        .ok_or_else(|| JsonError::schema(path, "field \"r\" must be an integer"))? as usize;
    let rep = character_from_json(field(v, "rep", path)?, &format!("{path}.rep"))?;
    let lattice = subgroup_from_json(field(v, "lattice", path)?, &format!("{path}.lattice"))?;
    Ok(MixedCoset { spec, rank, rep, lattice })
}

pub fn vanishing_vector_to_json(w: &VanishingVector) -> Value {
    let terms: Vec<Value> = w
        .terms
        .iter()
        .map(|(x, c)| json!({ "element": x.0, "coeff": cyclo_to_json(c) }))
        .collect();
    json!({ "invariants": w.spec.invariants(), "terms": terms })
}

pub fn ubiquity_verdict_to_json(v: &UbiquityVerdict) -> Value {
    match v {
        UbiquityVerdict::Ubiquitous => json!({ "verdict": "ubiquitous" }),
        UbiquityVerdict::NotUbiquitous { witness } => {
            json!({ "verdict": "not-ubiquitous", "witness": coset_to_json(witness) })
        }
    }
}

pub fn spd_verdict_to_json(v: &SpdVerdict) -> Value {
    match v {
        SpdVerdict::Spd => json!({ "verdict": "spd" }),
        SpdVerdict::NotSpd { witness } => {
            json!({ "verdict": "not-spd", "witness": coset_to_json(witness) })
        }
    }
}

pub fn gram_report_to_json(r: &GramReport) -> Value {
    json!({
        "size": r.size,
        "minEigenvalue": r.min_eigenvalue,
        "identityResidual": r.identity_residual,
    })
}

pub fn scan_outcome_to_json(s: &ScanOutcome) -> Value {
    match s {
        ScanOutcome::Refuted { witness } => {
            json!({ "verdict": "refuted", "witness": mixed_coset_to_json(witness) })
        }
        ScanOutcome::NoCounterexampleFound { max_index, radius, cosets_tested, unresolved } => {
            json!({
                "verdict": "no-counterexample-found",
                "bounds": { "maxIndex": max_index, "radius": radius },
                "cosetsTested": cosets_tested,
                "unresolved": unresolved.iter().map(mixed_coset_to_json).collect::<Vec<_>>(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vec_from_i64;

    #[test]
    fn subgroup_round_trip() {
        let h = LatticeSubgroup::from_i64_rows(&[&[2, 1], &[0, 3]], 2);
        let v = subgroup_to_json(&h);
        assert_eq!(v, serde_json::json!({ "r": 2, "basis": [[2, 1], [0, 3]] }));
        assert_eq!(subgroup_from_json(&v, "$").unwrap(), h);
    }

    #[test]
    fn bigint_beyond_i64_uses_strings() {
        let n: BigInt = "123456789012345678901234567890".parse().unwrap();
        let v = bigint_to_json(&n);
        assert!(v.is_string());
        assert_eq!(bigint_from_json(&v, "$").unwrap(), n);
    }

    #[test]
    fn set_expr_round_trip() {
        let two = LatticeSubgroup::from_i64_rows(&[&[2]], 1);
        let s = SetExpr::Complement(
            CosetUnion::new(1, vec![Coset::from_i64(&[1], two)]).unwrap(),
        );
        let v = set_expr_to_json(&s);
        assert_eq!(v["kind"], "complement");
        let back = set_expr_from_json(&v, "$").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn trig_poly_round_trip_gaussian() {
        let p = TrigPoly::torus_poly(1, &[(1, &[(1, 2)]), (-2, &[(0, 1)])]);
        let v = trig_poly_to_json(&p);
        let back = trig_poly_from_json(&v, "$").unwrap();
        assert_eq!(back, p);
        // coefficients appear as re/im strings
        let term = &v["terms"][0];
        assert!(term.get("re").is_some());
    }

    #[test]
    fn trig_poly_round_trip_cyclotomic_coeff() {
        // coefficient zeta_3 is not Gaussian: falls back to cyclo form
        let c = CycloNumber::root_of_unity(3, 1);
        let pt = GroupPoint::torus_only(vec![Phase::from_ratio(1, 3)]);
        let p = TrigPoly::from_terms(FiniteGroupSpec::trivial(), 1, vec![(c, pt)]).unwrap();
        let v = trig_poly_to_json(&p);
        let term = &v["terms"][0];
        assert_eq!(term["conductor"], 3);
        let back = trig_poly_from_json(&v, "$").unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn slice_map_round_trip() {
        let spec = FiniteGroupSpec::new(vec![2]).unwrap();
        let k = DualSliceMap::uniform(spec, 1, SetExpr::full(1)).unwrap();
        let v = slice_map_to_json(&k);
        let back = slice_map_from_json(&v, "$").unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let bad = serde_json::json!({ "r": 2, "basis": [[1, "x"]] });
        let err = subgroup_from_json(&bad, "$").unwrap_err().to_string();
        assert!(err.contains("$.basis[0][1]"), "error was: {err}");
    }

    #[test]
    fn character_round_trip() {
        let chi = Character {
            finite: FiniteCharacter(vec![1, 0]),
            torus: vec_from_i64(&[-3, 7]),
        };
        let v = character_to_json(&chi);
        assert_eq!(character_from_json(&v, "$").unwrap(), chi);
    }
}
