//! Command implementations: parse the JSON payload, run the decision or
//! harness, and assemble a self-contained response whose certificate the
//! `witness` command can re-verify.

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use spd_core::cosets::{spd_decide, ubiquity_decide, SetExpr, SpdVerdict, UbiquityVerdict};
use spd_core::json as j;
use spd_core::lattice::vec_from_i64;
use spd_core::product::{
    decide_main, product_non_spd_witness, set_vanishing_poly, staircase_check, DualSliceMap,
    StaircaseSet,
};
use spd_core::trigpoly::Character;
use spd_core::verify::{gram_report, ubiquity_scan, RealPoint, ScanOutcome, SpdFunction};
use spd_core::{FiniteElement, FiniteGroupSpec};

pub struct Params {
    pub max_index: u64,
    pub radius: i64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Params {
    fn to_json(&self) -> Value {
        json!({
            "maxIndex": self.max_index,
            "radius": self.radius,
            "tolerance": self.tolerance,
            "seed": self.seed,
        })
    }
}

pub struct Response {
    pub body: Value,
    pub exit: u8,
    pub text: Vec<String>,
}

fn parse_payload(payload: &str) -> Result<Value> {
    if payload.trim().is_empty() {
        return Ok(Value::Null);
    }
    serde_json::from_str(payload).context("payload is not valid JSON")
}

fn envelope(command: &str, params: &Params, input: &Value, fields: Vec<(&str, Value)>) -> Value {
    let mut obj = Map::new();
    obj.insert("command".into(), json!(command));
    obj.insert("parameters".into(), params.to_json());
    obj.insert("input".into(), input.clone());
    for (k, v) in fields {
        obj.insert(k.into(), v);
    }
    Value::Object(obj)
}

fn int_vec_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(j::bigint_to_json).collect())
}

enum DecideInput {
    Torus(SetExpr),
    Slices(DualSliceMap),
}

fn parse_decide_input(v: &Value) -> Result<DecideInput> {
    if v.get("finiteDual").is_some() {
        return Ok(DecideInput::Slices(j::slice_map_from_json(v, "$")?));
    }
    if v.get("kind").is_some() {
        return Ok(DecideInput::Torus(j::set_expr_from_json(v, "$")?));
    }
    if let Some(set) = v.get("set") {
        return Ok(DecideInput::Torus(j::set_expr_from_json(set, "$.set")?));
    }
    bail!("payload must be a set expression, {{\"set\": ...}}, or a slice map with \"finiteDual\"")
}

pub fn decide_ubiquity(payload: &str, params: &Params) -> Result<Response> {
    let input = parse_payload(payload)?;
    match parse_decide_input(&input)? {
        DecideInput::Torus(set) => {
            let verdict = ubiquity_decide(&set)?;
            let (word, cert, exit) = match &verdict {
                UbiquityVerdict::Ubiquitous => (
                    "ubiquitous",
                    json!({ "kind": "decision", "recheck": "re-run decide-ubiquity on the embedded input" }),
                    0u8,
                ),
                UbiquityVerdict::NotUbiquitous { witness } => (
                    "not-ubiquitous",
                    json!({ "kind": "disjoint-coset", "witness": j::coset_to_json(witness) }),
                    1u8,
                ),
            };
            let body = envelope(
                "decide-ubiquity",
                params,
                &input,
                vec![("verdict", json!(word)), ("certificate", cert)],
            );
            Ok(Response { body, exit, text: vec![format!("verdict: {word}")] })
        }
        DecideInput::Slices(k) => {
            let d = decide_main(&k)?;
            let per_slice: Vec<Value> = d
                .per_slice
                .iter()
                .map(|(chi, v)| json!({ "char": chi.0, "result": j::ubiquity_verdict_to_json(v) }))
                .collect();
            let (word, cert, exit) = match &d.witness {
                None => (
                    "ubiquitous",
                    json!({ "kind": "slice-decisions", "perSlice": per_slice }),
                    0u8,
                ),
                Some(w) => (
                    "not-ubiquitous",
                    json!({
                        "kind": "lifted-witness",
                        "witness": j::mixed_coset_to_json(w),
                        "perSlice": per_slice,
                    }),
                    1u8,
                ),
            };
            let body = envelope(
                "decide-ubiquity",
                params,
                &input,
                vec![("verdict", json!(word)), ("certificate", cert)],
            );
            Ok(Response { body, exit, text: vec![format!("verdict: {word}")] })
        }
    }
}

/// Past this index the complement-case polynomial certificate (a product
/// over all other cosets) is omitted; the disjoint coset alone certifies.
const POLY_CERT_INDEX_CAP: u64 = 64;

pub fn decide_spd(payload: &str, params: &Params) -> Result<Response> {
    let input = parse_payload(payload)?;
    match parse_decide_input(&input)? {
        DecideInput::Torus(set) => {
            let verdict = spd_decide(&set)?;
            match verdict {
                SpdVerdict::Spd => {
                    let body = envelope(
                        "decide-spd",
                        params,
                        &input,
                        vec![
                            ("verdict", json!("spd")),
                            (
                                "certificate",
                                json!({ "kind": "decision", "recheck": "re-run decide-spd on the embedded input" }),
                            ),
                        ],
                    );
                    Ok(Response { body, exit: 0, text: vec!["verdict: spd".into()] })
                }
                SpdVerdict::NotSpd { witness } => {
                    let mut cert = Map::new();
                    cert.insert("kind".into(), json!("vanishing-polynomial"));
                    cert.insert("witnessCoset".into(), j::coset_to_json(&witness));
                    let witness_index = witness
                        .subgroup()
                        .index()
                        .finite()
                        .and_then(|n| n.to_u64())
                        .unwrap_or(u64::MAX);
                    let small = match &set {
                        SetExpr::Union(_) => true,
                        SetExpr::Complement(_) => witness_index <= POLY_CERT_INDEX_CAP,
                    };
                    if small {
                        let (poly, at) = set_vanishing_poly(&set, &witness)?;
                        cert.insert("vanishingPolynomial".into(), j::trig_poly_to_json(&poly));
                        cert.insert("nonzeroAt".into(), int_vec_json(&at));
                    } else {
                        cert.insert("polynomialOmitted".into(), json!(true));
                        cert.insert(
                            "polynomialOmittedReason".into(),
                            json!(format!("witness index {witness_index} above cap {POLY_CERT_INDEX_CAP}")),
                        );
                    }
                    let body = envelope(
                        "decide-spd",
                        params,
                        &input,
                        vec![("verdict", json!("not-spd")), ("certificate", Value::Object(cert))],
                    );
                    Ok(Response { body, exit: 1, text: vec!["verdict: not-spd".into()] })
                }
            }
        }
        DecideInput::Slices(k) => {
            let d = decide_main(&k)?;
            let per_slice: Vec<Value> = d
                .per_slice
                .iter()
                .map(|(chi, v)| json!({ "char": chi.0, "result": j::ubiquity_verdict_to_json(v) }))
                .collect();
            if d.spd {
                let body = envelope(
                    "decide-spd",
                    params,
                    &input,
                    vec![
                        ("verdict", json!("spd")),
                        ("certificate", json!({ "kind": "slice-decisions", "perSlice": per_slice })),
                    ],
                );
                return Ok(Response { body, exit: 0, text: vec!["verdict: spd".into()] });
            }
            let w = d.witness.expect("negative decision carries a witness");
            let mut cert = Map::new();
            cert.insert("kind".into(), json!("product-vanishing-polynomial"));
            cert.insert("witness".into(), j::mixed_coset_to_json(&w));
            cert.insert("perSlice".into(), Value::Array(per_slice));
            if let Some(pw) = product_non_spd_witness(&k)? {
                cert.insert("vanishingPolynomial".into(), j::trig_poly_to_json(&pw.poly));
                cert.insert("nonzeroAt".into(), j::character_to_json(&pw.nonzero_at));
                cert.insert("failingSlice".into(), json!(pw.failing_slice.0));
            }
            let body = envelope(
                "decide-spd",
                params,
                &input,
                vec![("verdict", json!("not-spd")), ("certificate", Value::Object(cert))],
            );
            Ok(Response { body, exit: 1, text: vec!["verdict: not-spd".into()] })
        }
    }
}

pub fn zero_set(payload: &str, params: &Params) -> Result<Response> {
    let input = parse_payload(payload)?;
    let poly_json = input.get("poly").unwrap_or(&input);
    let poly = j::trig_poly_from_json(poly_json, "$")?;
    let z = poly.zero_set()?;
    let body = envelope(
        "zero-set",
        params,
        &input,
        vec![("verdict", json!("computed")), ("zeroSet", j::set_expr_to_json(&SetExpr::Union(z.clone())))],
    );
    let text = vec![format!("zero set: {} coset piece(s)", z.pieces().len())];
    Ok(Response { body, exit: 0, text })
}

pub fn scan(payload: &str, params: &Params) -> Result<Response> {
    let input = parse_payload(payload)?;
    let outcome = if input.get("finiteDual").is_some() {
        let k = j::slice_map_from_json(&input, "$")?;
        ubiquity_scan(&k, params.max_index, params.radius)
    } else {
        match input.get("kind").and_then(Value::as_str) {
            Some("staircase") => ubiquity_scan(&StaircaseSet, params.max_index, params.radius),
            Some("slices") => {
                let map = input
                    .get("map")
                    .ok_or_else(|| anyhow!("\"slices\" scans need a \"map\" field"))?;
                let k = j::slice_map_from_json(map, "$.map")?;
                ubiquity_scan(&k, params.max_index, params.radius)
            }
            _ => bail!("scan payload must be a slice map or {{\"kind\": \"staircase\"}}"),
        }
    };
    let (word, exit) = match &outcome {
        ScanOutcome::Refuted { .. } => ("refuted", 1u8),
        ScanOutcome::NoCounterexampleFound { .. } => ("no-counterexample-found", 2u8),
    };
    let body = envelope(
        "scan",
        params,
        &input,
        vec![("verdict", json!(word)), ("outcome", j::scan_outcome_to_json(&outcome))],
    );
    Ok(Response { body, exit, text: vec![format!("scan: {word}")] })
}

fn f64_from_json(v: &Value, what: &str) -> Result<f64> {
    if let Some(x) = v.as_f64() {
        return Ok(x);
    }
    if let Some(s) = v.as_str() {
        let q = spd_core::phase::parse_rational(s)
            .ok_or_else(|| anyhow!("{what}: bad rational {s:?}"))?;
        let n = q.numer().to_f64().ok_or_else(|| anyhow!("{what}: out of range"))?;
        let d = q.denom().to_f64().ok_or_else(|| anyhow!("{what}: out of range"))?;
        return Ok(n / d);
    }
    bail!("{what}: expected a number")
}

pub fn synth_verify(payload: &str, params: &Params) -> Result<Response> {
    let input = parse_payload(payload)?;
    let spec = match input.get("invariants") {
        Some(inv) => {
            let list = inv
                .as_array()
                .ok_or_else(|| anyhow!("\"invariants\" must be an array"))?
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| anyhow!("bad invariant")))
                .collect::<Result<Vec<u64>>>()?;
            FiniteGroupSpec::new(list)?
        }
        None => FiniteGroupSpec::trivial(),
    };
    let rank = input
        .get("r")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("missing torus rank \"r\""))? as usize;
    let support_json = input
        .get("support")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"support\" array"))?;
    let support: Vec<Character> = support_json
        .iter()
        .enumerate()
        .map(|(i, s)| Ok(j::character_from_json(s, &format!("$.support[{i}]"))?))
        .collect::<Result<_>>()?;
    let weights_json = input
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"weights\" array"))?;
    let weights: Vec<f64> = weights_json
        .iter()
        .enumerate()
        .map(|(i, w)| f64_from_json(w, &format!("$.weights[{i}]")))
        .collect::<Result<_>>()?;
    let points_json = input
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"points\" array"))?;
    let mut points = Vec::new();
    for (i, p) in points_json.iter().enumerate() {
        let finite = match p.get("finite") {
            Some(f) => FiniteElement(
                f.as_array()
                    .ok_or_else(|| anyhow!("$.points[{i}].finite must be an array"))?
                    .iter()
                    .map(|x| x.as_u64().ok_or_else(|| anyhow!("bad residue")))
                    .collect::<Result<Vec<u64>>>()?,
            ),
            None => FiniteElement(Vec::new()),
        };
        let torus = p
            .get("torus")
            .and_then(Value::as_array)
            .ok_or_else(|| anyhow!("$.points[{i}].torus must be an array"))?
            .iter()
            .map(|x| f64_from_json(x, &format!("$.points[{i}].torus")))
            .collect::<Result<Vec<f64>>>()?;
        points.push(RealPoint { finite, torus });
    }
    let trials = input.get("trials").and_then(Value::as_u64).unwrap_or(100) as usize;

    let f = SpdFunction::synth(spec, rank, support, weights)?;
    let report = gram_report(&f, &points, trials, params.seed)?;
    let ok = report.min_eigenvalue >= -params.tolerance && report.identity_residual < params.tolerance;
    let word = if ok { "verified" } else { "failed" };
    let body = envelope(
        "synth-verify",
        params,
        &input,
        vec![("verdict", json!(word)), ("report", j::gram_report_to_json(&report))],
    );
    let text = vec![
        format!("verdict: {word}"),
        format!("min eigenvalue: {:.3e}", report.min_eigenvalue),
        format!("identity residual: {:.3e}", report.identity_residual),
    ];
    Ok(Response { body, exit: if ok { 0 } else { 1 }, text })
}

pub fn staircase(payload: &str, params: &Params) -> Result<Response> {
    let input = parse_payload(payload)?;
    let n = input.get("n").and_then(Value::as_u64).unwrap_or(20);
    let report = staircase_check(n, params.max_index, params.radius)?;
    let refuted = report.product_scan.is_refuted()
        || report.swapped_scans.iter().any(|(_, s)| s.is_refuted());
    let swapped: Vec<Value> = report
        .swapped_scans
        .iter()
        .map(|(m, s)| json!({ "m": m, "outcome": j::scan_outcome_to_json(s) }))
        .collect();
    let word = if refuted { "refuted" } else { "no-counterexample-found" };
    let body = envelope(
        "staircase",
        params,
        &input,
        vec![
            ("verdict", json!(word)),
            (
                "report",
                json!({
                    "truncation": report.truncation,
                    "finiteSlices": report.finite_slices,
                    "k1Empty": report.k1_empty,
                    "exactNotSpdConfirmed": report.exact_not_spd_confirmed,
                    "productScan": j::scan_outcome_to_json(&report.product_scan),
                    "swappedScans": swapped,
                }),
            ),
        ],
    );
    let text = vec![
        format!("first-orientation K1 empty: {}", report.k1_empty),
        format!("product scan: {word}"),
    ];
    Ok(Response { body, exit: if refuted { 1 } else { 2 }, text })
}

// ---------------------------------------------------------------------------
// witness: re-verify a previously emitted response
// ---------------------------------------------------------------------------

fn enumerate_box(r: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for prefix in &out {
            for x in lo..=hi {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Up to `quota` points of the set, for spot-checking that polynomials
/// vanish on it.
fn sample_set_points(set: &SetExpr, quota: usize) -> Result<Vec<Vec<BigInt>>> {
    let r = set.ambient_rank();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    match set {
        SetExpr::Union(u) => {
            for piece in u.pieces() {
                let s = piece.subgroup().rank();
                for c in enumerate_box(s, -2, 2) {
                    let cb = vec_from_i64(&c);
                    let offset = piece.subgroup().basis().left_mul(&cb)?;
                    let pt: Vec<BigInt> =
                        piece.shift().iter().zip(&offset).map(|(a, b)| a + b).collect();
                    if !out.contains(&pt) {
                        out.push(pt);
                    }
                    if out.len() >= quota {
                        return Ok(out);
                    }
                }
            }
        }
        SetExpr::Complement(_) => {
            for v in enumerate_box(r, -6, 6) {
                let pt = vec_from_i64(&v);
                if set.contains(&pt)? {
                    out.push(pt);
                    if out.len() >= quota {
                        break;
                    }
                }
            }
        }
    }
    Ok(out)
}

struct Checks {
    notes: Vec<String>,
    ok: bool,
}

impl Checks {
    fn new() -> Self {
        Checks { notes: Vec::new(), ok: true }
    }

    fn require(&mut self, cond: bool, what: &str) {
        if cond {
            self.notes.push(format!("ok: {what}"));
        } else {
            self.notes.push(format!("FAILED: {what}"));
            self.ok = false;
        }
    }
}

fn verify_torus_negative(
    set: &SetExpr,
    cert: &Value,
    checks: &mut Checks,
) -> Result<()> {
    let witness_field = cert.get("witness").or_else(|| cert.get("witnessCoset"));
    let Some(wv) = witness_field else {
        checks.require(false, "certificate carries a witness coset");
        return Ok(());
    };
    let witness = j::coset_from_json(wv, "$.certificate.witness")?;
    checks.require(witness.subgroup().index().is_finite(), "witness subgroup has finite index");
    checks.require(set.disjoint_from(&witness)?, "witness coset is disjoint from the set (exact)");
    if let Some(pv) = cert.get("vanishingPolynomial") {
        let poly = j::trig_poly_from_json(pv, "$.certificate.vanishingPolynomial")?;
        checks.require(!poly.is_zero(), "vanishing polynomial is nonzero");
        if let Some(at) = cert.get("nonzeroAt") {
            let pt: Vec<BigInt> = at
                .as_array()
                .ok_or_else(|| anyhow!("nonzeroAt must be an array"))?
                .iter()
                .enumerate()
                .map(|(i, x)| Ok(j::bigint_from_json(x, &format!("$.certificate.nonzeroAt[{i}]"))?))
                .collect::<Result<_>>()?;
            let val = poly.eval(&Character::torus_only(pt))?;
            checks.require(!val.is_zero(), "polynomial is nonzero at the certificate point (exact)");
        }
        let samples = sample_set_points(set, 50)?;
        let mut all_zero = true;
        for s in &samples {
            if !poly.eval(&Character::torus_only(s.clone()))?.is_zero() {
                all_zero = false;
                break;
            }
        }
        checks.require(
            all_zero,
            &format!("polynomial vanishes on {} sampled points of the set (exact)", samples.len()),
        );
    }
    Ok(())
}

fn verify_slices_negative(
    k: &DualSliceMap,
    cert: &Value,
    checks: &mut Checks,
) -> Result<()> {
    let Some(wv) = cert.get("witness") else {
        checks.require(false, "certificate carries a lifted witness coset");
        return Ok(());
    };
    let witness = j::mixed_coset_from_json(wv, "$.certificate.witness")?;
    checks.require(witness.lattice.index().is_finite(), "witness subgroup has finite index");
    let mut disjoint = true;
    for (phi, section) in witness.torus_sections()? {
        if let Some(coset) = section {
            if !k.slice(&phi)?.disjoint_from(&coset)? {
                disjoint = false;
            }
        }
    }
    checks.require(disjoint, "lifted witness coset is disjoint from every slice (exact)");
    if let Some(pv) = cert.get("vanishingPolynomial") {
        let poly = j::trig_poly_from_json(pv, "$.certificate.vanishingPolynomial")?;
        checks.require(!poly.is_zero(), "vanishing polynomial is nonzero");
        if let Some(at) = cert.get("nonzeroAt") {
            let chi = j::character_from_json(at, "$.certificate.nonzeroAt")?;
            checks.require(
                !poly.eval(&chi)?.is_zero(),
                "polynomial is nonzero at the certificate character (exact)",
            );
        }
        // vanish on sampled points of K across all slices
        let mut all_zero = true;
        let mut sampled = 0;
        for (phi, set) in k.slices() {
            for s in sample_set_points(set, 12)? {
                let chi = Character { finite: phi.clone(), torus: s };
                if !poly.eval(&chi)?.is_zero() {
                    all_zero = false;
                }
                sampled += 1;
            }
        }
        checks.require(
            all_zero,
            &format!("polynomial vanishes on {sampled} sampled characters of the set (exact)"),
        );
    }
    Ok(())
}

pub fn witness(payload: &str, params: &Params) -> Result<Response> {
    let response = parse_payload(payload)?;
    let command = response
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("payload is not a response envelope (missing \"command\")"))?;
    let input = response.get("input").cloned().unwrap_or(Value::Null);
    let verdict = response.get("verdict").and_then(Value::as_str).unwrap_or("");
    let cert = response.get("certificate").cloned().unwrap_or(Value::Null);
    let mut checks = Checks::new();

    match command {
        "decide-ubiquity" | "decide-spd" => match parse_decide_input(&input)? {
            DecideInput::Torus(set) => {
                let negative = verdict == "not-ubiquitous" || verdict == "not-spd";
                if negative {
                    verify_torus_negative(&set, &cert, &mut checks)?;
                } else {
                    let again = ubiquity_decide(&set)?;
                    checks.require(again.is_ubiquitous(), "re-decision confirms the positive verdict");
                }
            }
            DecideInput::Slices(k) => {
                let negative = verdict == "not-ubiquitous" || verdict == "not-spd";
                if negative {
                    verify_slices_negative(&k, &cert, &mut checks)?;
                } else {
                    let again = decide_main(&k)?;
                    checks.require(again.ubiquitous, "re-decision confirms the positive verdict");
                }
            }
        },
        "scan" => {
            if verdict == "refuted" {
                let outcome = response
                    .get("outcome")
                    .ok_or_else(|| anyhow!("scan response lacks \"outcome\""))?;
                let wv = outcome
                    .get("witness")
                    .ok_or_else(|| anyhow!("refuted scan lacks a witness"))?;
                let witness = j::mixed_coset_from_json(wv, "$.outcome.witness")?;
                if input.get("finiteDual").is_some() {
                    let k = j::slice_map_from_json(&input, "$")?;
                    let mut disjoint = true;
                    for (phi, section) in witness.torus_sections()? {
                        if let Some(coset) = section {
                            if !k.slice(&phi)?.disjoint_from(&coset)? {
                                disjoint = false;
                            }
                        }
                    }
                    checks.require(disjoint, "refutation coset is disjoint from the set (exact)");
                } else {
                    checks.require(
                        false,
                        "refutations are only exactly re-verifiable for slice-map inputs",
                    );
                }
            } else {
                let rerun = scan(&serde_json::to_string(&input)?, params)?;
                checks.require(
                    rerun.body.get("verdict") == response.get("verdict"),
                    "re-running the scan reproduces the verdict",
                );
            }
        }
        "zero-set" => {
            let poly_json = input.get("poly").unwrap_or(&input);
            let poly = j::trig_poly_from_json(poly_json, "$.input")?;
            let claimed = j::set_expr_from_json(
                response.get("zeroSet").ok_or_else(|| anyhow!("missing \"zeroSet\""))?,
                "$.zeroSet",
            )?;
            // both inclusions on a box around the origin
            let r = claimed.ambient_rank();
            let mut both = true;
            for v in enumerate_box(r, -8, 8) {
                let pt = vec_from_i64(&v);
                let in_set = claimed.contains(&pt)?;
                let vanishes = poly.eval(&Character::torus_only(pt))?.is_zero();
                if in_set != vanishes {
                    both = false;
                    break;
                }
            }
            checks.require(both, "claimed zero set matches exact evaluation on a test box");
        }
        "synth-verify" => {
            let rerun = synth_verify(&serde_json::to_string(&input)?, params)?;
            checks.require(
                rerun.body.get("verdict") == response.get("verdict"),
                "re-running the harness reproduces the verdict",
            );
        }
        "staircase" => {
            let rerun = staircase(&serde_json::to_string(&input)?, params)?;
            checks.require(
                rerun.body.get("verdict") == response.get("verdict"),
                "re-running the staircase checks reproduces the verdict",
            );
        }
        other => bail!("cannot re-verify responses of command {other:?}"),
    }

    let ok = checks.ok;
    let body = envelope(
        "witness",
        params,
        &response,
        vec![
            ("verdict", json!(if ok { "verified" } else { "failed" })),
            ("checks", json!(checks.notes)),
        ],
    );
    let mut text = vec![format!("witness: {}", if ok { "verified" } else { "failed" })];
    text.extend(checks.notes.iter().cloned());
    Ok(Response { body, exit: if ok { 0 } else { 1 }, text })
}
