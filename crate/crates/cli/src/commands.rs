use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use twistlab_core::builders::{
    build_almost_null, build_derivation_tower, build_dual_square, build_ore,
    build_truncated_derivation, DerivSpec, EndoSpec,
};
use twistlab_core::dual::{
    build_c_matrix, c_entry, classify_dual, even_column_relation, identity_endpoints,
    identity_lower_shift, identity_same_top, solve_c, systems_equivalent_check, to_alpha_view,
    verify_iota_axioms, DualBranch, DualVerdict, IotaPair,
};
use twistlab_core::planes::{classify_almost_null, detect_obstruction, ConditionBreakdown, PlaneVerdict, ShiftParams};
use twistlab_core::schema::{
    as_str, base_from_json, bipoly_from_json, child, family_from_json, family_to_json, field,
    opt_field, opt_usize, poly_from_json, report_to_json, ring_field, schema_error,
    series_to_json, usize_field, value_to_json, witness_from_json, bipoly_to_json,
};
use twistlab_core::series::{build_series, build_series_tower, replay_series, verify_series, TruncatedAlphaFamily};
use twistlab_core::twist::{replay, verify_axioms, AlphaFamily, Base, Focus, Status, VerificationReport, VerifyParams};
use twistlab_core::{BiPoly, Error, Poly, RingDescriptor, RingValue, Result};

use crate::{Command, Outcome, EXIT_OK, EXIT_REFUTED, EXIT_UNKNOWN};

const P: &str = "$.params";
const DEFAULT_DEGREE: usize = 10;
const DEFAULT_SEED: u64 = 20240601;

pub fn dispatch(cmd: Command, params: &Value) -> Result<Outcome> {
    if !params.is_object() {
        return Err(schema_error(P, "expected an object"));
    }
    match cmd {
        Command::Build => build(params),
        Command::Verify => verify(params),
        Command::ClassifyPlane => classify_plane(params),
        Command::ClassifyDual => classify_dual_job(params),
        Command::RankTable => rank_table(params),
        Command::Identities => identities(params),
    }
}

fn degree(params: &Value) -> Result<usize> {
    Ok(opt_usize(params, P, "N")?
        .or(opt_usize(params, P, "degree")?)
        .unwrap_or(DEFAULT_DEGREE))
}

fn seed(params: &Value) -> Result<u64> {
    match opt_field(params, "seed") {
        None => Ok(DEFAULT_SEED),
        Some(s) => s
            .as_u64()
            .ok_or_else(|| schema_error(&child(P, "seed"), "expected a non-negative integer")),
    }
}

fn flag(params: &Value, key: &str) -> Result<bool> {
    match opt_field(params, key) {
        None => Ok(false),
        Some(Value::Bool(b)) => Ok(*b),
        Some(_) => Err(schema_error(&child(P, key), "expected a boolean")),
    }
}

fn exit_for(status: &Status) -> i32 {
    match status {
        Status::Verified => EXIT_OK,
        Status::Refuted => EXIT_REFUTED,
        Status::Inconclusive => EXIT_UNKNOWN,
    }
}

fn report_lines(label: &str, r: &VerificationReport) -> Vec<String> {
    let mut lines = vec![format!("{label}: {} (degree bound {}, {} checks)", r.status, r.degree_bound, r.checks)];
    if let Some(h) = &r.hypothesis {
        lines.push(format!("  under hypothesis: {h}"));
    }
    if let Some(w) = &r.witness {
        lines.push(format!("  witness: {}", w.describe()));
    }
    if let Some(n) = &r.note {
        lines.push(format!("  note: {n}"));
    }
    lines
}

fn poly_param(ring: RingDescriptor, params: &Value, key: &str) -> Result<Poly> {
    poly_from_json(ring, field(params, P, key)?, &child(P, key))
}

fn matrix_param(ring: RingDescriptor, params: &Value) -> Result<BiPoly> {
    let key = if opt_field(params, "a").is_some() { "a" } else { "q" };
    bipoly_from_json(ring, field(params, P, key)?, &child(P, key))
}

fn base_param(params: &Value) -> Result<Base> {
    match opt_field(params, "base") {
        Some(b) => base_from_json(b, &child(P, "base")),
        None => Ok(Base::PolyX),
    }
}

fn betas_param(params: &Value, alpha: &EndoSpec) -> Result<BTreeMap<usize, DerivSpec>> {
    let mut out = BTreeMap::new();
    let Some(b) = opt_field(params, "betas") else {
        return Ok(out);
    };
    let path = child(P, "betas");
    let obj = b
        .as_object()
        .ok_or_else(|| schema_error(&path, "expected an object of index → image"))?;
    for (k, img) in obj {
        let kp = child(&path, k);
        let i: usize = k
            .parse()
            .ok()
            .filter(|&i| i >= 1)
            .ok_or_else(|| schema_error(&kp, "derivation indices must be positive integers"))?;
        let image = poly_from_json(alpha.ring(), img, &kp)?;
        let psi = alpha.power(i as i64 + 1)?;
        out.insert(i, DerivSpec::new(alpha.clone(), psi, image)?);
    }
    Ok(out)
}

enum Built {
    Poly(AlphaFamily),
    Series(TruncatedAlphaFamily),
}

fn build(params: &Value) -> Result<Outcome> {
    let kind = as_str(field(params, P, "kind")?, &child(P, "kind"))?;
    let ring = ring_field(params, P)?;
    let n_check = degree(params)?;
    let mut extra = serde_json::Map::new();
    let built = match kind {
        "ore" => {
            let base = base_param(params)?;
            let alpha = EndoSpec::new(base, poly_param(ring, params, "alpha")?)?;
            let id = EndoSpec::identity(base, ring);
            let delta = DerivSpec::new(alpha.clone(), id, poly_param(ring, params, "delta")?)?;
            Built::Poly(build_ore(&alpha, &delta)?)
        }
        "almost_null" => Built::Poly(build_almost_null(&matrix_param(ring, params)?)?),
        "tower" => {
            let base = base_param(params)?;
            let alpha = EndoSpec::new(base, poly_param(ring, params, "alpha")?)?;
            let betas = betas_param(params, &alpha)?;
            let j_max = opt_usize(params, P, "j_max")?.unwrap_or(n_check);
            let bound = opt_usize(params, P, "bound")?.unwrap_or(n_check);
            let (fam, rep) = build_derivation_tower(&alpha, &betas, j_max, bound)?;
            extra.insert(
                "tower".into(),
                json!({ "exact_bound": rep.exact_bound, "checked_bound": rep.checked_bound }),
            );
            Built::Poly(fam)
        }
        "dual_square" => Built::Poly(build_dual_square(ring)),
        "truncated_derivation" => {
            Built::Poly(build_truncated_derivation(ring, usize_field(params, P, "n")?)?)
        }
        "series" => {
            let a = matrix_param(ring, params)?;
            Built::Series(build_series(&a, usize_field(params, P, "nx")?, usize_field(params, P, "ny")?)?)
        }
        "series_tower" => {
            let base = base_param(params)?;
            let alpha = EndoSpec::new(base, poly_param(ring, params, "alpha")?)?;
            let betas = betas_param(params, &alpha)?;
            let ny = usize_field(params, P, "ny")?;
            let bound = opt_usize(params, P, "bound")?.unwrap_or(n_check);
            Built::Series(build_series_tower(&alpha, &betas, ny, bound)?)
        }
        other => {
            return Err(schema_error(
                &child(P, "kind"),
                format!(
                    "unknown kind {other:?}; expected ore, almost_null, tower, dual_square, truncated_derivation, series or series_tower"
                ),
            ))
        }
    };
    let (family, report) = match &built {
        Built::Poly(f) => (family_to_json(f), verify_axioms(f, &VerifyParams::new(n_check))),
        Built::Series(f) => {
            let (nx, ny) = f.orders();
            (series_to_json(f), verify_series(f, nx, ny))
        }
    };
    let mut lines = vec![format!("built {kind}")];
    lines.extend(report_lines("verification", &report));
    let mut body = json!({
        "kind": kind,
        "status": report.status.to_string(),
        "family": family,
        "report": report_to_json(&report),
    });
    for (k, v) in extra {
        body[k] = v;
    }
    Ok(Outcome {
        exit: exit_for(&report.status),
        report: body,
        lines,
    })
}

/// Applies `"mutate": [{"j", "n", "value"}]` to a family's tables.
fn mutations(ring: RingDescriptor, params: &Value) -> Result<Vec<(usize, usize, Poly)>> {
    let Some(m) = opt_field(params, "mutate") else {
        return Ok(Vec::new());
    };
    let path = child(P, "mutate");
    let arr = m.as_array().ok_or_else(|| schema_error(&path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(k, e)| {
            let p = format!("{path}[{k}]");
            Ok((
                usize_field(e, &p, "j")?,
                usize_field(e, &p, "n")?,
                poly_from_json(ring, field(e, &p, "value")?, &child(&p, "value"))?,
            ))
        })
        .collect()
}

fn verify(params: &Value) -> Result<Outcome> {
    let ring = ring_field(params, P)?;
    let edits = mutations(ring, params)?;
    let witness = opt_field(params, "witness")
        .map(|w| witness_from_json(ring, w, &child(P, "witness")))
        .transpose()?;
    if flag(params, "series")? {
        let a = matrix_param(ring, params)?;
        let nx = usize_field(params, P, "nx")?;
        let ny = usize_field(params, P, "ny")?;
        let mut fam = build_series(&a, nx, ny)?;
        for (j, n, p) in &edits {
            fam.set_cell(*j, *n, p.clone());
        }
        if let Some(w) = witness {
            let reproduced = replay_series(&fam, &w)?;
            return Ok(replay_outcome(reproduced, &w, series_to_json(&fam)));
        }
        let report = verify_series(&fam, nx, ny);
        return Ok(verify_outcome(report, series_to_json(&fam)));
    }
    let mut fam = family_from_json(params, P)?;
    for (j, n, p) in &edits {
        fam.set_cell(*j, *n, p.clone());
    }
    let mut vp = VerifyParams::new(degree(params)?);
    vp.y_cap = opt_usize(params, P, "y_cap")?;
    if let Some(f) = opt_field(params, "focus") {
        let fp = child(P, "focus");
        vp.focus = Some(Focus {
            j: usize_field(f, &fp, "j")?,
            u: usize_field(f, &fp, "u")?,
            v: usize_field(f, &fp, "v")?,
        });
    }
    if let Some(w) = witness {
        let reproduced = replay(&fam, &w, &vp)?;
        return Ok(replay_outcome(reproduced, &w, family_to_json(&fam)));
    }
    let report = verify_axioms(&fam, &vp);
    Ok(verify_outcome(report, family_to_json(&fam)))
}

fn verify_outcome(report: VerificationReport, family: Value) -> Outcome {
    Outcome {
        exit: exit_for(&report.status),
        lines: report_lines("verification", &report),
        report: json!({
            "status": report.status.to_string(),
            "family": family,
            "report": report_to_json(&report),
        }),
    }
}

fn replay_outcome(reproduced: bool, w: &twistlab_core::twist::Witness, family: Value) -> Outcome {
    let status = if reproduced { "Refuted" } else { "NotReproduced" };
    Outcome {
        exit: if reproduced { EXIT_REFUTED } else { EXIT_OK },
        lines: vec![format!("replay of \"{}\": {status}", w.describe())],
        report: json!({
            "status": status,
            "family": family,
            "witness": twistlab_core::schema::witness_to_json(w),
        }),
    }
}

fn shift_json(p: &ShiftParams) -> Value {
    json!({ "lambda": value_to_json(&p.lambda), "xi": value_to_json(&p.xi) })
}

fn breakdown_json(b: &ConditionBreakdown) -> Value {
    json!({
        "holds": b.holds,
        "advisory": b.advisory,
        "clauses": b.clauses.iter().map(|c| json!({
            "name": c.name, "holds": c.holds, "value": c.value,
        })).collect::<Vec<_>>(),
    })
}

fn classify_plane(params: &Value) -> Result<Outcome> {
    let ring = ring_field(params, P)?;
    let q = matrix_param(ring, params)?;
    let n = degree(params)?;
    let cls = classify_almost_null(&q)?;
    let mut body = json!({
        "verdict": cls.verdict.name(),
        "candidates": cls.candidates.iter().map(|c| json!({
            "params": shift_json(&c.params),
            "condition_a": breakdown_json(&c.condition_a),
            "condition_b": breakdown_json(&c.condition_b),
        })).collect::<Vec<_>>(),
    });
    let mut lines = vec![format!("verdict: {}", cls.verdict.name())];
    let exit = match &cls.verdict {
        PlaneVerdict::AlmostNull { params: sp, shifted } => {
            body["params"] = shift_json(sp);
            body["shifted"] = bipoly_to_json(shifted);
            lines.push(format!("  shift lambda = {}, xi = {}", sp.lambda, sp.xi));
            lines.push(format!("  shifted matrix: {shifted}"));
            EXIT_OK
        }
        PlaneVerdict::ObstructedUpper(sp) | PlaneVerdict::ObstructedLower(sp) => {
            body["params"] = shift_json(sp);
            let upper = matches!(cls.verdict, PlaneVerdict::ObstructedUpper(_));
            let target = if upper { q.clone() } else { q.swap() };
            let rep = detect_obstruction(&target, n);
            body["obstruction"] = report_to_json(&rep);
            body["obstruction_matrix"] = json!(if upper { "q" } else { "transpose of q" });
            lines.push(format!("  shift lambda = {}, xi = {}", sp.lambda, sp.xi));
            lines.extend(report_lines("  obstruction search", &rep));
            EXIT_REFUTED
        }
        PlaneVerdict::Unknown => EXIT_UNKNOWN,
    };
    body["status"] = json!(cls.verdict.name());
    Ok(Outcome { exit, report: body, lines })
}

fn classify_dual_job(params: &Value) -> Result<Outcome> {
    let ring = ring_field(params, P)?;
    let p = poly_param(ring, params, "P")?;
    let q = poly_param(ring, params, "Q")?;
    let n = degree(params)?;
    let verdict = classify_dual(&p, &q);
    let iota = verify_iota_axioms(&IotaPair::new(p.clone(), q.clone())?, n);
    let mut body = json!({
        "P": p.display_with("Y"),
        "Q": q.display_with("Y"),
        "iota_report": report_to_json(&iota),
    });
    let mut lines = Vec::new();
    let exit = match &verdict {
        DualVerdict::Valid(branch) => {
            let (name, extra) = match branch {
                DualBranch::ZeroQ => ("ZeroQ", json!({})),
                DualBranch::EvenQ => ("EvenQ", json!({})),
                DualBranch::Shifted { p0, m_even } => {
                    ("Shifted", json!({ "p0": value_to_json(p0), "m_even": m_even }))
                }
            };
            body["status"] = json!("Valid");
            body["branch"] = json!(name);
            body["branch_data"] = extra;
            let fam = to_alpha_view(&p, &q)?;
            let rep = verify_axioms(&fam, &VerifyParams::new(n));
            body["alpha_view"] = family_to_json(&fam);
            body["alpha_view_report"] = report_to_json(&rep);
            lines.push(format!("verdict: Valid ({name})"));
            lines.extend(report_lines("iota checks", &iota));
            lines.extend(report_lines("alpha view", &rep));
            if iota.is_refuted() || rep.is_refuted() {
                return Err(Error::InternalMismatch(
                    "closed-form classification disagrees with the direct checks".into(),
                ));
            }
            EXIT_OK
        }
        DualVerdict::Invalid(why) => {
            body["status"] = json!("Invalid");
            body["reason"] = json!(why);
            lines.push(format!("verdict: Invalid ({why})"));
            lines.extend(report_lines("iota checks", &iota));
            EXIT_REFUTED
        }
    };
    Ok(Outcome { exit, report: body, lines })
}

fn rank_table(params: &Value) -> Result<Outcome> {
    let m_min = opt_usize(params, P, "m_min")?.unwrap_or(2);
    let m_max = usize_field(params, P, "m_max")?;
    let ms: Vec<usize> = (m_min.max(2)..=m_max).filter(|m| m % 2 == 0).collect();
    if ms.is_empty() {
        return Err(schema_error(&child(P, "m_max"), "no even m in range"));
    }
    let rows: Vec<(usize, usize, usize, Vec<usize>)> = ms
        .par_iter()
        .map(|&m| solve_c(m).map(|s| (m, s.rank, s.nullity(), s.pivots)))
        .collect::<Result<_>>()?;
    let all_half = rows.iter().all(|(m, r, _, _)| 2 * r == *m);
    let mut lines = vec!["m rank nullity".to_string()];
    lines.extend(rows.iter().map(|(m, r, n, _)| format!("{m} {r} {n}")));
    Ok(Outcome {
        exit: if all_half { EXIT_OK } else { EXIT_REFUTED },
        report: json!({
            "status": if all_half { "Valid" } else { "Invalid" },
            "rows": rows.iter().map(|(m, r, n, p)| json!({
                "m": m, "rank": r, "nullity": n, "pivots": p,
            })).collect::<Vec<_>>(),
        }),
        lines,
    })
}

/// A perturbation `c_ij += delta` of the matrix for size `m`.
struct Perturbation {
    m: usize,
    i: usize,
    j: usize,
    delta: i64,
}

fn perturbation(params: &Value, rng: &mut ChaCha8Rng, m_max: usize) -> Result<Option<Perturbation>> {
    let Some(st) = opt_field(params, "self_test") else {
        return Ok(None);
    };
    let path = child(P, "self_test");
    match st {
        Value::Bool(false) => Ok(None),
        Value::Bool(true) => {
            let m = 2 * rng.gen_range(1..=(m_max / 2).max(1));
            Ok(Some(Perturbation {
                m,
                i: rng.gen_range(0..=m),
                j: rng.gen_range(0..=m),
                delta: 1,
            }))
        }
        Value::Object(_) => {
            let m = usize_field(st, &path, "m")?;
            let i = usize_field(st, &path, "i")?;
            let j = usize_field(st, &path, "j")?;
            if m == 0 || m % 2 == 1 || i > m || j > m {
                return Err(schema_error(&path, "need even m > 0 and 0 <= i, j <= m"));
            }
            let delta = match opt_field(st, "delta") {
                None => 1,
                Some(d) => d
                    .as_i64()
                    .filter(|d| *d != 0)
                    .ok_or_else(|| schema_error(&child(&path, "delta"), "expected a nonzero integer"))?,
            };
            Ok(Some(Perturbation { m, i, j, delta }))
        }
        _ => Err(schema_error(&path, "expected a boolean or {\"m\", \"i\", \"j\"}")),
    }
}

/// Checks `C·y = 0` for every null vector `y`, with `C` possibly perturbed;
/// returns the first failing `(row, basis vector)`.
fn kernel_failure(m: usize, pert: Option<&Perturbation>) -> Result<Option<(usize, usize)>> {
    let c = build_c_matrix(m)?;
    let sol = solve_c(m)?;
    for (b, y) in sol.basis.iter().enumerate() {
        for i in 0..=m {
            let mut acc = BigRational::from_integer(0.into());
            for (j, yj) in y.iter().enumerate() {
                let mut entry = c.matrix.get(i, j).clone();
                if let Some(p) = pert.filter(|p| p.m == m && p.i == i && p.j == j) {
                    entry += BigRational::from_integer(p.delta.into());
                }
                acc += entry * yj;
            }
            if acc != BigRational::from_integer(0.into()) {
                return Ok(Some((i, b)));
            }
        }
    }
    Ok(None)
}

fn identities(params: &Value) -> Result<Outcome> {
    let n_max = opt_usize(params, P, "n_max")?.unwrap_or(20) as u64;
    let big_n_max = opt_usize(params, P, "N_max")?.unwrap_or(20) as u64;
    let m_max = opt_usize(params, P, "m_max")?.unwrap_or(10);
    let samples = opt_usize(params, P, "samples")?.unwrap_or(200);
    if n_max == 0 || big_n_max == 0 || m_max == 0 {
        return Err(schema_error(P, "bounds must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed(params)?);
    let pert = perturbation(params, &mut rng, m_max.max(2))?;
    let mut failures: Vec<Value> = Vec::new();
    let mut counts = BTreeMap::new();

    // Alternating binomial sums.
    let pairs: Vec<(u64, u64)> = (0..=big_n_max)
        .flat_map(|nn| (0..=nn.min(n_max)).map(move |n| (n, nn)))
        .collect();
    let sum_failures: Vec<Value> = pairs
        .par_iter()
        .filter_map(|&(n, nn)| {
            if n == 0 {
                (!identity_endpoints(nn)).then(|| json!({ "identity": "endpoints", "N": nn }))
            } else if !identity_lower_shift(n, nn) {
                Some(json!({ "identity": "lower_shift", "n": n, "N": nn }))
            } else if !identity_same_top(n, nn) {
                Some(json!({ "identity": "same_top", "n": n, "N": nn }))
            } else {
                None
            }
        })
        .collect();
    counts.insert("alternating_sums", pairs.len());
    failures.extend(sum_failures);

    // Even-column relation.
    let mut relation_checks = 0;
    for m in (2..=m_max).step_by(2) {
        for i in 0..=m {
            for n in 1..=m / 2 {
                relation_checks += 1;
                let ok = match pert.as_ref().filter(|p| p.m == m && p.i == i) {
                    Some(p) => perturbed_relation(i, n, p),
                    None => even_column_relation(i, n),
                };
                if !ok {
                    failures.push(json!({ "identity": "even_columns", "m": m, "i": i, "n": n }));
                }
            }
        }
    }
    counts.insert("even_columns", relation_checks);

    // Null vectors of the classification matrix.
    let mut kernel_checks = 0;
    for m in (2..=m_max).step_by(2) {
        kernel_checks += 1;
        if let Some((row, b)) = kernel_failure(m, pert.as_ref())? {
            failures.push(json!({ "identity": "kernel", "m": m, "row": row, "basis_vector": b }));
        }
    }
    counts.insert("kernel", kernel_checks);

    // Equivalence of the two linear systems on sampled vectors.
    let mut disagreements = 0;
    for s in 0..samples {
        let m = rng.gen_range(1..=8usize);
        let y = sample_vector(&mut rng, m)?;
        let (a, b) = systems_equivalent_check(&y);
        if a != b {
            disagreements += 1;
            failures.push(json!({
                "identity": "systems_equivalent", "sample": s,
                "y": y.iter().map(value_to_json).collect::<Vec<_>>(),
            }));
        }
    }
    counts.insert("systems_equivalent", samples);

    let pass = failures.is_empty();
    let mut lines: Vec<String> = counts
        .iter()
        .map(|(k, v)| format!("{k}: {v} checks"))
        .collect();
    if let Some(p) = &pert {
        lines.push(format!("self-test: c[{}][{}] += {} at m = {}", p.i, p.j, p.delta, p.m));
    }
    lines.push(if pass {
        "all identities hold".to_string()
    } else {
        format!("{} failures, first: {}", failures.len(), failures[0])
    });
    let _ = disagreements;
    Ok(Outcome {
        exit: if pass { EXIT_OK } else { EXIT_REFUTED },
        report: json!({
            "status": if pass { "Valid" } else { "Invalid" },
            "checks": counts,
            "self_test": pert.as_ref().map(|p| json!({ "m": p.m, "i": p.i, "j": p.j, "delta": p.delta })),
            "first_failure": failures.first(),
            "failures": failures.len(),
        }),
        lines,
    })
}

fn perturbed_relation(i: usize, n: usize, p: &Perturbation) -> bool {
    use num_traits::Zero;
    let total: num_bigint::BigInt = (0..=n)
        .map(|k| {
            let col = 2 * n - k;
            let mut c = c_entry(i, col);
            if col == p.j {
                c += p.delta;
            }
            let s = if k % 2 == 0 { 1 } else { -1 };
            c * twistlab_core::binomial(n as u64, k as i64) * s
        })
        .sum();
    total.is_zero()
}

/// Half the samples are null vectors of the matrix (when `m` is even), the
/// rest small random vectors.
fn sample_vector(rng: &mut ChaCha8Rng, m: usize) -> Result<Vec<RingValue>> {
    let ring = RingDescriptor::Rationals;
    if m.is_multiple_of(2) && rng.gen_bool(0.5) {
        let sol = solve_c(m)?;
        let mut y = vec![BigRational::from_integer(0.into()); m + 1];
        for b in &sol.basis {
            let k = BigRational::from_integer(rng.gen_range(-5i64..=5).into());
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi += &k * bi;
            }
        }
        return y.iter().map(|v| RingValue::from_rational(ring, v)).collect();
    }
    Ok((0..=m)
        .map(|_| RingValue::from_i64(ring, rng.gen_range(-3..=3)))
        .collect())
}
