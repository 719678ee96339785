//! Command implementations: each reads validated inputs, runs the library
//! computation, and renders a deterministic report plus an exit code.

use std::path::Path;

use sha2::{Digest, Sha256};
use weighted_cuntz::fock::{
    asymptotic_period_series, positivize, tail_alternation_blocks, weight_op, WeightKind,
    WeightSpec,
};
use weighted_cuntz::quotient::{
    build_corner_model, classify_weight_spec, corner_probe_series, decide_simplicity,
    invariant_ideals, swap_action, CornerFamily, Verdict,
};
use weighted_cuntz::repcheck::{commutation_residual, cuntz_residuals};
use weighted_cuntz::Error as CoreError;

use crate::json::{format_float, Json};
use crate::spec_file;

/// Failure modes of a command, mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: malformed files, impossible parameters, dimension guards.
    Validation(String),
    /// Valid input outside the families the analysis covers.
    OutOfScope(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::OutOfScope(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::OutOfScope(m) => m,
        }
    }
}

fn map_core(e: CoreError) -> CliError {
    match e {
        CoreError::OutOfScope(m) => CliError::OutOfScope(m),
        other => CliError::Validation(other.to_string()),
    }
}

/// Rendered command result: optional JSON and CSV bodies plus an exit code.
pub struct Rendered {
    pub json: Option<String>,
    pub csv: Option<String>,
    pub exit: i32,
}

impl Rendered {
    fn json_only(json: Json) -> Self {
        Rendered {
            json: Some(json.to_text()),
            csv: None,
            exit: 0,
        }
    }
}

/// A weight spec together with the hash of the file it came from.
pub struct SpecInput {
    pub ws: WeightSpec,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn load_spec(path: &Path) -> Result<SpecInput, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Validation(format!("{} is not UTF-8", path.display())))?;
    let ws = spec_file::parse_weight_spec(&text).map_err(CliError::Validation)?;
    Ok(SpecInput { ws, sha256 })
}

/// Report skeleton shared by every command: tool identity, command name,
/// and the hash of the inputs, so a report pins down what produced it.
fn header(command: &str, spec_sha: &str) -> Json {
    let mut root = Json::obj();
    root.push("tool", Json::Str("wcuntz".to_string()));
    root.push("version", Json::Str(env!("CARGO_PKG_VERSION").to_string()));
    root.push("command", Json::Str(command.to_string()));
    root.push("spec_sha256", Json::Str(spec_sha.to_string()));
    root
}

/// Largest truncation level whose weight blocks stay at or below the given
/// dimension, floored at `at_least` and capped at 16.
fn default_max_level(d: usize, block_cap: usize, at_least: usize) -> usize {
    let mut k = 0usize;
    let mut dim = 1usize;
    while k < 16 {
        match dim.checked_mul(d) {
            Some(next) if next <= block_cap => {
                dim = next;
                k += 1;
            }
            _ => break,
        }
    }
    k.max(at_least)
}

fn one_based(indices: &[usize]) -> Json {
    Json::Arr(indices.iter().map(|&i| Json::from_usize(i + 1)).collect())
}

fn orbits_json(orbits: &[Vec<usize>]) -> Json {
    Json::Arr(orbits.iter().map(|o| one_based(o)).collect())
}

pub fn check_ap(spec: &SpecInput, period: usize, k_opt: Option<usize>) -> Result<Rendered, CliError> {
    if period == 0 {
        return Err(CliError::Validation("the period p must be at least 1".to_string()));
    }
    let max_level = k_opt.unwrap_or_else(|| match spec.ws.kind() {
        WeightKind::ExplicitList(blocks) => blocks.len().saturating_sub(1),
        _ => default_max_level(spec.ws.d(), 256, period),
    });
    let series = asymptotic_period_series(&spec.ws, period, max_level).map_err(map_core)?;

    let mut csv = String::from("k,defect\n");
    for (k, defect) in &series {
        csv.push_str(&format!("{k},{}\n", format_float(*defect)));
    }

    let mut root = header("check-ap", &spec.sha256);
    root.push("period", Json::from_usize(period));
    root.push("max_level", Json::from_usize(max_level));
    let mut points = Vec::with_capacity(series.len());
    for (k, defect) in &series {
        let mut p = Json::obj();
        p.push("k", Json::from_usize(*k));
        p.push("defect", Json::Float(*defect));
        points.push(p);
    }
    root.push("series", Json::Arr(points));

    Ok(Rendered {
        json: Some(root.to_text()),
        csv: Some(csv),
        exit: 0,
    })
}

pub fn positivize_cmd(spec: &SpecInput, k_opt: Option<usize>) -> Result<Rendered, CliError> {
    let max_level = k_opt.unwrap_or_else(|| match spec.ws.kind() {
        WeightKind::ExplicitList(blocks) => blocks.len().saturating_sub(1),
        _ => default_max_level(spec.ws.d(), 64, 1),
    });
    let pos = positivize(&spec.ws, max_level).map_err(map_core)?;
    let residual = pos.conjugation_residual(&spec.ws).map_err(map_core)?;
    let weight_norm = weight_op(&spec.ws, max_level).map_err(map_core)?.op_norm();

    let mut root = header("positivize", &spec.sha256);
    root.push("max_level", Json::from_usize(max_level));
    root.push("weight_norm", Json::Float(weight_norm));
    root.push("conjugation_residual", Json::Float(residual));
    root.push("min_eigenvalues", Json::float_list(&pos.min_eigs()));
    root.push("positive_blocks", Json::matrix_list(&pos.zprime));
    root.push("unitary_blocks", Json::matrix_list(&pos.unitary));
    Ok(Rendered::json_only(root))
}

pub fn fock_identities(spec: &SpecInput, k_opt: Option<usize>) -> Result<Rendered, CliError> {
    let family = match classify_weight_spec(&spec.ws) {
        Ok(CornerFamily::AlternatingPeriodTwo { tail_start, a, b }) => (tail_start, a, b),
        Ok(CornerFamily::PeriodOne { .. }) => {
            return Err(CliError::OutOfScope(
                "the block alternation identities apply to the alternating two-block family only"
                    .to_string(),
            ));
        }
        Err(detail) => return Err(CliError::OutOfScope(detail)),
    };
    let (tail_start, a, b) = family;
    let max_level = k_opt.unwrap_or(tail_start + 4);
    if max_level < tail_start + 1 {
        return Err(CliError::Validation(format!(
            "need K >= {}, got K={max_level}",
            tail_start + 1
        )));
    }

    let mut levels = Vec::new();
    let mut overall = 0.0f64;
    for level in tail_start + 1..=max_level {
        let alt = tail_alternation_blocks(tail_start, &a, &b, level, max_level).map_err(map_core)?;
        overall = overall.max(alt.max_rel_err);
        let mut entry = Json::obj();
        entry.push("level", Json::from_usize(alt.level));
        entry.push("offset", Json::from_usize(alt.offset));
        entry.push("rel_errors", Json::float_list(&alt.rel_errors));
        entry.push("max_rel_err", Json::Float(alt.max_rel_err));
        entry.push("computed", Json::matrix_list(&alt.computed));
        entry.push("predicted", Json::matrix_list(&alt.predicted));
        levels.push(entry);
    }

    let mut root = header("fock-identities", &spec.sha256);
    root.push("tail_start", Json::from_usize(tail_start));
    root.push("max_level", Json::from_usize(max_level));
    root.push("levels", Json::Arr(levels));
    root.push("overall_max_rel_err", Json::Float(overall));
    Ok(Rendered::json_only(root))
}

fn classify_or_report(
    spec: &SpecInput,
    command: &str,
) -> Result<CornerFamily, Box<Rendered>> {
    match classify_weight_spec(&spec.ws) {
        Ok(family) => Ok(family),
        Err(detail) => {
            let mut root = header(command, &spec.sha256);
            root.push("status", Json::Str("out_of_scope".to_string()));
            root.push("detail", Json::Str(detail));
            Err(Box::new(Rendered {
                json: Some(root.to_text()),
                csv: None,
                exit: 2,
            }))
        }
    }
}

fn family_name(family: &CornerFamily) -> &'static str {
    match family {
        CornerFamily::AlternatingPeriodTwo { .. } => "alternating_period_two",
        CornerFamily::PeriodOne { .. } => "period_one",
    }
}

pub fn analyze_c00(spec: &SpecInput, seed: u64, tol: f64) -> Result<Rendered, CliError> {
    let family = match classify_or_report(spec, "analyze-c00") {
        Ok(f) => f,
        Err(rendered) => return Ok(*rendered),
    };
    let model = build_corner_model(&family, seed, tol).map_err(map_core)?;

    let mut root = header("analyze-c00", &spec.sha256);
    root.push("seed", Json::Int(seed as i64));
    root.push("tol", Json::Float(tol));
    root.push("family", Json::Str(family_name(&family).to_string()));
    root.push("dim", Json::from_usize(model.algebra.dim()));

    let mut wedderburn = Json::obj();
    wedderburn.push("blocks", Json::usize_list(&model.report.block_sizes));
    wedderburn.push("projections", Json::matrix_list(&model.report.projections));
    root.push("wedderburn", wedderburn);
    root.push("central_values", Json::float_list(&model.report.central_values));
    root.push("gen_a", Json::matrix(&model.gen_a));
    root.push(
        "gen_b",
        model.gen_b.as_ref().map(Json::matrix).unwrap_or(Json::Null),
    );

    if matches!(family, CornerFamily::AlternatingPeriodTwo { .. }) {
        let action = swap_action(&model).map_err(map_core)?;
        root.push("sigma_orbits", orbits_json(&action.orbits()));
        let masks = invariant_ideals(&model).map_err(map_core)?;
        let masks_json: Vec<Json> = masks.iter().map(|m| one_based(&m.members)).collect();
        root.push("invariant_ideals", Json::Arr(masks_json));
    } else {
        root.push("sigma_orbits", Json::Null);
        root.push("invariant_ideals", Json::Null);
    }
    Ok(Rendered::json_only(root))
}

pub fn decide_simplicity_cmd(spec: &SpecInput, seed: u64, tol: f64) -> Result<Rendered, CliError> {
    let family = match classify_or_report_verdict(spec) {
        Ok(f) => f,
        Err(rendered) => return Ok(*rendered),
    };
    let report = decide_simplicity(&family, seed, tol).map_err(map_core)?;
    let (verdict, exit) = match report.verdict {
        Verdict::Simple => ("simple", 0),
        Verdict::NotSimple => ("not_simple", 0),
        Verdict::OutOfScope => ("out_of_scope", 2),
    };

    let mut root = header("decide-simplicity", &spec.sha256);
    root.push("seed", Json::Int(seed as i64));
    root.push("tol", Json::Float(tol));
    root.push("verdict", Json::Str(verdict.to_string()));
    root.push("c00_blocks", Json::usize_list(&report.block_sizes));
    root.push("sigma_orbits", orbits_json(&report.orbits));
    root.push(
        "witness",
        report
            .witness
            .as_ref()
            .map(|w| one_based(&w.members))
            .unwrap_or(Json::Null),
    );
    root.push("reason", Json::Str(report.reason.clone()));
    Ok(Rendered {
        json: Some(root.to_text()),
        csv: None,
        exit,
    })
}

/// The simplicity command reports scope failures inside the verdict field
/// rather than a status field, so scripted callers see one shape.
fn classify_or_report_verdict(spec: &SpecInput) -> Result<CornerFamily, Box<Rendered>> {
    match classify_weight_spec(&spec.ws) {
        Ok(family) => Ok(family),
        Err(detail) => {
            let mut root = header("decide-simplicity", &spec.sha256);
            root.push("verdict", Json::Str("out_of_scope".to_string()));
            root.push("detail", Json::Str(detail));
            Err(Box::new(Rendered {
                json: Some(root.to_text()),
                csv: None,
                exit: 2,
            }))
        }
    }
}

pub fn probe_c00(
    spec: &SpecInput,
    p_opt: Option<usize>,
    k_opt: Option<usize>,
    tol: f64,
) -> Result<Rendered, CliError> {
    let period = match p_opt {
        Some(p) => p,
        None => match classify_weight_spec(&spec.ws) {
            Ok(family) => family.period(),
            Err(_) => {
                return Err(CliError::Validation(
                    "this spec kind carries no period; pass --p".to_string(),
                ))
            }
        },
    };
    if period == 0 {
        return Err(CliError::Validation("the period p must be at least 1".to_string()));
    }
    let d = spec.ws.d();
    let max_level = k_opt.unwrap_or_else(|| probe_default_level(d, period));
    let series = corner_probe_series(&spec.ws, period, max_level, tol).map_err(map_core)?;

    let mut csv = String::from("k,dim\n");
    for point in &series {
        csv.push_str(&format!("{},{}\n", point.window_start, point.algebra_dim));
    }

    let mut root = header("probe-c00", &spec.sha256);
    root.push("period", Json::from_usize(period));
    root.push("max_level", Json::from_usize(max_level));
    root.push("tol", Json::Float(tol));
    let mut points = Vec::with_capacity(series.len());
    for point in &series {
        let mut p = Json::obj();
        p.push("window_start", Json::from_usize(point.window_start));
        p.push("ambient_dim", Json::from_usize(point.ambient_dim));
        p.push("algebra_dim", Json::from_usize(point.algebra_dim));
        points.push(p);
    }
    root.push("series", Json::Arr(points));
    Ok(Rendered {
        json: Some(root.to_text()),
        csv: Some(csv),
        exit: 0,
    })
}

/// Largest level whose final probe window keeps the stacked corner dimension
/// within the library guard, capped at 16.
fn probe_default_level(d: usize, period: usize) -> usize {
    let q = period - 1;
    let floor = q + period;
    let mut best = floor;
    for k in floor..=16 {
        let first = k + 1 - period;
        let mut ambient = 0usize;
        let mut ok = true;
        for j in first..=k {
            match d.checked_pow((j - q) as u32) {
                Some(dim) if ambient + dim <= 512 => ambient += dim,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = k;
        } else {
            break;
        }
    }
    best
}

pub fn rep_check(
    spec: &SpecInput,
    data_path: &Path,
    seed: u64,
    tol: f64,
) -> Result<Rendered, CliError> {
    let bytes = std::fs::read(data_path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", data_path.display())))?;
    let data_sha = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Validation(format!("{} is not UTF-8", data_path.display())))?;
    let data = spec_file::parse_rep_data(&text).map_err(CliError::Validation)?;

    let family = match classify_or_report(spec, "rep-check") {
        Ok(f) => f,
        Err(rendered) => return Ok(*rendered),
    };
    let model = build_corner_model(&family, seed, tol).map_err(map_core)?;
    let corner = weighted_cuntz::repcheck::corner_rep_check(&model, &data, tol).map_err(map_core)?;

    let mut root = header("rep-check", &spec.sha256);
    root.push("data_sha256", Json::Str(data_sha));
    root.push("seed", Json::Int(seed as i64));
    root.push("tol", Json::Float(tol));

    let mut corner_json = Json::obj();
    corner_json.push("multiplicativity_defect", Json::Float(corner.multiplicativity_defect));
    corner_json.push("adjoint_defect", Json::Float(corner.adjoint_defect));
    corner_json.push("dictionary_defect", Json::Float(corner.dictionary_defect));
    corner_json.push(
        "weight_commutation",
        corner.weight_commutation.map(Json::Float).unwrap_or(Json::Null),
    );
    corner_json.push(
        "spectrum_defect",
        corner.spectrum_defect.map(Json::Float).unwrap_or(Json::Null),
    );
    corner_json.push(
        "positivity_margin",
        corner.positivity_margin.map(Json::Float).unwrap_or(Json::Null),
    );
    corner_json.push("ok", Json::Bool(corner.ok));
    root.push("corner", corner_json);

    // Shift-relation residuals are informational: truncated families carry
    // forced defects, and unitary families (like a flip image) do not.
    if data.isometries.is_empty() {
        root.push("shift_residuals", Json::Null);
        root.push("weight_commutation_words", Json::Null);
    } else {
        let shifts = cuntz_residuals(&data.isometries).map_err(map_core)?;
        let mut shifts_json = Json::obj();
        shifts_json.push("isometry_defect", Json::Float(shifts.isometry_defect));
        shifts_json.push("orthogonality_defect", Json::Float(shifts.orthogonality_defect));
        shifts_json.push("completeness_defect", Json::Float(shifts.completeness_defect));
        root.push("shift_residuals", shifts_json);

        let commute = commutation_residual(&data.weight, &data.isometries, family.period())
            .map_err(map_core)?;
        let mut commute_json = Json::obj();
        commute_json.push("residual", Json::Float(commute.residual));
        commute_json.push(
            "worst_word",
            Json::Arr(
                commute
                    .worst_word
                    .letters()
                    .iter()
                    .map(|&l| Json::Int(l as i64))
                    .collect(),
            ),
        );
        root.push("weight_commutation_words", commute_json);
    }
    root.push("ok", Json::Bool(corner.ok));
    Ok(Rendered::json_only(root))
}
