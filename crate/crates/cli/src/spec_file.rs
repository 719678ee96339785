//! Strict JSON input formats: weight-spec files and representation-data
//! files.  Complex entries are `[re, im]` pairs; unknown fields are
//! rejected so that a typo cannot silently change an analysis.

use serde::Deserialize;
use weighted_cuntz::cmat::{c, CMatrix};
use weighted_cuntz::fock::WeightSpec;
use weighted_cuntz::repcheck::RepData;

/// Nested rows of `[re, im]` pairs.
pub type MatrixEntries = Vec<Vec<[f64; 2]>>;

fn to_matrix(entries: &MatrixEntries, what: &str) -> Result<CMatrix, String> {
    let rows = entries.len();
    if rows == 0 {
        return Err(format!("{what}: a matrix needs at least one row"));
    }
    let cols = entries[0].len();
    if cols == 0 {
        return Err(format!("{what}: a matrix needs at least one column"));
    }
    if entries.iter().any(|r| r.len() != cols) {
        return Err(format!("{what}: rows have inconsistent lengths"));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        c(entries[i][j][0], entries[i][j][1])
    }))
}

fn to_matrices(list: &[MatrixEntries], what: &str) -> Result<Vec<CMatrix>, String> {
    list.iter()
        .enumerate()
        .map(|(i, m)| to_matrix(m, &format!("{what}[{i}]")))
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdentityFile {
    #[allow(dead_code)]
    kind: String,
    d: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitFile {
    #[allow(dead_code)]
    kind: String,
    d: usize,
    blocks: Vec<MatrixEntries>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodicFile {
    #[allow(dead_code)]
    kind: String,
    d: usize,
    p: usize,
    #[serde(rename = "N")]
    tail_start: usize,
    blocks: Vec<MatrixEntries>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlternatingFile {
    #[allow(dead_code)]
    kind: String,
    #[serde(default)]
    d: Option<usize>,
    #[serde(rename = "N")]
    tail_start: usize,
    #[serde(rename = "A")]
    a: MatrixEntries,
    #[serde(rename = "B")]
    b: MatrixEntries,
}

/// Parses a weight-spec file.  The `kind` field selects the rule:
/// `identity`, `explicit_list`, `eventually_periodic`, or `alternating_tail`
/// (alias `section4`).
pub fn parse_weight_spec(text: &str) -> Result<WeightSpec, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("spec file is not valid JSON: {e}"))?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| "spec file needs a string field `kind`".to_string())?
        .to_string();
    match kind.as_str() {
        "identity" => {
            let f: IdentityFile = serde_json::from_value(value)
                .map_err(|e| format!("identity spec: {e}"))?;
            WeightSpec::identity(f.d).map_err(|e| e.to_string())
        }
        "explicit_list" => {
            let f: ExplicitFile = serde_json::from_value(value)
                .map_err(|e| format!("explicit_list spec: {e}"))?;
            let blocks = to_matrices(&f.blocks, "blocks")?;
            WeightSpec::explicit(f.d, blocks).map_err(|e| e.to_string())
        }
        "eventually_periodic" => {
            let f: PeriodicFile = serde_json::from_value(value)
                .map_err(|e| format!("eventually_periodic spec: {e}"))?;
            let blocks = to_matrices(&f.blocks, "blocks")?;
            WeightSpec::eventually_periodic(f.d, f.p, f.tail_start, blocks)
                .map_err(|e| e.to_string())
        }
        "alternating_tail" | "section4" => {
            let f: AlternatingFile = serde_json::from_value(value)
                .map_err(|e| format!("alternating_tail spec: {e}"))?;
            if let Some(d) = f.d {
                if d != 2 {
                    return Err(format!(
                        "alternating_tail spec: the alphabet size is fixed at 2, got d={d}"
                    ));
                }
            }
            let a = to_matrix(&f.a, "A")?;
            let b = to_matrix(&f.b, "B")?;
            WeightSpec::alternating_tail(f.tail_start, a, b).map_err(|e| e.to_string())
        }
        other => Err(format!(
            "unknown spec kind `{other}`; expected identity, explicit_list, \
             eventually_periodic, or alternating_tail"
        )),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RepDataFile {
    isometries: Vec<MatrixEntries>,
    weight: MatrixEntries,
    corner_images: Vec<MatrixEntries>,
}

/// Parses a representation-data file with candidate shift images, a weight
/// image, and images of the corner model basis.
pub fn parse_rep_data(text: &str) -> Result<RepData, String> {
    let f: RepDataFile =
        serde_json::from_str(text).map_err(|e| format!("rep-data file: {e}"))?;
    Ok(RepData {
        isometries: to_matrices(&f.isometries, "isometries")?,
        weight: to_matrix(&f.weight, "weight")?,
        corner_images: to_matrices(&f.corner_images, "corner_images")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_bad_kinds() {
        let err = parse_weight_spec(r#"{"kind":"identity","d":2,"extra":1}"#).unwrap_err();
        assert!(err.contains("extra"), "{err}");
        let err = parse_weight_spec(r#"{"kind":"mystery"}"#).unwrap_err();
        assert!(err.contains("mystery"));
        let err = parse_weight_spec("not json").unwrap_err();
        assert!(err.contains("not valid JSON"));
    }

    #[test]
    fn parses_the_alternating_kind_and_its_alias() {
        let body = r#""N":1,"A":[[[3,0],[0,0]],[[0,0],[1,0]]],"B":[[[2,0],[1,0]],[[1,0],[2,0]]]"#;
        for kind in ["alternating_tail", "section4"] {
            let text = format!(r#"{{"kind":"{kind}","d":2,{body}}}"#);
            let ws = parse_weight_spec(&text).unwrap();
            assert_eq!(ws.d(), 2);
        }
        let text = format!(r#"{{"kind":"alternating_tail","d":3,{body}}}"#);
        assert!(parse_weight_spec(&text).unwrap_err().contains("fixed at 2"));
    }

    #[test]
    fn parses_rep_data() {
        let text = r#"{
            "isometries": [[[[0,0],[1,0]],[[1,0],[0,0]]]],
            "weight": [[[2,0],[0,0]],[[0,0],[1,0]]],
            "corner_images": [[[[1,0],[0,0]],[[0,0],[1,0]]]]
        }"#;
        let data = parse_rep_data(text).unwrap();
        assert_eq!(data.isometries.len(), 1);
        assert_eq!(data.weight.nrows(), 2);
        assert_eq!(data.corner_images.len(), 1);
    }
}
