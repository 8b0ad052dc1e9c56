//! Text formats for matrices and trees.
//!
//! Matrix CSV: `n` lines of `n` comma-separated decimal strings.
//! Matrix JSON: `{"n": 3, "d": [["0", "3", "1"], ...]}`; entries may be
//! strings or numbers. Tree JSON: `{"n": 3, "edges": [{"u": 1, "v": 3, "w": "1"}]}`.
//! Both JSON readers also accept the combined `{"tree": .., "matrix": ..}`
//! document written by `gen`.
//!
//! Locations in errors are 1-based. For CSV they are line and field; for JSON
//! syntax errors they are line and character; for JSON documents that parse
//! but have the wrong shape they are the matrix row and column.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;
use crate::scalar::{Policy, Scalar};
use crate::tree::WeightedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    /// JSON when the first non-blank character opens an object.
    pub fn detect(text: &str) -> Self {
        if text.trim_start().starts_with('{') {
            MatrixFormat::Json
        } else {
            MatrixFormat::Csv
        }
    }
}

fn malformed(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::MalformedInput {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_matrix(text: &str, format: MatrixFormat, policy: Policy) -> Result<DissimilarityMatrix> {
    match format {
        MatrixFormat::Csv => parse_matrix_csv(text, policy),
        MatrixFormat::Json => parse_matrix_json(text, policy),
    }
}

fn parse_matrix_csv(text: &str, policy: Policy) -> Result<DissimilarityMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            malformed(line, 0, e.to_string())
        })?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(malformed(
                line,
                0,
                format!("expected {expected} fields, found {}", record.len()),
            ));
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| policy.parse(field).map_err(|msg| malformed(line, col + 1, msg)))
            .collect::<Result<Vec<Scalar>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(malformed(1, 0, "empty matrix"));
    }
    if rows.len() != rows[0].len() {
        return Err(malformed(
            rows.len(),
            0,
            format!("matrix has {} rows but {} columns", rows.len(), rows[0].len()),
        ));
    }
    DissimilarityMatrix::new(policy, rows)
}

fn parse_json_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| malformed(e.line(), e.column(), e.to_string()))
}

fn scalar_from_json(value: &Value, policy: Policy) -> std::result::Result<Scalar, String> {
    match value {
        Value::String(s) => policy.parse(s),
        Value::Number(num) => policy.parse(&num.to_string()),
        other => Err(format!("expected a decimal string or number, found {other}")),
    }
}

fn object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| malformed(1, 1, format!("{what} must be a JSON object")))
}

fn declared_n(doc: &Map<String, Value>) -> Result<usize> {
    doc.get("n")
        .and_then(Value::as_u64)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| malformed(1, 1, "missing or non-integer \"n\""))
}

fn parse_matrix_json(text: &str, policy: Policy) -> Result<DissimilarityMatrix> {
    let doc = parse_json_document(text)?;
    let doc = object(&doc, "matrix document")?;
    let doc = match doc.get("matrix") {
        Some(inner) => object(inner, "\"matrix\"")?,
        None => doc,
    };
    let n = declared_n(doc)?;
    let rows = doc
        .get("d")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed(1, 1, "missing array \"d\""))?;
    if rows.len() != n {
        return Err(malformed(rows.len(), 0, format!("\"n\" is {n} but \"d\" has {} rows", rows.len())));
    }
    let mut parsed = Vec::with_capacity(n);
    for (r, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| malformed(r + 1, 0, "row is not an array"))?;
        if row.len() != n {
            return Err(malformed(r + 1, 0, format!("expected {n} entries, found {}", row.len())));
        }
        let values = row
            .iter()
            .enumerate()
            .map(|(c, v)| scalar_from_json(v, policy).map_err(|msg| malformed(r + 1, c + 1, msg)))
            .collect::<Result<Vec<_>>>()?;
        parsed.push(values);
    }
    DissimilarityMatrix::new(policy, parsed)
}

pub fn parse_tree_json(text: &str, policy: Policy) -> Result<WeightedTree> {
    let doc = parse_json_document(text)?;
    let doc = object(&doc, "tree document")?;
    let doc = match doc.get("tree") {
        Some(inner) => object(inner, "\"tree\"")?,
        None => doc,
    };
    let n = declared_n(doc)?;
    let edges = doc
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidTree("missing array \"edges\"".into()))?;
    let mut parsed = Vec::with_capacity(edges.len());
    for (idx, edge) in edges.iter().enumerate() {
        let label = |key: &str| {
            edge.get(key)
                .and_then(Value::as_u64)
                .and_then(|v| usize::try_from(v).ok())
                .ok_or_else(|| Error::InvalidTree(format!("edge {}: missing or bad \"{key}\"", idx + 1)))
        };
        let (u, v) = (label("u")?, label("v")?);
        let w = edge
            .get("w")
            .ok_or_else(|| Error::InvalidTree(format!("edge {}: missing \"w\"", idx + 1)))?;
        let w = scalar_from_json(w, policy)
            .map_err(|msg| Error::InvalidTree(format!("edge {}: {msg}", idx + 1)))?;
        parsed.push((u, v, w));
    }
    WeightedTree::new(n, policy, parsed)
}

/// Rows joined by `\n`, with a trailing newline.
pub fn matrix_to_csv(m: &DissimilarityMatrix) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(Scalar::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_to_json(m: &DissimilarityMatrix) -> Value {
    let rows: Vec<Vec<String>> = m
        .rows()
        .iter()
        .map(|row| row.iter().map(Scalar::to_string).collect())
        .collect();
    json!({ "n": m.n(), "d": rows })
}

pub fn tree_to_json(t: &WeightedTree) -> Value {
    serde_json::to_value(t).expect("tree serializes")
}

/// Undirected DOT graph; edge labels carry the decimal weight.
pub fn tree_to_dot(t: &WeightedTree) -> String {
    let mut out = String::from("graph tree {\n");
    for v in t.vertices() {
        let _ = writeln!(out, "  {v};");
    }
    for e in t.edges() {
        let _ = writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, e.weight);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::MatrixViolation;

    fn exact(text: &str) -> Scalar {
        Policy::Exact.parse(text).unwrap()
    }

    #[test]
    fn csv_examples() {
        let m = parse_matrix("0,3,1\n3,0,2\n1,2,0", MatrixFormat::Csv, Policy::Exact).unwrap();
        assert_eq!(m.at(1, 2), &exact("3"));
        assert_eq!(m.at(1, 3), &exact("1"));
        assert_eq!(m.at(2, 3), &exact("2"));

        let err = parse_matrix("0,1\n2,0", MatrixFormat::Csv, Policy::Exact).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidMatrix { row: 1, col: 2, violation: MatrixViolation::Asymmetric }
        ));
        let err = parse_matrix("0,-1\n-1,0", MatrixFormat::Csv, Policy::Exact).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidMatrix { row: 1, col: 2, violation: MatrixViolation::NonPositive }
        ));
    }

    #[test]
    fn csv_tolerates_spaces_and_trailing_newline() {
        let m = parse_matrix(" 0 , 0.5\n0.5, 0 \n\n", MatrixFormat::Csv, Policy::Exact).unwrap();
        assert_eq!(m.at(1, 2), &exact("0.5"));
    }

    #[test]
    fn csv_syntax_errors_carry_location() {
        let err = parse_matrix("0,1\n1,x", MatrixFormat::Csv, Policy::Exact).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { line: 2, column: 2, .. }), "{err:?}");
        let err = parse_matrix("0,1\n1", MatrixFormat::Csv, Policy::Exact).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { line: 2, .. }), "{err:?}");
        let err = parse_matrix("0,1,2\n1,0,3", MatrixFormat::Csv, Policy::Exact).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { .. }), "{err:?}");
        assert!(parse_matrix("", MatrixFormat::Csv, Policy::Exact).is_err());
    }

    #[test]
    fn json_matrix() {
        let text = r#"{"n": 2, "d": [["0", 0.1], [0.1, "0"]]}"#;
        let m = parse_matrix(text, MatrixFormat::detect(text), Policy::Exact).unwrap();
        assert_eq!(m.at(1, 2), &exact("0.1"));

        let err = parse_matrix(r#"{"n": 3, "d": [["0"]]}"#, MatrixFormat::Json, Policy::Exact).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { .. }));
        let err = parse_matrix(r#"{"n": 2, "d": [["0", true], ["1", "0"]]}"#, MatrixFormat::Json, Policy::Exact)
            .unwrap_err();
        assert!(matches!(err, Error::MalformedInput { line: 1, column: 2, .. }), "{err:?}");
        let err = parse_matrix("{\"n\": 2,\n \"d\": [", MatrixFormat::Json, Policy::Exact).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn tree_json_round_trip() {
        let text = r#"{"n": 3, "edges": [{"u": 3, "v": 1, "w": "1"}, {"u": 3, "v": 2, "w": 2.5}]}"#;
        let t = parse_tree_json(text, Policy::Exact).unwrap();
        let out = tree_to_json(&t);
        assert_eq!(
            out,
            json!({"n": 3, "edges": [{"u": 1, "v": 3, "w": "1"}, {"u": 2, "v": 3, "w": "2.5"}]})
        );
        let again = parse_tree_json(&out.to_string(), Policy::Exact).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn tree_json_errors() {
        let zero = r#"{"n": 2, "edges": [{"u": 1, "v": 2, "w": "0"}]}"#;
        assert!(matches!(parse_tree_json(zero, Policy::Exact), Err(Error::InvalidTree(_))));
        let cycle = r#"{"n": 3, "edges": [{"u": 1, "v": 2, "w": "1"}, {"u": 2, "v": 1, "w": "1"}]}"#;
        assert!(matches!(parse_tree_json(cycle, Policy::Exact), Err(Error::InvalidTree(_))));
        let missing = r#"{"n": 2, "edges": [{"u": 1, "w": "1"}]}"#;
        assert!(matches!(parse_tree_json(missing, Policy::Exact), Err(Error::InvalidTree(_))));
    }

    #[test]
    fn writers() {
        let m = parse_matrix("0,3,1\n3,0,2\n1,2,0", MatrixFormat::Csv, Policy::Exact).unwrap();
        assert_eq!(matrix_to_csv(&m), "0,3,1\n3,0,2\n1,2,0\n");
        assert_eq!(matrix_to_json(&m), json!({"n": 3, "d": [["0","3","1"],["3","0","2"],["1","2","0"]]}));

        let t = WeightedTree::new(2, Policy::Exact, [(2, 1, exact("0.5"))]).unwrap();
        assert_eq!(tree_to_dot(&t), "graph tree {\n  1;\n  2;\n  1 -- 2 [label=\"0.5\"];\n}\n");
    }

    #[test]
    fn reads_generated_bundle() {
        let text = r#"{"tree": {"n": 2, "edges": [{"u": 1, "v": 2, "w": "7"}]},
                       "matrix": {"n": 2, "d": [["0", "7"], ["7", "0"]]}}"#;
        assert_eq!(parse_tree_json(text, Policy::Exact).unwrap().n(), 2);
        assert_eq!(parse_matrix(text, MatrixFormat::Json, Policy::Exact).unwrap().at(1, 2), &exact("7"));
    }
}
