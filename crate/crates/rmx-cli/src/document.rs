//! On-disk JSON document for evaluated matrices.
//!
//! The writer is hand-rolled so the byte stream is deterministic: fixed
//! top-level key order, object keys inside `params` in sorted order (the
//! natural order of `serde_json`'s map), and every float printed with 17
//! significant digits so a write → read → write cycle is bitwise stable.

use rmx_core::cnum::{cx, format_f64_exact};
use rmx_core::error::{Result, RmxError};
use rmx_core::matrix::CMatrix;
use rmx_core::theta_kernel::TruncationControl;

/// Document format version.
pub const SCHEMA_VERSION: &str = "1.0";

/// Producer tag recorded under `provenance.tool`.
pub const TOOL_TAG: &str = "rmx 0.1.0";

/// An evaluated matrix plus everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct MatrixDocument {
    /// Which builder produced the matrix (`sbar`, `s_full`, `r_dy`, `r_q`,
    /// `twist_f`).
    pub kind: String,
    /// Rank parameter.
    pub n: u32,
    /// Builder-specific parameters (complex values as `{re, im}` objects).
    pub params: serde_json::Value,
    /// Truncation control the evaluation ran with.
    pub truncation: TruncationControl,
    /// Optional seed recorded for provenance (evaluations are
    /// deterministic; this only tags the document).
    pub seed: Option<u64>,
    /// Whether every charge-violating entry is exactly zero; `None` for
    /// kinds without a charge grading.
    pub charge_conserving: Option<bool>,
    /// Whether a removable singularity was regularized; `None` when not
    /// applicable.
    pub regularized: Option<bool>,
    /// The matrix itself, row-major.
    pub matrix: CMatrix,
}

fn write_value(out: &mut String, v: &serde_json::Value) {
    match v {
        serde_json::Value::Null => out.push_str("null"),
        serde_json::Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        serde_json::Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = num.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_f64_exact(num.as_f64().unwrap_or(f64::NAN)));
            }
        }
        serde_json::Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization cannot fail"));
        }
        serde_json::Value::Array(items) => {
            out.push('[');
            for (idx, item) in items.iter().enumerate() {
                if idx > 0 {
                    out.push_str(", ");
                }
                write_value(out, item);
            }
            out.push(']');
        }
        serde_json::Value::Object(map) => {
            out.push('{');
            for (idx, (key, val)) in map.iter().enumerate() {
                if idx > 0 {
                    out.push_str(", ");
                }
                out.push_str(&serde_json::to_string(key).expect("key serialization"));
                out.push_str(": ");
                write_value(out, val);
            }
            out.push('}');
        }
    }
}

fn write_opt_bool(out: &mut String, b: Option<bool>) {
    match b {
        None => out.push_str("null"),
        Some(true) => out.push_str("true"),
        Some(false) => out.push_str("false"),
    }
}

impl MatrixDocument {
    /// Serialize with the deterministic layout described in the module
    /// docs.  The result always ends in a newline.
    pub fn to_json_string(&self) -> String {
        let dim = self.matrix.nrows();
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"schema_version\": \"{SCHEMA_VERSION}\",\n"));
        out.push_str(&format!(
            "  \"kind\": {},\n",
            serde_json::to_string(&self.kind).expect("kind serialization")
        ));
        out.push_str(&format!("  \"n\": {},\n", self.n));
        out.push_str("  \"params\": ");
        write_value(&mut out, &self.params);
        out.push_str(",\n");
        out.push_str(&format!(
            "  \"truncation\": {{\"max_terms\": {}, \"product_depth\": {}, \"tol\": {}}},\n",
            self.truncation.max_terms,
            self.truncation.product_depth,
            format_f64_exact(self.truncation.tol)
        ));
        out.push_str(&format!(
            "  \"provenance\": {{\"tool\": \"{TOOL_TAG}\", \"seed\": {}}},\n",
            self.seed.map_or_else(|| "null".to_string(), |s| s.to_string())
        ));
        out.push_str("  \"flags\": {\"charge_conserving\": ");
        write_opt_bool(&mut out, self.charge_conserving);
        out.push_str(", \"regularized\": ");
        write_opt_bool(&mut out, self.regularized);
        out.push_str("},\n");
        out.push_str(&format!("  \"dim\": {dim},\n"));
        out.push_str("  \"matrix\": [\n");
        for row in 0..dim {
            out.push_str("    [");
            for col in 0..dim {
                if col > 0 {
                    out.push_str(", ");
                }
                let e = self.matrix[[row, col]];
                out.push_str(&format!(
                    "{{\"re\": {}, \"im\": {}}}",
                    format_f64_exact(e.re),
                    format_f64_exact(e.im)
                ));
            }
            out.push(']');
            if row + 1 < dim {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n");
        out.push_str("}\n");
        out
    }

    /// Parse a document produced by [`MatrixDocument::to_json_string`].
    ///
    /// # Errors
    ///
    /// `Domain` for malformed JSON, a wrong schema version, or missing
    /// fields; `Dimension` when the matrix shape contradicts `dim`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| RmxError::Domain(format!("document is not valid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| RmxError::Domain("document root must be an object".to_string()))?;
        let field = |name: &str| -> Result<&serde_json::Value> {
            obj.get(name)
                .ok_or_else(|| RmxError::Domain(format!("document is missing field `{name}`")))
        };
        let version = field("schema_version")?.as_str().unwrap_or("");
        if version != SCHEMA_VERSION {
            return Err(RmxError::Domain(format!(
                "unsupported schema_version `{version}` (expected `{SCHEMA_VERSION}`)"
            )));
        }
        let kind = field("kind")?
            .as_str()
            .ok_or_else(|| RmxError::Domain("`kind` must be a string".to_string()))?
            .to_string();
        let n = field("n")?
            .as_u64()
            .ok_or_else(|| RmxError::Domain("`n` must be a non-negative integer".to_string()))?
            as u32;
        let params = field("params")?.clone();
        let trunc = field("truncation")?;
        let trunc_field = |name: &str| -> Result<&serde_json::Value> {
            trunc.get(name).ok_or_else(|| {
                RmxError::Domain(format!("truncation is missing field `{name}`"))
            })
        };
        let truncation = TruncationControl {
            max_terms: trunc_field("max_terms")?.as_u64().unwrap_or(0) as usize,
            product_depth: trunc_field("product_depth")?.as_u64().unwrap_or(0) as usize,
            tol: trunc_field("tol")?.as_f64().unwrap_or(f64::NAN),
        };
        let seed = match field("provenance")?.get("seed") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| {
                RmxError::Domain("`provenance.seed` must be an integer or null".to_string())
            })?),
        };
        let flags = field("flags")?;
        let opt_bool = |name: &str| -> Option<bool> {
            flags.get(name).and_then(serde_json::Value::as_bool)
        };
        let dim = field("dim")?
            .as_u64()
            .ok_or_else(|| RmxError::Domain("`dim` must be a non-negative integer".to_string()))?
            as usize;
        let rows = field("matrix")?
            .as_array()
            .ok_or_else(|| RmxError::Domain("`matrix` must be an array of rows".to_string()))?;
        if rows.len() != dim {
            return Err(RmxError::Dimension(format!(
                "matrix has {} rows but dim = {dim}",
                rows.len()
            )));
        }
        let mut matrix = CMatrix::from_elem((dim, dim), cx(0.0, 0.0));
        for (r, row) in rows.iter().enumerate() {
            let cells = row.as_array().ok_or_else(|| {
                RmxError::Domain(format!("matrix row {r} must be an array"))
            })?;
            if cells.len() != dim {
                return Err(RmxError::Dimension(format!(
                    "matrix row {r} has {} entries but dim = {dim}",
                    cells.len()
                )));
            }
            for (c, cell) in cells.iter().enumerate() {
                let re = cell.get("re").and_then(serde_json::Value::as_f64);
                let im = cell.get("im").and_then(serde_json::Value::as_f64);
                match (re, im) {
                    (Some(re), Some(im)) => matrix[[r, c]] = cx(re, im),
                    _ => {
                        return Err(RmxError::Domain(format!(
                            "matrix entry ({r}, {c}) must be an object with `re` and `im`"
                        )))
                    }
                }
            }
        }
        Ok(Self {
            kind,
            n,
            params,
            truncation,
            seed,
            charge_conserving: opt_bool("charge_conserving"),
            regularized: opt_bool("regularized"),
            matrix,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample_document() -> MatrixDocument {
        let mut matrix = CMatrix::from_elem((2, 2), cx(0.0, 0.0));
        matrix[[0, 0]] = cx(1.0 / 3.0, -2.5e-7);
        matrix[[0, 1]] = cx(-0.0, 7.25);
        matrix[[1, 0]] = cx(1e308, f64::MIN_POSITIVE);
        matrix[[1, 1]] = cx(0.1 + 0.2, -1.0);
        MatrixDocument {
            kind: "sbar".to_string(),
            n: 2,
            params: json!({"z": {"re": 0.17, "im": 0.06}, "steps": 4, "label": "x"}),
            truncation: TruncationControl::default(),
            seed: Some(99),
            charge_conserving: Some(true),
            regularized: None,
            matrix,
        }
    }

    #[test]
    fn round_trip_is_bitwise_stable() {
        let doc = sample_document();
        let first = doc.to_json_string();
        let parsed = MatrixDocument::from_json_str(&first).unwrap();
        let second = parsed.to_json_string();
        assert_eq!(first, second, "write -> read -> write must be bitwise stable");
        for (a, b) in doc.matrix.iter().zip(parsed.matrix.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(parsed.kind, "sbar");
        assert_eq!(parsed.n, 2);
        assert_eq!(parsed.seed, Some(99));
        assert_eq!(parsed.charge_conserving, Some(true));
        assert_eq!(parsed.regularized, None);
        assert_eq!(parsed.truncation.max_terms, doc.truncation.max_terms);
        assert_eq!(parsed.params, doc.params);
    }

    #[test]
    fn reader_rejects_malformed_documents() {
        assert!(matches!(
            MatrixDocument::from_json_str("not json"),
            Err(RmxError::Domain(_))
        ));
        let doc = sample_document();
        let wrong_version = doc.to_json_string().replace("\"1.0\"", "\"0.9\"");
        assert!(matches!(
            MatrixDocument::from_json_str(&wrong_version),
            Err(RmxError::Domain(_))
        ));
        let wrong_dim = doc.to_json_string().replace("\"dim\": 2", "\"dim\": 3");
        assert!(matches!(
            MatrixDocument::from_json_str(&wrong_dim),
            Err(RmxError::Dimension(_))
        ));
    }

    #[test]
    fn integers_stay_integers_across_round_trips() {
        let doc = sample_document();
        let text = doc.to_json_string();
        assert!(
            text.contains("\"steps\": 4,"),
            "integer params must not gain a float format: {text}"
        );
        assert!(text.contains("\"max_terms\": 256"));
    }
}
