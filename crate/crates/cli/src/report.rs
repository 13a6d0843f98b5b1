//! Report envelope and exact serialization helpers.

use hhcalc::{Mat, SparseVec};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// `2*x - 1/2*y` from coordinates and basis labels.
pub fn format_vector(labels: &[String], v: &SparseVec) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (i, c)) in v.iter().enumerate() {
        let cs = c.to_string();
        let (neg, mag) = match cs.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, cs),
        };
        if k > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        if mag != "1" {
            s.push_str(&mag);
            s.push('*');
        }
        s.push_str(&labels[*i]);
    }
    s
}

/// Rows of exact rational strings.
pub fn matrix_json(m: &Mat) -> Value {
    let rows: Vec<Vec<String>> = m.to_dense().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    json!(rows)
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

/// `{command, input_sha256, results}`, plus `timing_ms` when asked for.
pub fn envelope(command: Value, input_sha256: String, results: Value, timing_ms: Option<u128>) -> Value {
    let mut out = json!({
        "command": command,
        "input_sha256": input_sha256,
        "results": results,
    });
    if let Some(t) = timing_ms {
        out["timing_ms"] = json!(t);
    }
    out
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use hhcalc::{Field, Q};
    use hhcalc::exactlin::Scalar;

    #[test]
    fn vectors_print_with_signs_and_unit_coefficients() {
        let labels: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let v = SparseVec::from_dense(&[Scalar::Q(Q::new(2, 1)), Scalar::Q(Q::new(-1, 2)), Scalar::Q(Q::new(-1, 1))]);
        assert_eq!(format_vector(&labels, &v), "2*x - 1/2*y - z");
        assert_eq!(format_vector(&labels, &SparseVec::from_dense(&[Field::Rational.zero()])), "0");
    }

    #[test]
    fn hash_separates_parts() {
        assert_ne!(sha256_hex(&[b"ab", b"c"]), sha256_hex(&[b"a", b"bc"]));
        assert_eq!(sha256_hex(&[b"x"]).len(), 64);
    }
}
