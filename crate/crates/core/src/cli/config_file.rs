//! Flat `key = value` configuration files (JSON objects are accepted too).
//!
//! Keys are long flag names without the leading dashes. A file is expanded
//! into flags placed ahead of the command-line flags, so the command line wins.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

fn value_to_text(key: &str, v: &Value) -> Result<Option<String>> {
    Ok(match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Array(items) => {
            let parts = items
                .iter()
                .map(|i| value_to_text(key, i).map(Option::unwrap_or_default))
                .collect::<Result<Vec<_>>>()?;
            Some(parts.join(","))
        }
        Value::Object(_) => {
            return Err(Error::Config(format!(
                "key {key:?}: nested objects are not supported"
            )))
        }
    })
}

/// Parse file contents into ordered `(key, value)` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    if text.trim_start().starts_with('{') {
        let obj: serde_json::Map<String, Value> =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config JSON: {e}")))?;
        let mut out = Vec::new();
        for (k, v) in &obj {
            if let Some(text) = value_to_text(k, v)? {
                out.push((k.clone(), text));
            }
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Config(format!("config line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_pairs(&text)
}

/// Flags equivalent to the pairs.
pub fn pairs_to_flags(pairs: &[(String, String)]) -> Vec<String> {
    pairs
        .iter()
        .flat_map(|(k, v)| [format!("--{k}"), v.clone()])
        .collect()
}

/// Render resolved arguments as a `key = value` file, skipping unset values
/// and the keys in `skip`.
pub fn echo<T: Serialize>(args: &T, skip: &[&str]) -> Result<String> {
    let value = serde_json::to_value(args)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Config("arguments must serialise to an object".into()))?;
    let mut out = String::new();
    for (k, v) in obj {
        if skip.contains(&k.as_str()) {
            continue;
        }
        if let Some(text) = value_to_text(k, v)? {
            out.push_str(&format!("{k} = {text}\n"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_json_forms_agree() {
        let flat = "# comment\nqubits = 4\nmutation-probs = 0.5,0.1,0.1,0.3\n\nhamiltonian=tfi\n";
        let json = r#"{"qubits": 4, "mutation-probs": [0.5, 0.1, 0.1, 0.3], "hamiltonian": "tfi"}"#;
        let mut a = parse_pairs(flat).unwrap();
        let mut b = parse_pairs(json).unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(
            pairs_to_flags(&[("qubits".into(), "4".into())]),
            vec!["--qubits".to_string(), "4".to_string()]
        );
    }

    #[test]
    fn malformed_lines_are_config_errors() {
        assert!(matches!(parse_pairs("qubits 4"), Err(Error::Config(_))));
        assert!(matches!(parse_pairs("= 4"), Err(Error::Config(_))));
        assert!(matches!(
            parse_pairs("{\"a\": {\"b\": 1}}"),
            Err(Error::Config(_))
        ));
    }
}
