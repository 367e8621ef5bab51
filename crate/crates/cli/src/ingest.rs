//! User-supplied `F = (F_1, F_2, F_3)` as a JSON object of expression strings:
//!
//! ```json
//! {"F1": "h1", "F2": "-h2", "F3": "0"}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use qsh_core::forms::parse;
use qsh_core::swann::FlatSolution;

use crate::CliError;

const KEYS: [&str; 3] = ["F1", "F2", "F3"];

pub fn parse_user_f(text: &str, path: &Path) -> Result<FlatSolution, CliError> {
    let input_err = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let map: BTreeMap<String, String> = serde_json::from_str(text)
        .map_err(|e| input_err(format!("expected an object of strings: {e}")))?;
    if let Some(extra) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(input_err(format!("unexpected key {extra:?}")));
    }
    let mut fields = Vec::with_capacity(3);
    for key in KEYS {
        let src = map
            .get(key)
            .ok_or_else(|| input_err(format!("missing key {key:?}")))?;
        let field = parse(src).map_err(|e| input_err(format!("{key}: {e}")))?;
        fields.push(field);
    }
    let [f1, f2, f3]: [_; 3] = fields.try_into().expect("three keys");
    Ok(FlatSolution::new(f1, f2, f3))
}

pub fn ingest_user_f(path: &Path) -> Result<FlatSolution, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_user_f(&text, path)
}

/// Serialize in the format read by [`ingest_user_f`].
pub fn solution_to_json(sol: &FlatSolution) -> String {
    let map: BTreeMap<&str, String> = KEYS
        .iter()
        .zip(&sol.f)
        .map(|(k, f)| (*k, f.to_string()))
        .collect();
    serde_json::to_string_pretty(&map).expect("strings serialize")
}
