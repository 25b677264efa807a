//! JSON model files:
//!
//! ```json
//! { "n": 1, "d": 1, "A": [[[[1, 0]]]],
//!   "perturbation": [{ "row": 1, "coeff": 0.001, "z_exp": [2], "zbar_exp": [1], "imw_exp": [0] }] }
//! ```
//!
//! Complex entries are `[re, im]` pairs; `perturbation` is optional.

use super::{HermitianModel, ModelError, PerturbationTerm};
use crate::linalg::{CMat, C64};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    d: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    perturbation: Vec<PerturbationTerm>,
}

pub fn parse_model(text: &str) -> Result<HermitianModel, ModelError> {
    let raw: ModelFile = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.n == 0 || raw.d == 0 {
        return Err(ModelError::EmptyDimension { n: raw.n, d: raw.d });
    }
    if raw.a.len() != raw.d {
        return Err(ModelError::Parse {
            line: 0,
            column: 0,
            message: format!("field A has {} matrices but d = {}", raw.a.len(), raw.d),
        });
    }
    let mut mats = Vec::with_capacity(raw.d);
    for (index, m) in raw.a.iter().enumerate() {
        if m.len() != raw.n || m.iter().any(|row| row.len() != raw.n) {
            let cols = m.iter().map(|r| r.len()).find(|&c| c != raw.n).unwrap_or(raw.n);
            return Err(ModelError::BadShape { index, rows: m.len(), cols, n: raw.n });
        }
        mats.push(CMat::from_fn(raw.n, raw.n, |i, j| C64::new(m[i][j][0], m[i][j][1])));
    }
    HermitianModel::new(mats, raw.perturbation)
}

pub fn load_model(path: &Path) -> Result<HermitianModel, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

pub fn to_json(model: &HermitianModel) -> String {
    let raw = ModelFile {
        n: model.n(),
        d: model.d(),
        a: model
            .levi_matrices()
            .iter()
            .map(|m| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
            .collect(),
        perturbation: model.perturbation().to_vec(),
    };
    serde_json::to_string_pretty(&raw).expect("model serializes")
}

pub fn save_model(model: &HermitianModel, path: &Path) -> Result<(), ModelError> {
    std::fs::write(path, to_json(model)).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_model() {
        let m = HermitianModel::q1()
            .with_perturbation(vec![PerturbationTerm {
                row: 1,
                coeff: 1e-3,
                z_exp: vec![2, 0],
                zbar_exp: vec![0, 1],
                imw_exp: vec![0, 0, 0],
            }])
            .unwrap();
        assert_eq!(parse_model(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn non_hermitian_entry_is_named() {
        let text = r#"{"n":2,"d":1,"A":[[[[1,0],[0,1]],[[0,1],[0,0]]]]}"#;
        let err = parse_model(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("A[0]") && msg.contains("(0,1)"), "{msg}");
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_model("{\n \"n\": 1,\n \"d\": oops }").unwrap_err();
        match err {
            ModelError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_matrix_count() {
        let err = parse_model(r#"{"n":1,"d":2,"A":[[[[1,0]]]]}"#).unwrap_err();
        assert!(err.to_string().contains("d = 2"));
    }
}
