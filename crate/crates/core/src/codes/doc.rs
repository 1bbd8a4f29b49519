use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{identity_code, replacement_code, truncation_code, BlockCode};
use crate::error::{Error, Result};
use crate::qcore::linalg::ComplexMatrix;
use crate::qcore::{DimsSpec, Isometry};
use crate::region::Mode;
use crate::source::{AmplitudeDoc, CqSource};

/// Row-major matrix of an isometry with its output factor dims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryDoc {
    pub out: Vec<usize>,
    pub matrix: Vec<Vec<AmplitudeDoc>>,
}

/// On-disk code description.
///
/// `u_x.out = [|C_X|, |W_X|]`, `u_b.out = [|C_B|, L, |W_B|]`,
/// `v.out = [|X|ⁿ, |B|ⁿ, L, |W_D|]`; input dims follow from the source and `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CodeDoc {
    Identity {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        passthrough: Option<usize>,
    },
    Truncation {
        n: usize,
        rank: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        passthrough: Option<usize>,
    },
    Replacement {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        passthrough: Option<usize>,
    },
    Explicit {
        n: usize,
        #[serde(default = "one")]
        k: usize,
        u_x: IsometryDoc,
        u_b: IsometryDoc,
        v: IsometryDoc,
    },
}

fn one() -> usize {
    1
}

fn matrix(doc: &IsometryDoc, what: &str) -> Result<ComplexMatrix> {
    let rows = doc.matrix.len();
    let cols = doc.matrix.first().map_or(0, Vec::len);
    if rows == 0 || doc.matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidCode(format!("{what} matrix is empty or ragged")));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| doc.matrix[i][j].value()))
}

fn isometry(doc: &IsometryDoc, what: &str, inputs: &[(&str, usize)], outputs: &[&str]) -> Result<Isometry> {
    if doc.out.len() != outputs.len() {
        return Err(Error::InvalidCode(format!("{what} needs {} output dims", outputs.len())));
    }
    let out = DimsSpec::new(outputs.iter().copied().zip(doc.out.iter().copied()))?;
    Isometry::new(matrix(doc, what)?, DimsSpec::new(inputs.iter().copied())?, out).map_err(|e| match e {
        Error::NotIsometry(d) => Error::InvalidCode(format!("{what} is not an isometry (deviation {d:e})")),
        Error::DimensionMismatch(m) => Error::InvalidCode(format!("{what}: {m}")),
        other => other,
    })
}

impl CodeDoc {
    /// Builds the code for `src`; `mode` relabels it (assisted is always allowed).
    pub fn build(&self, src: &CqSource, mode: Mode) -> Result<BlockCode> {
        let (code, passthrough) = match self {
            CodeDoc::Identity { n, passthrough } => (identity_code(src, *n)?, *passthrough),
            CodeDoc::Truncation { n, rank, passthrough } => (truncation_code(src, *n, *rank)?, *passthrough),
            CodeDoc::Replacement { n, passthrough } => (replacement_code(src, *n)?, *passthrough),
            CodeDoc::Explicit { n, k, u_x, u_b, v } => {
                if *n == 0 {
                    return Err(Error::InvalidCode("block length must be at least 1".into()));
                }
                super::check_code_cap(src, *n, u_b.out.get(1).copied().unwrap_or(1))?;
                let nx = src.alphabet().pow(*n as u32);
                let nb = src.b_dim().pow(*n as u32);
                let u_x = isometry(u_x, "U_X", &[("Xn", nx)], &["CX", "WX"])?;
                let u_b = isometry(u_b, "U_B", &[("Bn", nb), ("B0", *k)], &["CB", "B0p", "WB"])?;
                let cx = u_x.out_dims().dim_of("CX")?;
                let cb = u_b.out_dims().dim_of("CB")?;
                let v = isometry(v, "V", &[("CX", cx), ("CB", cb), ("D0", *k)], &["Xh", "Bh", "D0p", "WD"])?;
                let code = BlockCode::new(*n, nx, nb, Mode::Assisted, u_x, u_b, v)?;
                return if code.k() == 1 && code.l() == 1 { code.with_mode(mode) } else { Ok(code) };
            }
        };
        let code = match passthrough {
            Some(k) => code.with_passthrough(k)?,
            None => code,
        };
        if code.k() == 1 && code.l() == 1 {
            code.with_mode(mode)
        } else {
            Ok(code)
        }
    }
}

pub fn load_code_str(text: &str) -> Result<CodeDoc> {
    Ok(serde_json::from_str(text)?)
}

/// Reads a JSON code document from disk.
pub fn load_code(path: impl AsRef<Path>) -> Result<CodeDoc> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::InvalidCode(format!("{}: {e}", path.as_ref().display())))?;
    load_code_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::average_fidelity;
    use crate::source::src_b;

    #[test]
    fn named_builders_parse() {
        let doc = load_code_str(r#"{"kind":"truncation","n":1,"rank":1}"#).unwrap();
        let code = doc.build(&src_b(), Mode::Unassisted).unwrap();
        assert!((average_fidelity(&src_b(), &code).unwrap().avg_fidelity - 0.75).abs() < 1e-12);
        assert!(load_code_str(r#"{"kind":"bogus","n":1}"#).is_err());
    }

    #[test]
    fn explicit_identity_roundtrip() {
        // identity on X, Bob sends B untouched, Debbie applies identity
        let id = |d: usize| -> Vec<Vec<AmplitudeDoc>> {
            (0..d).map(|i| (0..d).map(|j| AmplitudeDoc::Real(if i == j { 1.0 } else { 0.0 })).collect()).collect()
        };
        let doc = CodeDoc::Explicit {
            n: 1,
            k: 1,
            u_x: IsometryDoc { out: vec![2, 1], matrix: id(2) },
            u_b: IsometryDoc { out: vec![2, 1, 1], matrix: id(2) },
            v: IsometryDoc { out: vec![2, 2, 1, 1], matrix: id(4) },
        };
        let text = serde_json::to_string(&doc).unwrap();
        let code = load_code_str(&text).unwrap().build(&src_b(), Mode::Unassisted).unwrap();
        assert_eq!(average_fidelity(&src_b(), &code).unwrap().avg_fidelity, 1.0);
    }

    #[test]
    fn explicit_rejects_non_isometry() {
        let doc = r#"{"kind":"explicit","n":1,
            "u_x":{"out":[2,1],"matrix":[[1,0],[0,2]]},
            "u_b":{"out":[2,1,1],"matrix":[[1,0],[0,1]]},
            "v":{"out":[2,2,1,1],"matrix":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}}"#;
        let err = load_code_str(doc).unwrap().build(&src_b(), Mode::Unassisted).unwrap_err();
        assert!(matches!(err, Error::InvalidCode(_)));
    }
}
