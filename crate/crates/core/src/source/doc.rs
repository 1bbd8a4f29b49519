use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CqSource;
use crate::error::{Error, Result};
use crate::qcore::linalg::{c, ComplexMatrix, ComplexVector};
use crate::qcore::{DensityOperator, DimsSpec};

/// A complex number written either as `re` or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeDoc {
    Real(f64),
    Complex([f64; 2]),
}

impl AmplitudeDoc {
    pub(crate) fn value(self) -> crate::qcore::C64 {
        match self {
            AmplitudeDoc::Real(re) => c(re, 0.0),
            AmplitudeDoc::Complex([re, im]) => c(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrDims {
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "R")]
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDoc {
    /// Row-major amplitudes of `ψ_x` on `B ⊗ R` (B most significant).
    Pure { amplitudes: Vec<AmplitudeDoc>, dims: BrDims },
    /// `ρ_x^B`, purified canonically on load.
    Mixed { density: Vec<Vec<AmplitudeDoc>>, dim: usize },
}

/// On-disk source description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub probs: Vec<f64>,
    pub states: Vec<StateDoc>,
}

impl SourceDoc {
    pub fn into_source(self) -> Result<CqSource> {
        if self.states.is_empty() {
            return Err(Error::InvalidSource("no states".into()));
        }
        let any_mixed = self.states.iter().any(|s| matches!(s, StateDoc::Mixed { .. }));
        let source = if any_mixed {
            let densities = self
                .states
                .iter()
                .map(|s| match s {
                    StateDoc::Mixed { density, dim } => density_from_rows(density, *dim),
                    StateDoc::Pure { amplitudes, dims } => {
                        let v = vector(amplitudes, dims)?;
                        let m = ComplexMatrix::from_fn(dims.b, dims.r, |i, j| v[i * dims.r + j]);
                        DensityOperator::new(&m * m.adjoint(), DimsSpec::single("B", dims.b))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let b = densities[0].dim();
            if densities.iter().any(|d| d.dim() != b) {
                return Err(Error::InvalidSource("inconsistent dims".into()));
            }
            CqSource::from_mixed(self.probs, &densities)?
        } else {
            let mut dims0 = None;
            let mut amps = Vec::new();
            for s in &self.states {
                let StateDoc::Pure { amplitudes, dims } = s else { unreachable!() };
                if *dims0.get_or_insert(*dims) != *dims {
                    return Err(Error::InvalidSource("inconsistent dims".into()));
                }
                amps.push(vector(amplitudes, dims)?);
            }
            let d = dims0.expect("at least one state");
            CqSource::new(self.probs, amps, d.b, d.r).map_err(|e| match e {
                Error::NotNormalized(n) => Error::InvalidSource(format!("state not normalized (norm {n})")),
                other => other,
            })?
        };
        Ok(match self.name {
            Some(n) => source.with_name(n),
            None => source,
        })
    }

    /// Pure-state description of a loaded source.
    pub fn from_source(src: &CqSource) -> Self {
        let dims = BrDims { b: src.b_dim(), r: src.r_dim() };
        SourceDoc {
            name: src.name().map(str::to_string),
            probs: src.probs().to_vec(),
            states: src
                .states()
                .iter()
                .map(|s| StateDoc::Pure {
                    amplitudes: s.amplitudes().iter().map(|z| AmplitudeDoc::Complex([z.re, z.im])).collect(),
                    dims,
                })
                .collect(),
        }
    }
}

fn vector(amps: &[AmplitudeDoc], dims: &BrDims) -> Result<ComplexVector> {
    if amps.len() != dims.b * dims.r {
        return Err(Error::InvalidSource(format!(
            "{} amplitudes for dims B={} R={}",
            amps.len(),
            dims.b,
            dims.r
        )));
    }
    Ok(ComplexVector::from_iterator(amps.len(), amps.iter().map(|a| a.value())))
}

fn density_from_rows(rows: &[Vec<AmplitudeDoc>], dim: usize) -> Result<DensityOperator> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidSource(format!("density matrix is not {dim}x{dim}")));
    }
    let m = ComplexMatrix::from_fn(dim, dim, |i, j| rows[i][j].value());
    DensityOperator::new(m, DimsSpec::single("B", dim))
}

pub fn load_source_str(text: &str) -> Result<CqSource> {
    let doc: SourceDoc = serde_json::from_str(text)?;
    doc.into_source()
}

/// Reads a JSON source document from disk.
pub fn load_source(path: impl AsRef<Path>) -> Result<CqSource> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::InvalidSource(format!("{}: {e}", path.as_ref().display())))?;
    load_source_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{src_a, src_b};

    #[test]
    fn loads_src_a() {
        let s = load_source_str(
            r#"{"name":"SRC-A","probs":[0.5,0.5],"states":[
                {"amplitudes":[1,0],"dims":{"B":2,"R":1}},
                {"amplitudes":[[0,0],[1,0]],"dims":{"B":2,"R":1}}]}"#,
        )
        .unwrap();
        assert_eq!(s, src_a());
    }

    #[test]
    fn rejects_unnormalized_probs() {
        let e = load_source_str(
            r#"{"probs":[0.45,0.45],"states":[
                {"amplitudes":[1,0],"dims":{"B":2,"R":1}},
                {"amplitudes":[0,1],"dims":{"B":2,"R":1}}]}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("probs not normalized"));
    }

    #[test]
    fn rejects_unnormalized_state_and_bad_dims() {
        let bad_norm = r#"{"probs":[1],"states":[{"amplitudes":[1,1],"dims":{"B":2,"R":1}}]}"#;
        assert!(load_source_str(bad_norm).is_err());
        let bad_dims = r#"{"probs":[0.5,0.5],"states":[
            {"amplitudes":[1,0],"dims":{"B":2,"R":1}},
            {"amplitudes":[1,0,0,0],"dims":{"B":2,"R":2}}]}"#;
        assert!(load_source_str(bad_dims).is_err());
        assert!(matches!(load_source_str("{"), Err(Error::Document(_))));
    }

    #[test]
    fn mixed_states_are_purified_and_padded() {
        let s = load_source_str(
            r#"{"probs":[0.5,0.5],"states":[
                {"density":[[0.5,0],[0,0.5]],"dim":2},
                {"amplitudes":[1,0],"dims":{"B":2,"R":1}}]}"#,
        )
        .unwrap();
        assert_eq!(s.r_dim(), 2);
        assert!((s.rho_b(0).matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((s.rho_b(1).matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn document_roundtrip() {
        let text = serde_json::to_string(&SourceDoc::from_source(&src_b())).unwrap();
        assert_eq!(load_source_str(&text).unwrap(), src_b());
    }
}
