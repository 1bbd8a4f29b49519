use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{c, ComplexMatrix};
use crate::qcore::random::haar_isometry;
use crate::qcore::{DimsSpec, Isometry, Tolerances};

/// Stinespring isometry `V: B → C ⊗ W`; the channel is `T(ρ) = Tr_C VρV†`.
///
/// Rows of the matrix are indexed by `c·|W| + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParam {
    stinespring: Isometry,
    c_dim: usize,
    w_dim: usize,
}

impl ChannelParam {
    pub fn new(mat: ComplexMatrix, b: usize, c_dim: usize, w_dim: usize) -> Result<Self> {
        Self::with_tol(mat, b, c_dim, w_dim, &Tolerances::default())
    }

    pub fn with_tol(mat: ComplexMatrix, b: usize, c_dim: usize, w_dim: usize, tol: &Tolerances) -> Result<Self> {
        if c_dim * w_dim < b {
            return Err(Error::DimensionMismatch(format!(
                "|C|·|W| = {} below |B| = {b}",
                c_dim * w_dim
            )));
        }
        let iso = Isometry::with_tol(
            mat,
            DimsSpec::single("B", b),
            DimsSpec::new([("C", c_dim), ("W", w_dim)])?,
            tol,
        )?;
        Ok(Self { stinespring: iso, c_dim, w_dim })
    }

    pub(crate) fn unchecked(mat: ComplexMatrix, b: usize, c_dim: usize, w_dim: usize) -> Self {
        let iso = Isometry::unchecked(
            mat,
            DimsSpec::single("B", b),
            DimsSpec::new([("C", c_dim), ("W", w_dim)]).expect("distinct labels"),
        );
        Self { stinespring: iso, c_dim, w_dim }
    }

    /// `|b⟩ ↦ |b⟩_C|0⟩_W` (padded): the constant channel.
    pub fn trivial(b: usize, c_dim: usize, w_dim: usize) -> Result<Self> {
        if c_dim < b {
            return Err(Error::DimensionMismatch("trivial channel needs |C| ≥ |B|".into()));
        }
        let m = ComplexMatrix::from_fn(c_dim * w_dim, b, |row, col| {
            if row == col * w_dim {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Self::new(m, b, c_dim, w_dim)
    }

    /// `|b⟩ ↦ |0⟩_C|b⟩_W` (padded): `W` receives all of `B`.
    pub fn identity_to_w(b: usize, c_dim: usize, w_dim: usize) -> Result<Self> {
        if w_dim < b {
            return Err(Error::DimensionMismatch("identity channel needs |W| ≥ |B|".into()));
        }
        Self::new(ComplexMatrix::identity(c_dim * w_dim, b), b, c_dim, w_dim)
    }

    /// For `B = B′ ⊗ B″` with `|B″| = keep`: `C = B′`, `W = B″`.
    pub fn split(b: usize, keep: usize) -> Result<Self> {
        if keep == 0 || b % keep != 0 {
            return Err(Error::DimensionMismatch(format!("{keep} does not divide {b}")));
        }
        Self::new(ComplexMatrix::identity(b, b), b, b / keep, keep)
    }

    pub fn random(rng: &mut impl Rng, b: usize, c_dim: usize, w_dim: usize) -> Result<Self> {
        Self::new(haar_isometry(rng, c_dim * w_dim, b), b, c_dim, w_dim)
    }

    pub fn isometry(&self) -> &Isometry {
        &self.stinespring
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.stinespring.matrix()
    }

    pub fn b_dim(&self) -> usize {
        self.stinespring.matrix().ncols()
    }

    pub fn c_dim(&self) -> usize {
        self.c_dim
    }

    pub fn w_dim(&self) -> usize {
        self.w_dim
    }
}

/// Serialized form: `matrix` rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParamDoc {
    pub b: usize,
    pub c: usize,
    pub w: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&ChannelParam> for ChannelParamDoc {
    fn from(p: &ChannelParam) -> Self {
        let m = p.matrix();
        ChannelParamDoc {
            b: p.b_dim(),
            c: p.c_dim,
            w: p.w_dim,
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<ChannelParamDoc> for ChannelParam {
    type Error = Error;

    fn try_from(d: ChannelParamDoc) -> Result<Self> {
        let rows = d.c * d.w;
        if d.matrix.len() != rows || d.matrix.iter().any(|r| r.len() != d.b) {
            return Err(Error::DimensionMismatch("channel matrix shape".into()));
        }
        let m = ComplexMatrix::from_fn(rows, d.b, |i, j| c(d.matrix[i][j][0], d.matrix[i][j][1]));
        ChannelParam::new(m, d.b, d.c, d.w)
    }
}

impl Serialize for ChannelParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelParamDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChannelParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ChannelParamDoc::deserialize(d)?;
        ChannelParam::try_from(doc).map_err(serde::de::Error::custom)
    }
}
