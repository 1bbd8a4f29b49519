use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of labelled tensor factors, e.g. `[("X", 2), ("B", 2), ("R", 2)]`.
///
/// The first factor is the most significant one in the row-major index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsSpec {
    factors: Vec<(String, usize)>,
}

impl DimsSpec {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "subsystem `{label}` has dimension 0"
                )));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { factors })
    }

    /// A single unlabelled-looking factor.
    pub fn single(label: &str, dim: usize) -> Self {
        Self::new([(label, dim)]).expect("single factor is always valid")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|(l, _)| l.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total(&self) -> usize {
        self.factors.iter().map(|(_, d)| *d).product()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.index_of(label)?].1)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|(l, _)| l == label)
    }

    /// Positions of `labels`, returned in this spec's own order.
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.index_of(l)?;
            if pos.contains(&p) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            pos.push(p);
        }
        pos.sort_unstable();
        Ok(pos)
    }

    /// Sub-spec with the factors at `positions` (kept in order).
    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            factors: positions.iter().map(|&p| self.factors[p].clone()).collect(),
        }
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &DimsSpec) -> Result<Self> {
        Self::new(self.factors.iter().chain(other.factors.iter()).cloned())
    }

    /// Same dimensions, labels rewritten by `f`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        Self::new(self.factors.iter().map(|(l, d)| (f(l), *d)))
    }
}

/// Mixed-radix digits of `index` for `dims` (most significant first).
pub(crate) fn unravel(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

pub(crate) fn ravel(digits: &[usize], dims: &[usize]) -> usize {
    digits
        .iter()
        .zip(dims)
        .fold(0, |acc, (&d, &n)| acc * n + d)
}

/// For every flat index of a space with `dims`, its (kept, traced) flat indices
/// when splitting the factors into `keep` and the complement.
pub(crate) fn split_indices(dims: &[usize], keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let total: usize = dims.iter().product();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kd: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let rd: Vec<usize> = rest.iter().map(|&k| dims[k]).collect();
    let mut digits = vec![0; dims.len()];
    let mut kdig = vec![0; keep.len()];
    let mut rdig = vec![0; rest.len()];
    let mut kept_idx = Vec::with_capacity(total);
    let mut rest_idx = Vec::with_capacity(total);
    for i in 0..total {
        unravel(i, dims, &mut digits);
        for (j, &k) in keep.iter().enumerate() {
            kdig[j] = digits[k];
        }
        for (j, &k) in rest.iter().enumerate() {
            rdig[j] = digits[k];
        }
        kept_idx.push(ravel(&kdig, &kd));
        rest_idx.push(ravel(&rdig, &rd));
    }
    (kept_idx, rest_idx, kd.iter().product(), rd.iter().product())
}
