use serde::{Deserialize, Serialize};

use super::dims::{split_indices, DimsSpec};
use super::linalg::{
    hermitian_eigenvalues, hermiticity_defect, is_finite, isometry_defect, kron, trace, ComplexMatrix,
    ComplexVector, C64, ZERO,
};
use crate::error::{Error, Result};

/// Numerical cutoffs used by validation and rank decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub iso: f64,
    pub norm: f64,
    pub rank: f64,
    pub ssa: f64,
    pub uhlmann: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-8,
            trace: 1e-8,
            psd: 1e-10,
            iso: 1e-8,
            norm: 1e-8,
            rank: 1e-10,
            ssa: 1e-8,
            uhlmann: 1e-8,
        }
    }
}

/// A validated density operator on a labelled tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: ComplexMatrix,
    dims: DimsSpec,
}

impl DensityOperator {
    pub fn new(mat: ComplexMatrix, dims: DimsSpec) -> Result<Self> {
        Self::with_tol(mat, dims, &Tolerances::default())
    }

    pub fn with_tol(mat: ComplexMatrix, dims: DimsSpec, tol: &Tolerances) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} vs subsystem product {}",
                mat.nrows(),
                dims.total()
            )));
        }
        if !is_finite(&mat) {
            return Err(Error::NonFinite);
        }
        let defect = hermiticity_defect(&mat);
        if defect > tol.herm {
            return Err(Error::NotHermitian(defect));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = hermitian_eigenvalues(&mat).last().copied().unwrap_or(0.0);
        if min < -tol.psd.max(tol.herm) {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { mat, dims })
    }

    /// Skips validation; for operators that are valid by construction.
    pub(crate) fn unchecked(mat: ComplexMatrix, dims: DimsSpec) -> Self {
        debug_assert_eq!(mat.nrows(), dims.total());
        Self { mat, dims }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self::unchecked(v * v.adjoint(), psi.dims().clone())
    }

    pub fn maximally_mixed(dims: DimsSpec) -> Self {
        let d = dims.total();
        Self::unchecked(ComplexMatrix::identity(d, d).scale(1.0 / d as f64), dims)
    }

    /// `Σ_i w_i |i⟩⟨i|` on a single labelled factor.
    pub fn diagonal(label: &str, weights: &[f64]) -> Result<Self> {
        let d = weights.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| if i == j { C64::new(weights[i], 0.0) } else { ZERO });
        Self::new(m, DimsSpec::single(label, d))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &DimsSpec {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    /// Reduced state on `keep`, factors in this operator's label order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        let positions = self.dims.positions(keep)?;
        if positions.len() == self.dims.len() {
            return Ok(self.clone());
        }
        let dims = self.dims.dims();
        let (kept, rest, kd, rd) = split_indices(&dims, &positions);
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); rd];
        for (flat, (&k, &r)) in kept.iter().zip(&rest).enumerate() {
            groups[r].push((flat, k));
        }
        let mut out = ComplexMatrix::zeros(kd, kd);
        for g in &groups {
            for &(i, ki) in g {
                for &(j, kj) in g {
                    out[(ki, kj)] += self.mat[(i, j)];
                }
            }
        }
        Ok(Self::unchecked(out, self.dims.select(&positions)))
    }

    /// `self ⊗ other`; labels must stay unique.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(Self::unchecked(kron(&self.mat, &other.mat), dims))
    }

    /// Reorders the tensor factors to `order` (a permutation of all labels).
    pub fn permuted(&self, order: &[&str]) -> Result<DensityOperator> {
        let perm = permutation(&self.dims, order)?;
        let new_dims = self.dims.select(&perm);
        let map = permutation_map(&self.dims.dims(), &perm);
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(map[i], map[j])] = self.mat[(i, j)];
            }
        }
        Ok(Self::unchecked(out, new_dims))
    }

    /// Convex mixture `Σ w_i ρ_i` of operators with identical dims.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<DensityOperator> {
        let first = parts
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty mixture".into()))?
            .1;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch("mixture of different spaces".into()));
            }
            acc += rho.mat.scale(*w);
        }
        Ok(Self::unchecked(acc, first.dims.clone()))
    }
}

/// A normalized state vector on a labelled space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: ComplexVector,
    dims: DimsSpec,
}

impl PureState {
    pub fn new(amps: ComplexVector, dims: DimsSpec) -> Result<Self> {
        Self::with_tol(amps, dims, &Tolerances::default())
    }

    pub fn with_tol(amps: ComplexVector, dims: DimsSpec, tol: &Tolerances) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes vs subsystem product {}",
                amps.len(),
                dims.total()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = amps.norm();
        if (n - 1.0).abs() > tol.norm {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amps, dims })
    }

    pub(crate) fn unchecked(amps: ComplexVector, dims: DimsSpec) -> Self {
        debug_assert_eq!(amps.len(), dims.total());
        Self { amps, dims }
    }

    /// Basis vector `|index⟩`.
    pub fn basis(dims: DimsSpec, index: usize) -> Result<Self> {
        let d = dims.total();
        if index >= d {
            return Err(Error::DimensionMismatch(format!("basis index {index} >= {d}")));
        }
        let mut v = ComplexVector::zeros(d);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self::unchecked(v, dims))
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn dims(&self) -> &DimsSpec {
        &self.dims
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    /// Amplitudes arranged as a (kept × rest) matrix so that `M M†` is the
    /// reduced state on `keep` and `Mᵀ M̄` the one on the complement.
    pub fn bipartition(&self, keep: &[&str]) -> Result<ComplexMatrix> {
        let positions = self.dims.positions(keep)?;
        let (kept, rest, kd, rd) = split_indices(&self.dims.dims(), &positions);
        let mut m = ComplexMatrix::zeros(kd, rd);
        for (flat, (&k, &r)) in kept.iter().zip(&rest).enumerate() {
            m[(k, r)] = self.amps[flat];
        }
        Ok(m)
    }

    pub fn reduced(&self, keep: &[&str]) -> Result<DensityOperator> {
        let positions = self.dims.positions(keep)?;
        let m = self.bipartition(keep)?;
        Ok(DensityOperator::unchecked(&m * m.adjoint(), self.dims.select(&positions)))
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(Self::unchecked(self.amps.kronecker(&other.amps), dims))
    }

    pub fn permuted(&self, order: &[&str]) -> Result<PureState> {
        let perm = permutation(&self.dims, order)?;
        let map = permutation_map(&self.dims.dims(), &perm);
        let mut out = ComplexVector::zeros(self.amps.len());
        for (i, &j) in map.iter().enumerate() {
            out[j] = self.amps[i];
        }
        Ok(Self::unchecked(out, self.dims.select(&perm)))
    }

    pub fn relabeled(&self, dims: DimsSpec) -> Result<PureState> {
        if dims.dims() != self.dims.dims() {
            return Err(Error::DimensionMismatch("relabel must keep dimensions".into()));
        }
        Ok(Self::unchecked(self.amps.clone(), dims))
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch("overlap of different spaces".into()));
        }
        Ok(self.amps.dotc(&other.amps).norm())
    }

    /// Applies `iso` to the factors named by its input labels; the output
    /// factors come first, followed by the untouched ones in their old order.
    pub fn apply(&self, iso: &Isometry) -> Result<PureState> {
        let in_labels: Vec<&str> = iso.in_dims.labels().collect();
        for l in &in_labels {
            if !self.dims.contains(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        let in_pos = self.dims.positions(&in_labels)?;
        let rest_pos: Vec<usize> = (0..self.dims.len()).filter(|p| !in_pos.contains(p)).collect();
        let rest_labels: Vec<String> = rest_pos.iter().map(|&p| self.dims.factors()[p].0.clone()).collect();
        let mut order: Vec<&str> = in_labels.clone();
        order.extend(rest_labels.iter().map(String::as_str));
        let aligned = self.permuted(&order)?;
        if aligned.dims.select(&(0..in_labels.len()).collect::<Vec<_>>()).dims() != iso.in_dims.dims() {
            return Err(Error::DimensionMismatch("isometry input dims do not match state".into()));
        }
        let din = iso.in_dims.total();
        let rest = self.amps.len() / din;
        let dout = iso.out_dims.total();
        let mut out = ComplexVector::zeros(dout * rest);
        for o in 0..dout {
            for i in 0..din {
                let v = iso.mat[(o, i)];
                if v == ZERO {
                    continue;
                }
                for r in 0..rest {
                    out[o * rest + r] += v * aligned.amps[i * rest + r];
                }
            }
        }
        let rest_dims = self.dims.select(&rest_pos);
        Ok(Self::unchecked(out, iso.out_dims.concat(&rest_dims)?))
    }
}

/// A linear isometry between labelled spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    mat: ComplexMatrix,
    in_dims: DimsSpec,
    out_dims: DimsSpec,
}

impl Isometry {
    pub fn new(mat: ComplexMatrix, in_dims: DimsSpec, out_dims: DimsSpec) -> Result<Self> {
        Self::with_tol(mat, in_dims, out_dims, &Tolerances::default())
    }

    pub fn with_tol(mat: ComplexMatrix, in_dims: DimsSpec, out_dims: DimsSpec, tol: &Tolerances) -> Result<Self> {
        if mat.ncols() != in_dims.total() || mat.nrows() != out_dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "isometry matrix {}x{} vs dims {} -> {}",
                mat.nrows(),
                mat.ncols(),
                in_dims.total(),
                out_dims.total()
            )));
        }
        if mat.nrows() < mat.ncols() {
            return Err(Error::DimensionMismatch("isometry codomain smaller than domain".into()));
        }
        if !is_finite(&mat) {
            return Err(Error::NonFinite);
        }
        let defect = isometry_defect(&mat);
        if defect > tol.iso {
            return Err(Error::NotIsometry(defect));
        }
        Ok(Self { mat, in_dims, out_dims })
    }

    pub(crate) fn unchecked(mat: ComplexMatrix, in_dims: DimsSpec, out_dims: DimsSpec) -> Self {
        Self { mat, in_dims, out_dims }
    }

    pub fn identity(in_dims: DimsSpec, out_dims: DimsSpec) -> Result<Self> {
        let d = in_dims.total();
        Self::new(ComplexMatrix::identity(out_dims.total(), d), in_dims, out_dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn in_dims(&self) -> &DimsSpec {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &DimsSpec {
        &self.out_dims
    }

    /// `self ⊗ other` acting on the concatenated input and output factors.
    pub fn tensor(&self, other: &Isometry) -> Result<Isometry> {
        Ok(Self::unchecked(
            kron(&self.mat, &other.mat),
            self.in_dims.concat(&other.in_dims)?,
            self.out_dims.concat(&other.out_dims)?,
        ))
    }
}

fn permutation(dims: &DimsSpec, order: &[&str]) -> Result<Vec<usize>> {
    if order.len() != dims.len() {
        return Err(Error::DimensionMismatch("permutation must name every factor".into()));
    }
    let mut perm = Vec::with_capacity(order.len());
    for l in order {
        let p = dims.index_of(l)?;
        if perm.contains(&p) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
        perm.push(p);
    }
    Ok(perm)
}

/// `map[old_flat] = new_flat` when factors are reordered so that new factor
/// `k` is old factor `perm[k]`.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    use super::dims::{ravel, unravel};
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut old = vec![0; dims.len()];
    let mut new = vec![0; dims.len()];
    (0..total)
        .map(|i| {
            unravel(i, dims, &mut old);
            for (k, &p) in perm.iter().enumerate() {
                new[k] = old[p];
            }
            ravel(&new, &new_dims)
        })
        .collect()
}
