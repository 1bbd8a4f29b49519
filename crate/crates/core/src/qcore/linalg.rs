//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest absolute entry of `m − m†`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    if m.nrows() == 2 {
        return eigenvalues_2x2(m);
    }
    let mut vals: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

fn eigenvalues_2x2(m: &ComplexMatrix) -> Vec<f64> {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    vec![mean + disc, mean - disc]
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues descending,
/// eigenvectors as matching columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

/// Shannon entropy (bits) of a spectrum; entries in `[-tol_psd, 0)` count as zero.
pub fn spectrum_entropy(vals: &[f64]) -> f64 {
    let s: f64 = vals
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum();
    s.max(0.0)
}

/// Nonzero spectrum of `F F†`, computed through the smaller Gram matrix.
pub fn gram_spectrum(f: &ComplexMatrix) -> Vec<f64> {
    if f.nrows() <= f.ncols() {
        hermitian_eigenvalues(&(f * f.adjoint()))
    } else {
        hermitian_eigenvalues(&(f.adjoint() * f))
    }
}

/// `S(F F†)` in bits.
pub fn factor_entropy(f: &ComplexMatrix) -> f64 {
    spectrum_entropy(&gram_spectrum(f))
}

/// Principal square root of a PSD matrix (negative eigenvalues clamped).
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)),
    );
    &vecs * ComplexMatrix::from_diagonal(&d) * vecs.adjoint()
}

/// `f(M)` for Hermitian `M`, applied on the spectrum.
pub fn hermitian_apply(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&v| C64::new(f(v), 0.0)));
    &vecs * ComplexMatrix::from_diagonal(&d) * vecs.adjoint()
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Kronecker product with the first operand as the most significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

/// Deviation `max |(M†M − I)_{ij}|`.
pub fn isometry_defect(m: &ComplexMatrix) -> f64 {
    let g = m.adjoint() * m;
    let n = g.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Polar factor `Y (Y†Y)^{-1/2}`; the nearest isometry to a full-column-rank `Y`.
pub fn polar_isometry(y: &ComplexMatrix) -> ComplexMatrix {
    let g = y.adjoint() * y;
    y * hermitian_apply(&g, |v| 1.0 / v.max(1e-300).sqrt())
}

/// Extends the orthonormal columns of `partial` (in a `rows`-dim space) to
/// `want` orthonormal columns by Gram-Schmidt over the standard basis.
pub fn extend_orthonormal(partial: &[ComplexVector], rows: usize, want: usize) -> Vec<ComplexVector> {
    let mut cols: Vec<ComplexVector> = partial.to_vec();
    let mut e = 0;
    while cols.len() < want && e < rows {
        let mut v = ComplexVector::from_fn(rows, |i, _| if i == e { ONE } else { ZERO });
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v / C64::new(n, 0.0));
        }
        e += 1;
    }
    cols
}

/// Multiplies `v` by the unit phase that makes its first entry above `tol` real positive.
pub fn fix_phase(v: &mut ComplexVector, tol: f64) {
    if let Some(first) = v.iter().find(|z| z.norm() > tol).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_eigenvalues_match_general_solver() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(0.3, 0.0)]);
        let fast = eigenvalues_2x2(&m);
        let mut slow: Vec<f64> = hermitian_part(&m).symmetric_eigenvalues().iter().copied().collect();
        slow.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn gram_spectrum_is_side_independent() {
        let f = ComplexMatrix::from_fn(2, 5, |i, j| c((i + 2 * j) as f64 * 0.1, (i * j) as f64 * 0.05));
        let a = gram_spectrum(&f);
        let b = gram_spectrum(&f.adjoint());
        assert!((spectrum_entropy(&a) - spectrum_entropy(&b)).abs() < 1e-12);
    }

    #[test]
    fn polar_factor_is_isometry() {
        let y = ComplexMatrix::from_fn(4, 2, |i, j| c(1.0 + i as f64, (j as f64) - 0.5 * i as f64));
        assert!(isometry_defect(&polar_isometry(&y)) < 1e-12);
    }

    #[test]
    fn extension_is_orthonormal() {
        let v = ComplexVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8), ZERO]);
        let cols = extend_orthonormal(&[v], 3, 3);
        let m = ComplexMatrix::from_columns(&cols);
        assert!(isometry_defect(&m) < 1e-12);
    }
}
