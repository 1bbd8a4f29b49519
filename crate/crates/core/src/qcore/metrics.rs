use super::linalg::{hermitian_eigen, hermitian_eigenvalues, singular_values, trace, ComplexMatrix};
use super::state::{DensityOperator, PureState};
use crate::error::{Error, Result};

fn same_space(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dims().dims() != sigma.dims().dims() {
        return Err(Error::DimensionMismatch(format!(
            "states on {:?} and {:?}",
            rho.dims().dims(),
            sigma.dims().dims()
        )));
    }
    Ok(())
}

/// `Tr ρ²`; 1 exactly for pure states.
pub fn purity(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    trace(&(m * m)).re
}

/// `F(ρ,σ) = ‖√ρ√σ‖₁`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_space(rho, sigma)?;
    // A pure argument allows the closed form √⟨ψ|ρ|ψ⟩.
    for (pure, other) in [(sigma, rho), (rho, sigma)] {
        if (purity(pure) - 1.0).abs() < 1e-12 {
            let (vals, vecs) = hermitian_eigen(pure.matrix());
            debug_assert!(vals[0] > 0.5);
            let v = vecs.column(0);
            let e = (v.adjoint() * other.matrix() * v)[(0, 0)].re;
            return Ok(e.max(0.0).sqrt().min(1.0));
        }
    }
    // ‖D_ρ^{1/2} U_ρ† U_σ D_σ^{1/2}‖₁ on the numerical supports; singular values keep
    // round-off eigenvalues from contributing their square roots.
    let a = support_root(rho.matrix());
    let b = support_root(sigma.matrix());
    let f: f64 = singular_values(&(a.adjoint() * b)).iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `U D^{1/2}` restricted to eigenvalues above round-off, so that `m ≈ X X†`.
fn support_root(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let cutoff = 8.0 * f64::EPSILON * m.nrows() as f64;
    let keep = vals.iter().take_while(|&&v| v > cutoff).count().max(1);
    ComplexMatrix::from_fn(m.nrows(), keep, |i, k| vecs[(i, k)] * vals[k].max(0.0).sqrt())
}

/// `√⟨ψ|ρ|ψ⟩`.
pub fn fidelity_with_pure(rho: &DensityOperator, psi: &PureState) -> Result<f64> {
    if rho.dims().dims() != psi.dims().dims() {
        return Err(Error::DimensionMismatch("state and vector on different spaces".into()));
    }
    let v = psi.amplitudes();
    let e = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
    Ok(e.max(0.0).sqrt().min(1.0))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_space(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// Trace norm of an arbitrary matrix.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `h(ε)` in bits.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfDomain(format!("binary entropy argument {eps}")));
    }
    Ok(binary_entropy_unchecked(eps))
}

pub(crate) fn binary_entropy_unchecked(eps: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(eps) + term(1.0 - eps)
}

/// `S(ρ‖σ)` in bits; infinite when the support of ρ is not inside that of σ.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator, tol_rank: f64) -> Result<f64> {
    same_space(rho, sigma)?;
    let (p, u) = hermitian_eigen(rho.matrix());
    let (q, v) = hermitian_eigen(sigma.matrix());
    let overlap = u.adjoint() * &v;
    let mut d = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= tol_rank {
            continue;
        }
        d += pi * pi.log2();
        for (j, &qj) in q.iter().enumerate() {
            let w = overlap[(i, j)].norm_sqr();
            if w * pi <= tol_rank * tol_rank {
                continue;
            }
            if qj <= tol_rank {
                return Ok(f64::INFINITY);
            }
            d -= pi * w * qj.log2();
        }
    }
    Ok(d.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::dims::DimsSpec;
    use crate::qcore::linalg::c;

    #[test]
    fn fidelity_of_commuting_states() {
        let a = DensityOperator::diagonal("A", &[0.5, 0.5]).unwrap();
        let b = DensityOperator::diagonal("A", &[0.75, 0.25]).unwrap();
        let want = (0.375f64).sqrt() + (0.125f64).sqrt();
        assert!((fidelity(&a, &b).unwrap() - want).abs() < 1e-12);
        assert!((fidelity(&b, &a).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn fidelity_with_pure_argument() {
        let a = DensityOperator::diagonal("A", &[0.5, 0.5]).unwrap();
        let z = DensityOperator::diagonal("A", &[1.0, 0.0]).unwrap();
        assert!((fidelity(&a, &z).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let o = DensityOperator::diagonal("A", &[0.0, 1.0]).unwrap();
        assert!(fidelity(&z, &o).unwrap() < 1e-12);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-3.0, 0.0)]);
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_domain() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn relative_entropy_support_and_value() {
        let a = DensityOperator::diagonal("A", &[0.5, 0.5]).unwrap();
        let z = DensityOperator::diagonal("A", &[1.0, 0.0]).unwrap();
        assert!(relative_entropy(&a, &z, 1e-10).unwrap().is_infinite());
        // D(|0⟩⟨0| ‖ I/2) = 1
        assert!((relative_entropy(&z, &a, 1e-10).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_dims_are_rejected() {
        let a = DensityOperator::diagonal("A", &[0.5, 0.5]).unwrap();
        let b = DensityOperator::maximally_mixed(DimsSpec::single("A", 3));
        assert!(trace_distance(&a, &b).is_err());
    }
}
