use super::dims::DimsSpec;
use super::linalg::{extend_orthonormal, fix_phase, hermitian_eigen, ComplexMatrix, ComplexVector, C64};
use super::state::{DensityOperator, Isometry, PureState, Tolerances};
use crate::error::{Error, Result};

/// Canonical purification `Σ_i √λ_i |e_i⟩|i⟩_R` with `|R| = rank(ρ)`.
///
/// Eigenvalues are taken in descending order and each eigenvector is
/// phase-fixed so that its first nonzero entry is real positive.
pub fn purify(rho: &DensityOperator, r_label: &str) -> Result<PureState> {
    purify_with_tol(rho, r_label, None, &Tolerances::default())
}

/// As [`purify`], with `|R|` padded up to `r_dim` when given.
pub fn purify_with_tol(
    rho: &DensityOperator,
    r_label: &str,
    r_dim: Option<usize>,
    tol: &Tolerances,
) -> Result<PureState> {
    if rho.dims().contains(r_label) {
        return Err(Error::DuplicateLabel(r_label.to_string()));
    }
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let rank = vals.iter().filter(|&&v| v > tol.rank).count().max(1);
    let rd = r_dim.unwrap_or(rank);
    if rd < rank {
        return Err(Error::DimensionMismatch(format!("reference dimension {rd} below rank {rank}")));
    }
    let d = rho.dim();
    let mut amps = ComplexVector::zeros(d * rd);
    let mut weight = 0.0;
    for (i, &lam) in vals.iter().take(rank).enumerate() {
        let lam = lam.max(0.0);
        weight += lam;
        let mut e = vecs.column(i).into_owned();
        fix_phase(&mut e, 1e-12);
        let s = lam.sqrt();
        for b in 0..d {
            amps[b * rd + i] = e[b] * s;
        }
    }
    // Renormalize the weight lost to dropped sub-tolerance eigenvalues.
    amps /= C64::new(weight.sqrt(), 0.0);
    let dims = rho.dims().concat(&DimsSpec::single(r_label, rd))?;
    PureState::with_tol(amps, dims, tol)
}

/// Isometry `V: B → C` maximizing the overlap of `(1_A ⊗ V)|ρ⟩` with `|σ⟩`.
///
/// `B` and `C` are the complements of `a_labels` in the two states. When
/// `|C| < |B|`, the target space is padded with an extra factor `pad` on
/// which `σ` is taken to sit in `|0⟩`.
pub fn uhlmann_isometry(rho_ab: &PureState, sigma_ac: &PureState, a_labels: &[&str]) -> Result<Isometry> {
    let m = rho_ab.bipartition(a_labels)?;
    let mut n = sigma_ac.bipartition(a_labels)?;
    let a_pos = rho_ab.dims().positions(a_labels)?;
    let a_pos_s = sigma_ac.dims().positions(a_labels)?;
    if rho_ab.dims().select(&a_pos) != sigma_ac.dims().select(&a_pos_s) {
        return Err(Error::DimensionMismatch("shared subsystems differ".into()));
    }
    let b_pos: Vec<usize> = (0..rho_ab.dims().len()).filter(|p| !a_pos.contains(p)).collect();
    let c_pos: Vec<usize> = (0..sigma_ac.dims().len()).filter(|p| !a_pos_s.contains(p)).collect();
    let b_dims = rho_ab.dims().select(&b_pos);
    let mut c_dims = sigma_ac.dims().select(&c_pos);
    let bd = m.ncols();
    if n.ncols() < bd {
        let factor = bd.div_ceil(n.ncols());
        let mut padded = ComplexMatrix::zeros(n.nrows(), n.ncols() * factor);
        for i in 0..n.nrows() {
            for j in 0..n.ncols() {
                padded[(i, j * factor)] = n[(i, j)];
            }
        }
        n = padded;
        c_dims = c_dims.concat(&DimsSpec::single("pad", factor))?;
    }
    let cd = n.ncols();
    // Overlap ⟨σ|(1⊗V)|ρ⟩ = Tr(A V) with A = (N†M)ᵀ.
    let a = (n.adjoint() * &m).transpose();
    let svd = a.svd(true, true);
    let u = svd.u.expect("requested U");
    let w = svd.v_t.expect("requested Vᵀ").adjoint();
    let tol = Tolerances::default();
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol.rank {
            ins.push(u.column(k).into_owned());
            outs.push(w.column(k).into_owned());
        }
    }
    let ins = extend_orthonormal(&ins, bd, bd);
    let outs = extend_orthonormal(&outs, cd, bd);
    let mut v = ComplexMatrix::zeros(cd, bd);
    for (i, o) in ins.iter().zip(&outs) {
        v += o * i.adjoint();
    }
    Isometry::new(v, b_dims, c_dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::metrics::{fidelity, trace_distance};

    #[test]
    fn purification_of_pure_state_has_unit_reference() {
        let rho = DensityOperator::diagonal("B", &[1.0, 0.0]).unwrap();
        let psi = purify(&rho, "R").unwrap();
        assert_eq!(psi.dims().dim_of("R").unwrap(), 1);
        assert!((psi.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purification_recovers_marginal() {
        let rho = DensityOperator::diagonal("B", &[0.25, 0.75]).unwrap();
        let psi = purify(&rho, "R").unwrap();
        let back = psi.reduced(&["B"]).unwrap();
        assert!(trace_distance(&back, &rho).unwrap() < 1e-12);
        // Descending order: the 3/4 component comes first on R.
        assert!((psi.amplitudes()[1 * 2].re - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn uhlmann_reaches_marginal_fidelity() {
        let rho = DensityOperator::diagonal("A", &[0.5, 0.5]).unwrap();
        let sigma = DensityOperator::diagonal("A", &[0.75, 0.25]).unwrap();
        let p = purify(&rho, "B").unwrap();
        let q = purify(&sigma, "C").unwrap();
        let v = uhlmann_isometry(&p, &q, &["A"]).unwrap();
        let moved = p.apply(&v).unwrap().permuted(&["A", "C"]).unwrap();
        let achieved = moved.overlap(&q).unwrap();
        let want = fidelity(&rho, &sigma).unwrap();
        assert!((achieved - want).abs() < 1e-10);
    }
}
