use super::profile::{genericity_report, TOL_GENERIC};
use super::CqSource;
use crate::error::{Error, Result};
use crate::qcore::linalg::{fix_phase, hermitian_eigen, ComplexMatrix, C64};
use crate::qcore::purify::{purify_with_tol, uhlmann_isometry};
use crate::qcore::Tolerances;

/// Operator `T_x` on `R` with `(1_B ⊗ T_x)|ψ_{x0}⟩ = |ψ_x⟩`.
///
/// With `ρ_{x0} = Σ λ_k e_k e_k†` and `ρ_x = Σ μ_j f_j f_j†`, `T = V·P·U₀†` where
/// `U₀` maps the canonical purification of `ρ_{x0}` onto `ψ_{x0}`,
/// `P_{jk} = ⟨e_k|f_j⟩ √(μ_j/λ_k)` carries it to the canonical purification of
/// `ρ_x`, and `V` is the Uhlmann isometry onto `ψ_x`. `‖T‖_∞ ≤ 1/√λ_min`.
pub fn transfer_operator(src: &CqSource, x0: usize, x: usize) -> Result<ComplexMatrix> {
    let nx = src.alphabet();
    if x0 >= nx || x >= nx {
        return Err(Error::OutOfDomain(format!("letter index out of range 0..{nx}")));
    }
    let (b, r) = (src.b_dim(), src.r_dim());
    let (lam, e) = hermitian_eigen(src.rho_b(x0).matrix());
    let lam_min = lam.last().copied().unwrap_or(0.0);
    if lam_min <= TOL_GENERIC {
        return Err(Error::NotGeneric(format!(
            "ψ_{x0}^B has minimum eigenvalue {lam_min:e}"
        )));
    }
    if x == x0 {
        return Ok(ComplexMatrix::identity(r, r));
    }
    let mut e = e;
    for k in 0..b {
        let mut col = e.column(k).into_owned();
        fix_phase(&mut col, 1e-12);
        e.set_column(k, &col);
    }
    // U₀|k⟩ = (e_k† ⊗ 1)|ψ_{x0}⟩ / √λ_k, an isometry from R₀ (dim |B|) into R.
    let m0 = src.state_matrix(x0);
    let u0 = ComplexMatrix::from_fn(r, b, |row, k| {
        (0..b).map(|bb| e[(bb, k)].conj() * m0[(bb, row)]).sum::<C64>() / lam[k].sqrt()
    });
    let tol = Tolerances::default();
    let rho_x = src.rho_b(x);
    let phi_x = purify_with_tol(&rho_x, "Rt", Some(b), &tol)?;
    let (mu, _) = hermitian_eigen(rho_x.matrix());
    // Recover the eigenvectors actually used by the canonical purification.
    let pm = phi_x.bipartition(&["B"])?;
    let p = ComplexMatrix::from_fn(b, b, |j, k| {
        if mu[j] <= tol.rank {
            return C64::new(0.0, 0.0);
        }
        let fj = pm.column(j) / C64::new(mu[j].sqrt(), 0.0);
        let alpha = e.column(k).dotc(&fj);
        alpha * (mu[j] / lam[k]).sqrt()
    });
    let psi_x = src.states()[x].clone();
    let v = uhlmann_isometry(&phi_x, &psi_x, &["B"])?;
    let v = v.matrix();
    if v.nrows() != r {
        return Err(Error::DimensionMismatch("reference smaller than |B|".into()));
    }
    Ok(v * p * u0.adjoint())
}

/// `δ′ = (1/λ₀)·√(s(2−s))` with `s = √(δ ln2 / (2p(x₀)))` clamped to `[0, 1]`.
pub fn delta_prime(src: &CqSource, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::OutOfDomain(format!("δ = {delta}")));
    }
    let g = genericity_report(src);
    if !g.is_generic {
        return Err(Error::NotGeneric("no letter with full-support marginal".into()));
    }
    let p0 = src.probs()[g.witness];
    let s = (delta * std::f64::consts::LN_2 / (2.0 * p0)).sqrt().min(1.0);
    Ok((s * (2.0 - s)).sqrt() / g.lambda0)
}

/// `‖(1 ⊗ T)|ψ_{x0}⟩ − |ψ_x⟩‖`.
pub fn reconstruction_error(src: &CqSource, x0: usize, x: usize, t: &ComplexMatrix) -> f64 {
    let m0 = src.state_matrix(x0);
    let mx = src.state_matrix(x);
    (m0 * t.transpose() - mx).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::metrics::operator_norm;
    use crate::qcore::random::rng_from_seed;
    use crate::source::{random_source, src_a, src_b};

    /// Independent route: `Tᵀ = M₀⁺ M_x` solves `M₀ Tᵀ = M_x` when `M₀` has full row rank.
    fn pseudo_inverse_transfer(src: &CqSource, x0: usize, x: usize) -> ComplexMatrix {
        let m0 = src.state_matrix(x0);
        let pinv = m0.clone().pseudo_inverse(1e-12).unwrap();
        (pinv * src.state_matrix(x)).transpose()
    }

    #[test]
    fn src_b_transfer_maps_bell_to_product() {
        let src = src_b();
        let t = transfer_operator(&src, 0, 1).unwrap();
        assert!(reconstruction_error(&src, 0, 1, &t) < 1e-12);
        assert!(operator_norm(&t) <= 2f64.sqrt() + 1e-8);
        // For a maximally entangled witness the solution is unique.
        assert!((t - pseudo_inverse_transfer(&src, 0, 1)).norm() < 1e-10);
    }

    #[test]
    fn identity_on_witness() {
        let t = transfer_operator(&src_b(), 0, 0).unwrap();
        assert_eq!(t, ComplexMatrix::identity(2, 2));
    }

    #[test]
    fn non_full_support_witness_is_rejected() {
        assert!(matches!(transfer_operator(&src_b(), 1, 0), Err(Error::NotGeneric(_))));
        assert!(matches!(transfer_operator(&src_a(), 0, 1), Err(Error::NotGeneric(_))));
    }

    #[test]
    fn random_sources_reconstruct_with_bounded_norm() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let src = random_source(&mut rng, 3, 2, 3);
            let g = genericity_report(&src);
            for x in 0..3 {
                let t = transfer_operator(&src, g.witness, x).unwrap();
                assert!(reconstruction_error(&src, g.witness, x, &t) < 1e-8);
                assert!(operator_norm(&t) <= 1.0 / g.lambda0.sqrt() + 1e-8);
            }
        }
    }

    #[test]
    fn delta_prime_values() {
        assert_eq!(delta_prime(&src_b(), 0.0).unwrap(), 0.0);
        let s = (0.01f64 * std::f64::consts::LN_2).sqrt();
        let want = 2.0 * (s * (2.0 - s)).sqrt();
        assert!((delta_prime(&src_b(), 0.01).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.798_947_934_288_436_8).abs() < 1e-12);
        assert!(matches!(delta_prime(&src_a(), 0.1), Err(Error::NotGeneric(_))));
    }

    #[test]
    fn delta_prime_is_monotone_through_the_clamp() {
        let src = src_b();
        let mut last = 0.0;
        for k in 0..200 {
            let d = k as f64 * 0.02;
            let v = delta_prime(&src, d).unwrap();
            assert!(v >= last - 1e-15);
            last = v;
        }
    }
}
