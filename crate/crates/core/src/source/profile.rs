use serde::{Deserialize, Serialize};

use super::CqSource;
use crate::qcore::entropy::{conditional_entropy, entropy_of, mutual_information};

/// Full-support threshold for `λ_min(ψ_x^B)`.
pub const TOL_GENERIC: f64 = 1e-9;

/// Entropies of `ω^{XB}` in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropicProfile {
    pub s_b: f64,
    pub s_b_given_x: f64,
    pub s_xb: f64,
    pub s_x: f64,
    pub s_x_given_b: f64,
    pub i_x_b: f64,
}

pub fn entropic_profile(src: &CqSource) -> EntropicProfile {
    let omega = src.omega_xb();
    let e = |l: &[&str]| entropy_of(&omega, l).expect("labels of ω^{XB}");
    let s_b = e(&["B"]);
    let s_x = e(&["X"]);
    let s_xb = e(&["X", "B"]);
    let s_b_given_x = conditional_entropy(&omega, &["B"], &["X"]).expect("disjoint");
    let i_x_b = mutual_information(&omega, &["X"], &["B"]).expect("disjoint");
    EntropicProfile {
        s_b,
        s_b_given_x,
        s_xb,
        s_x,
        s_x_given_b: s_xb - s_b,
        i_x_b,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub lambda_min: Vec<f64>,
    pub witness: usize,
    pub lambda0: f64,
    pub is_generic: bool,
}

pub fn genericity_report(src: &CqSource) -> GenericityReport {
    let lambda_min: Vec<f64> = (0..src.alphabet())
        .map(|x| src.rho_b(x).eigenvalues().last().copied().unwrap_or(0.0).max(0.0))
        .collect();
    let mut witness = 0;
    for (x, &l) in lambda_min.iter().enumerate() {
        if l > lambda_min[witness] {
            witness = x;
        }
    }
    let lambda0 = lambda_min[witness];
    GenericityReport {
        is_generic: lambda0 > TOL_GENERIC,
        lambda_min,
        witness,
        lambda0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{src_a, src_b, src_c};

    fn h(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn profile_of_src_a() {
        let p = entropic_profile(&src_a());
        for (got, want) in [(p.s_b, 1.0), (p.s_b_given_x, 0.0), (p.s_xb, 1.0), (p.s_x, 1.0), (p.s_x_given_b, 0.0), (p.i_x_b, 1.0)] {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn profile_of_src_b() {
        // ω^B = diag(3/4, 1/4); ω^{XB} has spectrum {½, ¼, ¼}.
        let p = entropic_profile(&src_b());
        assert!((p.s_b - h(0.25)).abs() < 1e-12);
        assert!((p.s_b_given_x - 0.5).abs() < 1e-12);
        assert!((p.s_xb - 1.5).abs() < 1e-12);
        assert!((p.s_x_given_b - (1.5 - h(0.25))).abs() < 1e-12);
        assert!((p.i_x_b - (h(0.25) - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn profile_of_src_c() {
        let p = entropic_profile(&src_c());
        assert!((p.s_b - 2.0).abs() < 1e-12);
        assert!((p.s_b_given_x - 1.0).abs() < 1e-12);
        assert!((p.s_xb - 2.0).abs() < 1e-12);
        assert!(p.s_x_given_b.abs() < 1e-12);
        assert!((p.i_x_b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn genericity_of_reference_sources() {
        let a = genericity_report(&src_a());
        assert!(!a.is_generic);
        assert!(a.lambda_min.iter().all(|&l| l < 1e-12));
        let b = genericity_report(&src_b());
        assert!(b.is_generic);
        assert_eq!(b.witness, 0);
        assert!((b.lambda0 - 0.5).abs() < 1e-12);
        assert!(!genericity_report(&src_c()).is_generic);
    }

    #[test]
    fn depolarized_sources_are_generic() {
        for s in [src_a(), src_b(), src_c()] {
            assert!(genericity_report(&s.depolarize(1e-3).unwrap()).is_generic);
        }
    }
}
