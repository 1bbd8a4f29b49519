use super::linalg::spectrum_entropy;
use super::state::{DensityOperator, Tolerances};
use crate::error::{Error, Result};

/// `S(ρ) = −Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    spectrum_entropy(&rho.eigenvalues())
}

/// Entropy of the reduced state on `labels`; the empty set has entropy 0.
pub fn entropy_of(rho: &DensityOperator, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    Ok(von_neumann_entropy(&rho.partial_trace(labels)?))
}

fn disjoint_union<'a>(sets: &[&[&'a str]]) -> Result<Vec<&'a str>> {
    let mut all: Vec<&str> = Vec::new();
    for set in sets {
        for l in *set {
            if all.contains(l) {
                return Err(Error::OverlappingLabels(l.to_string()));
            }
            all.push(l);
        }
    }
    Ok(all)
}

/// `S(A|B) = S(AB) − S(B)`.
pub fn conditional_entropy(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let ab = disjoint_union(&[a, b])?;
    Ok(entropy_of(rho, &ab)? - entropy_of(rho, b)?)
}

/// `I(A:B) = S(A) + S(B) − S(AB)`.
pub fn mutual_information(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let ab = disjoint_union(&[a, b])?;
    Ok(entropy_of(rho, a)? + entropy_of(rho, b)? - entropy_of(rho, &ab)?)
}

/// `I(A:B|C) = S(AC) + S(BC) − S(ABC) − S(C)`, checked against strong subadditivity.
pub fn conditional_mutual_information(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64> {
    conditional_mutual_information_with_tol(rho, a, b, c, &Tolerances::default())
}

pub fn conditional_mutual_information_with_tol(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    tol: &Tolerances,
) -> Result<f64> {
    let abc = disjoint_union(&[a, b, c])?;
    let ac = disjoint_union(&[a, c])?;
    let bc = disjoint_union(&[b, c])?;
    let v = entropy_of(rho, &ac)? + entropy_of(rho, &bc)? - entropy_of(rho, &abc)? - entropy_of(rho, c)?;
    if v < -tol.ssa {
        return Err(Error::SsaViolation(v));
    }
    Ok(v)
}
