use super::CqSource;
use crate::error::{Error, Result};
use crate::qcore::dims::{ravel, unravel};
use crate::qcore::linalg::{ComplexMatrix, C64};
use crate::qcore::{DensityOperator, DimsSpec, PureState};

/// Cap on the product dimension `(|X|²|B||R|)ⁿ` of the extended state.
pub const EXTENDED_DIM_CAP: usize = 1 << 14;

/// `ω^{XⁿX′ⁿBⁿRⁿ} = Σ p(xⁿ)|xⁿ⟩⟨xⁿ| ⊗ |xⁿ⟩⟨xⁿ| ⊗ ψ_{xⁿ}`.
///
/// Stored as the ensemble of per-sequence pure states; labels are `X_i`,
/// `Xp_i`, `B_i`, `R_i` for `i = 1..n`, in that order.
#[derive(Debug, Clone)]
pub struct ExtendedSourceState {
    n: usize,
    nx: usize,
    dims: DimsSpec,
    terms: Vec<(f64, PureState)>,
}

pub fn extended_state(src: &CqSource, n: usize) -> Result<ExtendedSourceState> {
    if n == 0 {
        return Err(Error::OutOfDomain("block length must be at least 1".into()));
    }
    let (nx, b, r) = (src.alphabet(), src.b_dim(), src.r_dim());
    let per_letter = nx * nx * b * r;
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(per_letter));
    match total {
        Some(t) if t <= EXTENDED_DIM_CAP => {}
        _ => {
            return Err(Error::CapExceeded(format!(
                "extended state dimension ({per_letter})^{n} exceeds {EXTENDED_DIM_CAP}"
            )))
        }
    }
    let mut factors = Vec::new();
    for (prefix, d) in [("X", nx), ("Xp", nx), ("B", b), ("R", r)] {
        for i in 1..=n {
            factors.push((format!("{prefix}_{i}"), d));
        }
    }
    let dims = DimsSpec::new(factors)?;
    let q_dims = dims.select(&(2 * n..4 * n).collect::<Vec<_>>());
    let seq_count = nx.pow(n as u32);
    let mut digits = vec![0; n];
    let letter_dims = vec![nx; n];
    let mut terms = Vec::with_capacity(seq_count);
    for s in 0..seq_count {
        unravel(s, &letter_dims, &mut digits);
        let mut p = 1.0;
        let mut psi: Option<PureState> = None;
        let mut order_b = Vec::new();
        let mut order_r = Vec::new();
        for (i, &x) in digits.iter().enumerate() {
            p *= src.probs()[x];
            let (bl, rl) = (format!("B_{}", i + 1), format!("R_{}", i + 1));
            let letter = src.states()[x].relabeled(DimsSpec::new([(bl.clone(), b), (rl.clone(), r)])?)?;
            psi = Some(match psi {
                None => letter,
                Some(acc) => acc.tensor(&letter)?,
            });
            order_b.push(bl);
            order_r.push(rl);
        }
        let order: Vec<&str> = order_b.iter().chain(&order_r).map(String::as_str).collect();
        let psi = psi.expect("n >= 1").permuted(&order)?;
        debug_assert_eq!(psi.dims(), &q_dims);
        terms.push((p, psi));
    }
    Ok(ExtendedSourceState { n, nx, dims, terms })
}

impl ExtendedSourceState {
    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &DimsSpec {
        &self.dims
    }

    /// `(p(xⁿ), ψ_{xⁿ})` indexed by the row-major sequence index.
    pub fn terms(&self) -> &[(f64, PureState)] {
        &self.terms
    }

    /// Reduced state on `keep`, in the label order `X_i, Xp_i, B_i, R_i`.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityOperator> {
        let positions = self.dims.positions(keep)?;
        let out_dims = self.dims.select(&positions);
        if out_dims.total() > EXTENDED_DIM_CAP {
            return Err(Error::CapExceeded(format!(
                "reduced dimension {} exceeds {EXTENDED_DIM_CAP}",
                out_dims.total()
            )));
        }
        let n = self.n;
        // Classical positions index letters: X_i at i-1, Xp_i at n+i-1.
        let classical: Vec<usize> = positions.iter().copied().filter(|&p| p < 2 * n).collect();
        let quantum: Vec<String> = positions
            .iter()
            .filter(|&&p| p >= 2 * n)
            .map(|&p| self.dims.factors()[p].0.clone())
            .collect();
        let quantum: Vec<&str> = quantum.iter().map(String::as_str).collect();
        let c_dims = vec![self.nx; classical.len()];
        let c_total: usize = c_dims.iter().product();
        let q_total = out_dims.total() / c_total;
        let mut m = ComplexMatrix::zeros(out_dims.total(), out_dims.total());
        let mut digits = vec![0; n];
        let mut cdig = vec![0; classical.len()];
        for (s, (p, psi)) in self.terms.iter().enumerate() {
            unravel(s, &vec![self.nx; n], &mut digits);
            for (k, &pos) in classical.iter().enumerate() {
                cdig[k] = digits[pos % n];
            }
            let ci = ravel(&cdig, &c_dims);
            let block = if quantum.is_empty() {
                ComplexMatrix::from_element(1, 1, C64::new(1.0, 0.0))
            } else {
                psi.reduced(&quantum)?.matrix().clone()
            };
            let mut view = m.view_mut((ci * q_total, ci * q_total), (q_total, q_total));
            view += block * C64::new(*p, 0.0);
        }
        Ok(DensityOperator::unchecked(m, out_dims))
    }

    /// Dense operator on all factors (subject to the cap).
    pub fn density(&self) -> Result<DensityOperator> {
        let all: Vec<String> = self.dims.labels().map(str::to_string).collect();
        let all: Vec<&str> = all.iter().map(String::as_str).collect();
        self.reduced(&all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::entropy::{entropy_of, von_neumann_entropy};
    use crate::qcore::metrics::trace_distance;
    use crate::source::{src_a, src_b};

    #[test]
    fn src_a_extended_entropy() {
        let ext = extended_state(&src_a(), 1).unwrap();
        let rho = ext.density().unwrap();
        assert!((von_neumann_entropy(&rho) - 1.0).abs() < 1e-12);
        assert!((entropy_of(&rho, &["X_1", "Xp_1", "B_1"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn traced_extension_matches_cq_state() {
        let src = src_b();
        let ext = extended_state(&src, 1).unwrap();
        let xb = ext.reduced(&["X_1", "B_1"]).unwrap();
        let want = src.omega_xb();
        let xb = DensityOperator::unchecked(xb.matrix().clone(), want.dims().clone());
        assert!(trace_distance(&xb, &want).unwrap() < 1e-12);
    }

    #[test]
    fn two_copies_double_b_entropy() {
        let ext = extended_state(&src_b(), 2).unwrap();
        let s1 = von_neumann_entropy(&src_b().omega_xb().partial_trace(&["B"]).unwrap());
        let s2 = entropy_of(&ext.reduced(&["B_1", "B_2"]).unwrap(), &["B_1", "B_2"]).unwrap();
        assert!((s2 - 2.0 * s1).abs() < 1e-10);
    }

    #[test]
    fn cap_is_enforced() {
        // (2·2·2·2)^4 = 2^16 > 2^14
        assert!(matches!(extended_state(&src_b(), 4), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn classical_copy_is_perfect() {
        let ext = extended_state(&src_b(), 1).unwrap();
        let xx = ext.reduced(&["X_1", "Xp_1"]).unwrap();
        assert!((xx.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((xx.matrix()[(3, 3)].re - 0.5).abs() < 1e-15);
        assert!(xx.matrix()[(1, 1)].norm() < 1e-15);
    }
}
