//! Explicit block codes, their exact average fidelity and the decoupling check.
//!
//! Subsystem labels used throughout:
//! `Xn, Bn, Rn` (source blocks), `B0, D0` (shared entanglement in),
//! `CX, CB` (messages), `WX, WB, WD` (environments), `B0p, D0p` (entanglement out),
//! `Xh, Bh` (reconstructions).

mod doc;
mod eval;

use crate::error::{Error, Result};
use crate::qcore::linalg::{hermitian_eigen, kron_vec, ComplexMatrix, ComplexVector, ONE, ZERO};
use crate::qcore::{DimsSpec, Isometry};
use crate::region::Mode;
use crate::source::CqSource;

pub use doc::{load_code, load_code_str, CodeDoc, IsometryDoc};
pub use eval::{
    average_fidelity, decoupling_cmi, delta_n_eps, delta_n_eps_extended, sequence_states, truncation_profile,
    DecouplingReport, FidelityReport, SequenceFidelity, TruncationProfile,
};

/// Upper bound on `dim(X′ⁿX̂ⁿB̂ⁿRⁿB₀′D₀′)²`, and on the length of each per-sequence output vector.
pub const CODE_AMPLITUDE_CAP: usize = 1 << 16;

/// Margin allowed in `cmi ≤ n·δ(n, ε)`.
pub const TOL_DECOUPLING: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockCode {
    n: usize,
    nx: usize,
    nb: usize,
    k: usize,
    l: usize,
    mode: Mode,
    u_x: Isometry,
    u_b: Isometry,
    v: Isometry,
}

fn dims(factors: &[(&str, usize)]) -> Result<DimsSpec> {
    DimsSpec::new(factors.iter().copied())
}

fn expect_dims(iso: &Isometry, what: &str, want_in: &DimsSpec, out_labels: &[&str]) -> Result<()> {
    if iso.in_dims() != want_in {
        return Err(Error::InvalidCode(format!(
            "{what} input {:?} does not match {:?}",
            iso.in_dims().factors(),
            want_in.factors()
        )));
    }
    let got: Vec<&str> = iso.out_dims().labels().collect();
    if got != out_labels {
        return Err(Error::InvalidCode(format!("{what} output labels {got:?}, expected {out_labels:?}")));
    }
    Ok(())
}

/// Checks that an `n`-block code with `L`-dim output entanglement stays within [`CODE_AMPLITUDE_CAP`].
pub fn check_code_cap(src: &CqSource, n: usize, l: usize) -> Result<()> {
    let per_letter = src.alphabet().pow(2) * src.b_dim() * src.r_dim();
    let side = u32::try_from(n)
        .ok()
        .and_then(|n| per_letter.checked_pow(n))
        .and_then(|d| d.checked_mul(l * l));
    match side.and_then(|d| d.checked_mul(d)) {
        Some(total) if total <= CODE_AMPLITUDE_CAP => Ok(()),
        _ => Err(Error::CapExceeded(format!(
            "block length {n} needs more than {CODE_AMPLITUDE_CAP} output amplitudes"
        ))),
    }
}

fn block_dims(src: &CqSource, n: usize) -> Result<(usize, usize)> {
    if n == 0 {
        return Err(Error::InvalidCode("block length must be at least 1".into()));
    }
    let nx = src.alphabet().pow(n as u32);
    let nb = src.b_dim().pow(n as u32);
    Ok((nx, nb))
}

impl BlockCode {
    /// Validates labels and dimensions. `u_x: Xn → CX WX`, `u_b: Bn B0 → CB B0p WB`,
    /// `v: CX CB D0 → Xh Bh D0p WD`.
    pub fn new(n: usize, nx: usize, nb: usize, mode: Mode, u_x: Isometry, u_b: Isometry, v: Isometry) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCode("block length must be at least 1".into()));
        }
        expect_dims(&u_x, "U_X", &dims(&[("Xn", nx)])?, &["CX", "WX"])?;
        let k = u_b.in_dims().dim_of("B0").map_err(|_| Error::InvalidCode("U_B lacks B0".into()))?;
        expect_dims(&u_b, "U_B", &dims(&[("Bn", nb), ("B0", k)])?, &["CB", "B0p", "WB"])?;
        let cx = u_x.out_dims().dim_of("CX")?;
        let cb = u_b.out_dims().dim_of("CB")?;
        let l = u_b.out_dims().dim_of("B0p")?;
        expect_dims(&v, "V", &dims(&[("CX", cx), ("CB", cb), ("D0", k)])?, &["Xh", "Bh", "D0p", "WD"])?;
        let out = v.out_dims();
        if out.dim_of("Xh")? != nx || out.dim_of("Bh")? != nb {
            return Err(Error::InvalidCode("decoder reconstructions must match the source block dims".into()));
        }
        if out.dim_of("D0p")? != l {
            return Err(Error::InvalidCode("|B0'| and |D0'| differ".into()));
        }
        if mode == Mode::Unassisted && (k != 1 || l != 1) {
            return Err(Error::InvalidCode("unassisted codes need K = L = 1".into()));
        }
        Ok(Self { n, nx, nb, k, l, mode, u_x, u_b, v })
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn u_x(&self) -> &Isometry {
        &self.u_x
    }

    pub fn u_b(&self) -> &Isometry {
        &self.u_b
    }

    pub fn v(&self) -> &Isometry {
        &self.v
    }

    /// Checks the code against a source's alphabet and dimensions.
    pub fn check_source(&self, src: &CqSource) -> Result<()> {
        let (nx, nb) = block_dims(src, self.n)?;
        if (nx, nb) != (self.nx, self.nb) {
            return Err(Error::DimensionMismatch(format!(
                "code acts on |X^n| = {}, |B^n| = {}; source gives {nx}, {nb}",
                self.nx, self.nb
            )));
        }
        check_code_cap(src, self.n, self.l)
    }

    /// Same code with the mode label changed; `Unassisted` needs `K = L = 1`.
    pub fn with_mode(self, mode: Mode) -> Result<Self> {
        Self::new(self.n, self.nx, self.nb, mode, self.u_x, self.u_b, self.v)
    }

    /// Adds `k` ebits that Bob forwards untouched to Debbie's output (`K = L = k`).
    pub fn with_passthrough(&self, k: usize) -> Result<Self> {
        if self.k != 1 || self.l != 1 {
            return Err(Error::InvalidCode("passthrough needs a code without entanglement".into()));
        }
        if k == 0 {
            return Err(Error::InvalidCode("entanglement dimension must be positive".into()));
        }
        let cb = self.u_b.out_dims().dim_of("CB")?;
        let wb = self.u_b.out_dims().dim_of("WB")?;
        let cx = self.u_x.out_dims().dim_of("CX")?;
        let wd = self.v.out_dims().dim_of("WD")?;
        let ub = self.u_b.matrix();
        let u_b = ComplexMatrix::from_fn(cb * k * wb, self.nb * k, |row, col| {
            let (c, rest) = (row / (k * wb), row % (k * wb));
            let (e, w) = (rest / wb, rest % wb);
            let (b, e_in) = (col / k, col % k);
            if e == e_in { ub[(c * wb + w, b)] } else { ZERO }
        });
        let vm = self.v.matrix();
        let (nx, nb) = (self.nx, self.nb);
        let v = ComplexMatrix::from_fn(nx * nb * k * wd, cx * cb * k, |row, col| {
            let (xb, rest) = (row / (k * wd), row % (k * wd));
            let (e, w) = (rest / wd, rest % wd);
            let (m, e_in) = (col / k, col % k);
            if e == e_in { vm[(xb * wd + w, m)] } else { ZERO }
        });
        let u_b = Isometry::new(u_b, dims(&[("Bn", nb), ("B0", k)])?, dims(&[("CB", cb), ("B0p", k), ("WB", wb)])?)?;
        let v = Isometry::new(
            v,
            dims(&[("CX", cx), ("CB", cb), ("D0", k)])?,
            dims(&[("Xh", nx), ("Bh", nb), ("D0p", k), ("WD", wd)])?,
        )?;
        Self::new(self.n, nx, nb, Mode::Assisted, self.u_x.clone(), u_b, v)
    }
}

fn trivial_x_encoder(nx: usize) -> Result<Isometry> {
    Isometry::identity(dims(&[("Xn", nx)])?, dims(&[("CX", nx), ("WX", 1)])?)
}

/// Sends both blocks unchanged; fidelity 1 with trivial environments.
pub fn identity_code(src: &CqSource, n: usize) -> Result<BlockCode> {
    let (nx, nb) = block_dims(src, n)?;
    check_code_cap(src, n, 1)?;
    let u_b = Isometry::identity(dims(&[("Bn", nb), ("B0", 1)])?, dims(&[("CB", nb), ("B0p", 1), ("WB", 1)])?)?;
    let v = Isometry::identity(
        dims(&[("CX", nx), ("CB", nb), ("D0", 1)])?,
        dims(&[("Xh", nx), ("Bh", nb), ("D0p", 1), ("WD", 1)])?,
    )?;
    BlockCode::new(n, nx, nb, Mode::Unassisted, trivial_x_encoder(nx)?, u_b, v)
}

/// Bob discards his block into `W_B`; Debbie outputs `|0⟩` on `B̂ⁿ`.
pub fn replacement_code(src: &CqSource, n: usize) -> Result<BlockCode> {
    let (nx, nb) = block_dims(src, n)?;
    check_code_cap(src, n, 1)?;
    let u_b = Isometry::identity(dims(&[("Bn", nb), ("B0", 1)])?, dims(&[("CB", 1), ("B0p", 1), ("WB", nb)])?)?;
    let v = ComplexMatrix::from_fn(nx * nb, nx, |row, col| if row == col * nb { ONE } else { ZERO });
    let v = Isometry::new(
        v,
        dims(&[("CX", nx), ("CB", 1), ("D0", 1)])?,
        dims(&[("Xh", nx), ("Bh", nb), ("D0p", 1), ("WD", 1)])?,
    )?;
    BlockCode::new(n, nx, nb, Mode::Unassisted, trivial_x_encoder(nx)?, u_b, v)
}

/// Eigenbasis of `(ω^B)^{⊗n}`, columns ordered by descending product eigenvalue.
pub fn typical_basis(src: &CqSource, n: usize) -> Result<(Vec<f64>, ComplexMatrix)> {
    let (_, nb) = block_dims(src, n)?;
    let b = src.b_dim();
    let mut avg = ComplexMatrix::zeros(b, b);
    for (x, p) in src.probs().iter().enumerate() {
        avg += src.rho_b(x).matrix() * crate::qcore::C64::new(*p, 0.0);
    }
    let (vals, vecs) = hermitian_eigen(&avg);
    let mut entries: Vec<(f64, ComplexVector)> = vec![(1.0, ComplexVector::from_element(1, ONE))];
    for _ in 0..n {
        let mut next = Vec::with_capacity(entries.len() * b);
        for (w, v) in &entries {
            for k in 0..b {
                next.push((w * vals[k], kron_vec(v, &vecs.column(k).into_owned())));
            }
        }
        entries = next;
    }
    let mut order: Vec<usize> = (0..nb).collect();
    order.sort_by(|&i, &j| entries[j].0.total_cmp(&entries[i].0));
    let weights = order.iter().map(|&i| entries[i].0).collect();
    let basis = ComplexMatrix::from_fn(nb, nb, |r, c| entries[order[c]].1[r]);
    Ok((weights, basis))
}

/// Keeps the top-`rank` eigenvectors `|e_k⟩ ↦ |k⟩_{C_B}|0⟩_{W_B}` and routes the rest
/// as `|e_{r+j}⟩ ↦ |j⟩_{C_B}|1⟩_{W_B}`; the decoder maps `|k⟩_{C_B} ↦ |e_k⟩`.
pub fn truncation_code(src: &CqSource, n: usize, rank: usize) -> Result<BlockCode> {
    let (nx, nb) = block_dims(src, n)?;
    if rank == 0 || rank > nb {
        return Err(Error::InvalidCode(format!("truncation rank {rank} outside 1..={nb}")));
    }
    check_code_cap(src, n, 1)?;
    let (_, basis) = typical_basis(src, n)?;
    let cb = rank.max(nb - rank);
    let wb = if rank == nb { 1 } else { 2 };
    // rows (c, flag), columns B^n; U_B = Σ_k |c(k), flag(k)⟩⟨e_k|
    let mut u_b = ComplexMatrix::zeros(cb * wb, nb);
    for k in 0..nb {
        let (c, flag) = if k < rank { (k, 0) } else { (k - rank, 1) };
        let e = basis.column(k);
        for b in 0..nb {
            u_b[(c * wb + flag, b)] = e[b].conj();
        }
    }
    let u_b = Isometry::new(u_b, dims(&[("Bn", nb), ("B0", 1)])?, dims(&[("CB", cb), ("B0p", 1), ("WB", wb)])?)?;
    let mut v = ComplexMatrix::zeros(nx * nb, nx * cb);
    for x in 0..nx {
        for k in 0..cb {
            for b in 0..nb {
                v[(x * nb + b, x * cb + k)] = basis[(b, k)];
            }
        }
    }
    let v = Isometry::new(
        v,
        dims(&[("CX", nx), ("CB", cb), ("D0", 1)])?,
        dims(&[("Xh", nx), ("Bh", nb), ("D0p", 1), ("WD", 1)])?,
    )?;
    BlockCode::new(n, nx, nb, Mode::Unassisted, trivial_x_encoder(nx)?, u_b, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{src_a, src_b};

    #[test]
    fn truncation_rank_bounds() {
        assert!(matches!(truncation_code(&src_b(), 1, 0), Err(Error::InvalidCode(_))));
        assert!(matches!(truncation_code(&src_b(), 1, 3), Err(Error::InvalidCode(_))));
        assert!(truncation_code(&src_b(), 2, 4).is_ok());
    }

    #[test]
    fn cap_rejects_three_qubit_blocks() {
        assert!(matches!(identity_code(&src_a(), 3), Err(Error::CapExceeded(_))));
        assert!(identity_code(&src_b(), 2).is_ok());
    }

    #[test]
    fn typical_basis_weights_sorted() {
        let (w, basis) = typical_basis(&src_b(), 2).unwrap();
        assert!((w[0] - 9.0 / 16.0).abs() < 1e-12);
        assert!(w.windows(2).all(|p| p[0] >= p[1]));
        assert!(crate::qcore::linalg::isometry_defect(&basis) < 1e-12);
    }

    #[test]
    fn unassisted_rejects_entanglement() {
        let code = identity_code(&src_b(), 1).unwrap().with_passthrough(2).unwrap();
        assert_eq!(code.mode(), Mode::Assisted);
        assert!(code.with_mode(Mode::Unassisted).is_err());
    }
}
