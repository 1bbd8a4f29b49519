use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{truncation_code, BlockCode, TOL_DECOUPLING};
use crate::error::{Error, Result};
use crate::qcore::linalg::{factor_entropy, ComplexVector, C64, ZERO};
use crate::qcore::metrics::binary_entropy_unchecked;
use crate::qcore::{DimsSpec, PureState};
use crate::source::CqSource;

const TARGET_LABELS: [&str; 5] = ["Xh", "Bh", "Rn", "B0p", "D0p"];
const ENV_LABELS: [&str; 5] = ["WX", "WB", "WD", "B0p", "D0p"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFidelity {
    pub sequence: Vec<usize>,
    pub weight: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FidelityReport {
    pub avg_fidelity: f64,
    pub per_sequence: Vec<SequenceFidelity>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecouplingReport {
    pub cmi: f64,
    pub bound: f64,
    pub pass: bool,
    pub epsilon_used: f64,
    /// `bound − cmi`.
    pub slack: f64,
    /// Set when `ε > 1/6`, where the bound uses `h(min(√(6ε), 1))`.
    pub domain_warning: bool,
}

fn max_entangled(k: usize, a: &str, b: &str) -> Result<PureState> {
    let amp = C64::new(1.0 / (k as f64).sqrt(), 0.0);
    let v = ComplexVector::from_fn(k * k, |i, _| if i / k == i % k { amp } else { ZERO });
    PureState::new(v, DimsSpec::new([(a, k), (b, k)])?)
}

fn digits(mut s: usize, base: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for d in out.iter_mut().rev() {
        *d = s % base;
        s /= base;
    }
    out
}

/// For sequence index `s` of `block = src^{⊗n}`, the coded output `|ξ_s⟩` and the
/// target `|s⟩^{X̂ⁿ}|ψ_s⟩^{B̂ⁿRⁿ}|Φ_L⟩^{B₀′D₀′}`, both in the output's label order.
pub fn sequence_states(block: &CqSource, code: &BlockCode, s: usize) -> Result<(PureState, PureState)> {
    let (nx, nb, nr) = (block.alphabet(), block.b_dim(), block.r_dim());
    let psi = block.states()[s].amplitudes().clone();
    let input = PureState::basis(DimsSpec::single("Xn", nx), s)?
        .tensor(&PureState::new(psi.clone(), DimsSpec::new([("Bn", nb), ("Rn", nr)])?)?)?
        .tensor(&max_entangled(code.k, "B0", "D0")?)?;
    let xi = input.apply(&code.u_x)?.apply(&code.u_b)?.apply(&code.v)?;
    let target = PureState::basis(DimsSpec::single("Xh", nx), s)?
        .tensor(&PureState::new(psi, DimsSpec::new([("Bh", nb), ("Rn", nr)])?)?)?
        .tensor(&max_entangled(code.l, "B0p", "D0p")?)?;
    let order: Vec<&str> = xi.dims().labels().filter(|l| TARGET_LABELS.contains(l)).collect();
    let target = target.permuted(&order)?;
    Ok((xi, target))
}

fn block_source(src: &CqSource, code: &BlockCode) -> Result<CqSource> {
    code.check_source(src)?;
    let block = src.power(code.n)?;
    // ξ_s lives on Xh Bh D0p WD ⊗ B0p WB ⊗ WX ⊗ Rn
    let cx = code.u_x.out_dims().dim_of("CX")?;
    let cb = code.u_b.out_dims().dim_of("CB")?;
    let longest = code.v.out_dims().total() * (code.u_b.out_dims().total() / cb) * (code.u_x.out_dims().total() / cx)
        * block.r_dim();
    if longest > super::CODE_AMPLITUDE_CAP {
        return Err(Error::CapExceeded(format!("per-sequence output has {longest} amplitudes")));
    }
    Ok(block)
}

/// `‖(⟨target| ⊗ 1_W)|ξ_s⟩‖`, the fidelity of the sequence-`s` output with its target.
fn sequence_fidelity(xi: &PureState, target: &PureState) -> Result<f64> {
    let m = xi.bipartition(&TARGET_LABELS)?;
    let overlap = m.adjoint() * target.amplitudes();
    Ok(overlap.norm().min(1.0))
}

/// Exact `F̄ = Σ_{xⁿ} p(xⁿ) F_{xⁿ}`; each term compares `Tr_W ξ_{xⁿ}` with the target.
pub fn average_fidelity(src: &CqSource, code: &BlockCode) -> Result<FidelityReport> {
    let block = block_source(src, code)?;
    let nx = src.alphabet();
    let per_sequence = (0..block.alphabet())
        .into_par_iter()
        .map(|s| {
            let (xi, target) = sequence_states(&block, code, s)?;
            Ok(SequenceFidelity {
                sequence: digits(s, nx, code.n),
                weight: block.probs()[s],
                fidelity: sequence_fidelity(&xi, &target)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let avg: f64 = per_sequence.iter().map(|t| t.weight * t.fidelity).sum();
    let avg = avg.clamp(0.0, 1.0);
    Ok(FidelityReport { avg_fidelity: avg, per_sequence, epsilon: 1.0 - avg })
}

/// `δ(n, ε) = 4√(6ε) log(|X||B|) + (2/n) h(√(6ε))` for `ε ∈ [0, 1/6]`.
pub fn delta_n_eps(n: usize, eps: f64, nx: usize, nb: usize) -> Result<f64> {
    if !(0.0..=1.0 / 6.0).contains(&eps) {
        return Err(Error::OutOfDomain(format!("error {eps} outside [0, 1/6]")));
    }
    Ok(delta_n_eps_extended(n, eps, nx, nb)?.0)
}

/// As [`delta_n_eps`] but accepting `ε ∈ [0, 1]`, with `h(min(√(6ε), 1))`;
/// the flag reports `ε > 1/6`.
pub fn delta_n_eps_extended(n: usize, eps: f64, nx: usize, nb: usize) -> Result<(f64, bool)> {
    if n == 0 {
        return Err(Error::OutOfDomain("block length must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfDomain(format!("error {eps} outside [0, 1]")));
    }
    let root = (6.0 * eps).sqrt();
    let value = 4.0 * root * ((nx * nb) as f64).log2() + 2.0 / n as f64 * binary_entropy_unchecked(root.min(1.0));
    Ok((value, eps > 1.0 / 6.0))
}

/// `S` of the environment `W_X W_B W_D B₀′D₀′` of a pure per-sequence output.
fn environment_entropy(xi: &PureState) -> Result<f64> {
    let m = xi.bipartition(&ENV_LABELS)?;
    if m.nrows() == 1 {
        return Ok(0.0);
    }
    Ok(factor_entropy(&m))
}

/// `I(W_X W_B W_D B₀′D₀′ : X̂ⁿB̂ⁿRⁿ | X′ⁿ)_ξ = Σ p(xⁿ) 2 S(env)_{ξ_{xⁿ}}` against `n·δ(n, ε)`
/// with `ε` taken from [`average_fidelity`].
pub fn decoupling_cmi(src: &CqSource, code: &BlockCode) -> Result<DecouplingReport> {
    let fid = average_fidelity(src, code)?;
    let block = block_source(src, code)?;
    let terms = (0..block.alphabet())
        .into_par_iter()
        .map(|s| {
            let (xi, _) = sequence_states(&block, code, s)?;
            Ok(block.probs()[s] * 2.0 * environment_entropy(&xi)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let cmi: f64 = terms.iter().sum();
    let (delta, domain_warning) = delta_n_eps_extended(code.n, fid.epsilon, src.alphabet(), src.b_dim())?;
    let bound = code.n as f64 * delta;
    Ok(DecouplingReport {
        cmi,
        bound,
        pass: cmi <= bound + TOL_DECOUPLING,
        epsilon_used: fid.epsilon,
        slack: bound - cmi,
        domain_warning,
    })
}

/// Fidelity of every truncation rank at block length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationProfile {
    /// `(rank, avg_fidelity)`, rank ascending.
    pub fidelities: Vec<(usize, f64)>,
    /// Whether fidelity never drops as the rank grows (within 1e-12).
    pub monotone: bool,
}

pub fn truncation_profile(src: &CqSource, n: usize) -> Result<TruncationProfile> {
    let nb = src.b_dim().pow(n as u32);
    let fidelities = (1..=nb)
        .map(|r| Ok((r, average_fidelity(src, &truncation_code(src, n, r)?)?.avg_fidelity)))
        .collect::<Result<Vec<_>>>()?;
    let monotone = fidelities.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);
    Ok(TruncationProfile { fidelities, monotone })
}
