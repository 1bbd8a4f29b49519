//! The cq-source model, its extended state, profile and genericity analysis.

mod doc;
mod extended;
mod profile;
mod transfer;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::linalg::{c, fix_phase, kron_vec, ComplexMatrix, ComplexVector, C64, ZERO};
use crate::qcore::purify::purify_with_tol;
use crate::qcore::random::{random_pure, random_vector};
use crate::qcore::{DensityOperator, DimsSpec, PureState, Tolerances};

pub use doc::{load_source, load_source_str, AmplitudeDoc, BrDims, SourceDoc, StateDoc};
pub use extended::{extended_state, ExtendedSourceState, EXTENDED_DIM_CAP};
pub use profile::{entropic_profile, genericity_report, EntropicProfile, GenericityReport, TOL_GENERIC};
pub use transfer::{delta_prime, reconstruction_error, transfer_operator};

/// Tolerance on `Σ p(x) = 1`.
pub const TOL_PROBS: f64 = 1e-10;

/// `{p(x), |ψ_x⟩^{BR}}`; every state is labelled `[("B", |B|), ("R", |R|)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CqSource {
    name: Option<String>,
    probs: Vec<f64>,
    states: Vec<PureState>,
}

fn br_dims(b: usize, r: usize) -> Result<DimsSpec> {
    DimsSpec::new([("B", b), ("R", r)])
}

impl CqSource {
    /// Validates and phase-fixes the states.
    pub fn new(probs: Vec<f64>, amplitudes: Vec<ComplexVector>, b: usize, r: usize) -> Result<Self> {
        let dims = br_dims(b, r)?;
        let tol = Tolerances::default();
        let states = amplitudes
            .into_iter()
            .map(|mut v| {
                fix_phase(&mut v, 1e-12);
                PureState::with_tol(v, dims.clone(), &tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_states(probs, states)
    }

    pub fn from_states(probs: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidSource("empty alphabet".into()));
        }
        if probs.len() != states.len() {
            return Err(Error::InvalidSource(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidSource("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TOL_PROBS {
            return Err(Error::InvalidSource(format!("probs not normalized (sum {total})")));
        }
        let dims = states[0].dims().clone();
        if dims.labels().collect::<Vec<_>>() != ["B", "R"] {
            return Err(Error::InvalidSource("states must live on B⊗R".into()));
        }
        if states.iter().any(|s| s.dims() != &dims) {
            return Err(Error::InvalidSource("inconsistent state dims".into()));
        }
        Ok(Self { name: None, probs, states })
    }

    /// Canonically purifies each `ρ_x^B`, padding `R` to the largest rank.
    pub fn from_mixed(probs: Vec<f64>, densities: &[DensityOperator]) -> Result<Self> {
        let tol = Tolerances::default();
        let mut pure = densities
            .iter()
            .map(|rho| {
                let rho = DensityOperator::unchecked(rho.matrix().clone(), DimsSpec::single("B", rho.dim()));
                purify_with_tol(&rho, "R", None, &tol)
            })
            .collect::<Result<Vec<_>>>()?;
        let r = pure.iter().map(|p| p.dims().dim_of("R").unwrap_or(1)).max().unwrap_or(1);
        for p in pure.iter_mut() {
            *p = pad_reference(p, r)?;
        }
        Self::from_states(probs, pure)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn alphabet(&self) -> usize {
        self.probs.len()
    }

    pub fn b_dim(&self) -> usize {
        self.states[0].dims().dims()[0]
    }

    pub fn r_dim(&self) -> usize {
        self.states[0].dims().dims()[1]
    }

    /// `ψ_x` as a `|B| × |R|` matrix.
    pub fn state_matrix(&self, x: usize) -> ComplexMatrix {
        let (b, r) = (self.b_dim(), self.r_dim());
        let v = self.states[x].amplitudes();
        ComplexMatrix::from_fn(b, r, |i, j| v[i * r + j])
    }

    /// `ρ_x^B = Tr_R ψ_x`.
    pub fn rho_b(&self, x: usize) -> DensityOperator {
        let m = self.state_matrix(x);
        DensityOperator::unchecked(&m * m.adjoint(), DimsSpec::single("B", self.b_dim()))
    }

    /// `ω^{XB} = Σ p(x)|x⟩⟨x| ⊗ ρ_x^B`.
    pub fn omega_xb(&self) -> DensityOperator {
        let (nx, b) = (self.alphabet(), self.b_dim());
        let mut m = ComplexMatrix::zeros(nx * b, nx * b);
        for x in 0..nx {
            let rho = self.rho_b(x);
            m.view_mut((x * b, x * b), (b, b))
                .copy_from(&(rho.matrix() * C64::new(self.probs[x], 0.0)));
        }
        DensityOperator::unchecked(m, DimsSpec::new([("X", nx), ("B", b)]).expect("distinct labels"))
    }

    /// `ω^{XBR} = Σ p(x)|x⟩⟨x| ⊗ |ψ_x⟩⟨ψ_x|`.
    pub fn omega_xbr(&self) -> DensityOperator {
        let (nx, d) = (self.alphabet(), self.b_dim() * self.r_dim());
        let mut m = ComplexMatrix::zeros(nx * d, nx * d);
        for x in 0..nx {
            let v = self.states[x].amplitudes();
            m.view_mut((x * d, x * d), (d, d))
                .copy_from(&(v * v.adjoint() * C64::new(self.probs[x], 0.0)));
        }
        let dims = DimsSpec::new([("X", nx), ("B", self.b_dim()), ("R", self.r_dim())]).expect("distinct labels");
        DensityOperator::unchecked(m, dims)
    }

    /// `ω ⊗ ω'` with `X = X₁X₂`, `B = B₁B₂`, `R = R₁R₂` merged into single factors.
    pub fn tensor(&self, other: &CqSource) -> Result<CqSource> {
        let (b1, r1, b2, r2) = (self.b_dim(), self.r_dim(), other.b_dim(), other.r_dim());
        let mut probs = Vec::new();
        let mut states = Vec::new();
        for (p, s) in self.probs.iter().zip(&self.states) {
            for (q, t) in other.probs.iter().zip(&other.states) {
                probs.push(p * q);
                let joint = PureState::unchecked(
                    kron_vec(s.amplitudes(), t.amplitudes()),
                    DimsSpec::new([("B1", b1), ("R1", r1), ("B2", b2), ("R2", r2)])?,
                )
                .permuted(&["B1", "B2", "R1", "R2"])?;
                states.push(PureState::unchecked(joint.amplitudes().clone(), br_dims(b1 * b2, r1 * r2)?));
            }
        }
        CqSource::from_states(probs, states)
    }

    /// `ω^{⊗n}` as a single-letter source over `Xⁿ`.
    pub fn power(&self, n: usize) -> Result<CqSource> {
        if n == 0 {
            return Err(Error::OutOfDomain("block length must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// Mixes each `ρ_x^B` with `ε·I/|B|` and re-purifies canonically.
    pub fn depolarize(&self, eps: f64) -> Result<CqSource> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::OutOfDomain(format!("mixing weight {eps}")));
        }
        let b = self.b_dim();
        let id = ComplexMatrix::identity(b, b) * C64::new(eps / b as f64, 0.0);
        let mixed: Vec<DensityOperator> = (0..self.alphabet())
            .map(|x| DensityOperator::unchecked(self.rho_b(x).matrix() * C64::new(1.0 - eps, 0.0) + &id, self.rho_b(x).dims().clone()))
            .collect();
        Ok(CqSource::from_mixed(self.probs.clone(), &mixed)?.with_name_opt(self.name.clone()))
    }

    fn with_name_opt(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    /// Adds `ε` times a complex Gaussian vector to every amplitude vector and renormalizes.
    pub fn perturb(&self, eps: f64, rng: &mut impl Rng) -> Result<CqSource> {
        let d = self.b_dim() * self.r_dim();
        let amps = self
            .states
            .iter()
            .map(|s| {
                let v = s.amplitudes() + random_vector(rng, d) * C64::new(eps, 0.0);
                let n = v.norm();
                v / C64::new(n, 0.0)
            })
            .collect();
        CqSource::new(self.probs.clone(), amps, self.b_dim(), self.r_dim())
    }
}

fn pad_reference(p: &PureState, r: usize) -> Result<PureState> {
    let b = p.dims().dim_of("B")?;
    let old = p.dims().dim_of("R")?;
    if old == r {
        return Ok(p.clone());
    }
    let mut v = ComplexVector::zeros(b * r);
    for i in 0..b {
        for j in 0..old {
            v[i * r + j] = p.amplitudes()[i * old + j];
        }
    }
    Ok(PureState::unchecked(v, br_dims(b, r)?))
}

/// Uniform prior, `ψ₀ = |0⟩`, `ψ₁ = |1⟩`, `|R| = 1`.
pub fn src_a() -> CqSource {
    let s = |i: usize| ComplexVector::from_fn(2, |k, _| if k == i { c(1.0, 0.0) } else { ZERO });
    CqSource::new(vec![0.5, 0.5], vec![s(0), s(1)], 2, 1)
        .expect("valid reference source")
        .with_name("SRC-A")
}

/// Uniform prior, `ψ₀ = Φ⁺`, `ψ₁ = |00⟩`.
pub fn src_b() -> CqSource {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = ComplexVector::from_vec(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]);
    let zz = ComplexVector::from_vec(vec![c(1.0, 0.0), ZERO, ZERO, ZERO]);
    CqSource::new(vec![0.5, 0.5], vec![phi, zz], 2, 2)
        .expect("valid reference source")
        .with_name("SRC-B")
}

/// Uniform prior, `B = B′B″`, `ψ_x = Φ⁺^{B′R} ⊗ |x⟩^{B″}`.
pub fn src_c() -> CqSource {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = ComplexVector::from_vec(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]);
    let amps = (0..2)
        .map(|x| {
            let ket = ComplexVector::from_fn(2, |k, _| if k == x { c(1.0, 0.0) } else { ZERO });
            let joint = PureState::unchecked(
                kron_vec(&phi, &ket),
                DimsSpec::new([("B1", 2), ("R", 2), ("B2", 2)]).expect("distinct labels"),
            );
            joint.permuted(&["B1", "B2", "R"]).expect("labels exist").amplitudes().clone()
        })
        .collect();
    CqSource::new(vec![0.5, 0.5], amps, 4, 2)
        .expect("valid reference source")
        .with_name("SRC-C")
}

/// Haar-random `ψ_x` on `B ⊗ R` with a random prior; generic almost surely when `r ≥ b`.
pub fn random_source(rng: &mut impl Rng, nx: usize, b: usize, r: usize) -> CqSource {
    let mut probs: Vec<f64> = (0..nx).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    let dims = br_dims(b, r).expect("valid dims");
    let states = (0..nx).map(|_| random_pure(rng, dims.clone())).collect();
    CqSource::from_states(probs, states).expect("valid random source")
}
