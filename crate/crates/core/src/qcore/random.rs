//! Seeded random states, unitaries and isometries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::dims::DimsSpec;
use super::linalg::{trace, ComplexMatrix, ComplexVector, C64};
use super::state::{DensityOperator, PureState};

pub type QRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> QRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from a base seed.
pub fn substream(seed: u64, index: u64) -> QRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// Haar-random unitary via QR of a Ginibre matrix with phase-corrected `R`.
pub fn haar_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    haar_isometry(rng, d, d)
}

/// Haar-random isometry `cols → rows`.
pub fn haar_isometry(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let n = d.norm();
        if n > 0.0 {
            let ph = d / n;
            for i in 0..rows {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}

pub fn random_vector(rng: &mut impl Rng, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_pure(rng: &mut impl Rng, dims: DimsSpec) -> PureState {
    PureState::unchecked(random_vector(rng, dims.total()), dims)
}

/// `G G† / Tr(G G†)` with `G` of shape `d × rank`; full rank almost surely when `rank ≥ d`.
pub fn random_density(rng: &mut impl Rng, dims: DimsSpec, rank: usize) -> DensityOperator {
    let d = dims.total();
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let t = trace(&m).re;
    let mut m = m / C64::new(t, 0.0);
    // Exact Hermitian symmetrization against round-off.
    m = (&m + m.adjoint()).scale(0.5);
    DensityOperator::unchecked(m, dims)
}
