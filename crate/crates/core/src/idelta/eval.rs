use serde::{Deserialize, Serialize};

use super::channel::ChannelParam;
use crate::error::{Error, Result};
use crate::qcore::entropy::{conditional_mutual_information, mutual_information};
use crate::qcore::linalg::{factor_entropy, spectrum_entropy, hermitian_eigenvalues, ComplexMatrix, C64};
use crate::qcore::{DensityOperator, DimsSpec};
use crate::source::CqSource;

/// Information quantities of `σ^{XCWR} = (id ⊗ V)ω(id ⊗ V)†`, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelValues {
    /// `I(X:W)`.
    pub i_xw: f64,
    /// `I(R:W|X)`.
    pub i_rw_given_x: f64,
    /// `I(C:W) − I(C:X)`.
    pub i_cw_minus_i_cx: f64,
}

impl ChannelValues {
    /// `E = ½(I(C:W) − I(C:X))`.
    pub fn ebit_rate(&self) -> f64 {
        0.5 * self.i_cw_minus_i_cx
    }
}

/// `σ^{XWR}` together with its values.
#[derive(Debug, Clone)]
pub struct ChannelOutput {
    pub sigma_xwr: DensityOperator,
    pub values: ChannelValues,
}

fn check_dims(src: &CqSource, param: &ChannelParam) -> Result<()> {
    if param.b_dim() != src.b_dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel input {} vs source |B| = {}",
            param.b_dim(),
            src.b_dim()
        )));
    }
    Ok(())
}

/// Builds `σ^{XCWR}` densely and evaluates every quantity with the generic
/// entropy routines; returns the `XWR` marginal.
pub fn apply_channel(src: &CqSource, param: &ChannelParam) -> Result<ChannelOutput> {
    check_dims(src, param)?;
    let (nx, r) = (src.alphabet(), src.r_dim());
    let (cd, wd) = (param.c_dim(), param.w_dim());
    let d = cd * wd * r;
    let mut m = ComplexMatrix::zeros(nx * d, nx * d);
    for x in 0..nx {
        let out = src.states()[x].apply(param.isometry())?;
        let v = out.amplitudes();
        let block = v * v.adjoint() * C64::new(src.probs()[x], 0.0);
        m.view_mut((x * d, x * d), (d, d)).copy_from(&block);
    }
    let dims = DimsSpec::new([("X", nx), ("C", cd), ("W", wd), ("R", r)])?;
    let sigma = DensityOperator::unchecked(m, dims);
    let i_xw = mutual_information(&sigma, &["X"], &["W"])?;
    let i_rw_given_x = conditional_mutual_information(&sigma, &["R"], &["W"], &["X"])?;
    let i_cw = mutual_information(&sigma, &["C"], &["W"])?;
    let i_cx = mutual_information(&sigma, &["C"], &["X"])?;
    Ok(ChannelOutput {
        sigma_xwr: sigma.partial_trace(&["X", "W", "R"])?,
        values: ChannelValues {
            i_xw,
            i_rw_given_x,
            i_cw_minus_i_cx: i_cw - i_cx,
        },
    })
}

/// Fast evaluation of [`ChannelValues`] for many isometries on one source.
///
/// Works per letter on `φ_x = V Ψ_x` (a `|C||W| × |R|` matrix) and takes all
/// entropies through the smaller Gram matrix.
#[derive(Debug, Clone)]
pub struct Evaluator {
    probs: Vec<f64>,
    psi: Vec<ComplexMatrix>,
    s_r: Vec<f64>,
    r: usize,
}

impl Evaluator {
    pub fn new(src: &CqSource) -> Self {
        let psi: Vec<ComplexMatrix> = (0..src.alphabet()).map(|x| src.state_matrix(x)).collect();
        let s_r = psi.iter().map(factor_entropy).collect();
        Self {
            probs: src.probs().to_vec(),
            psi,
            s_r,
            r: src.r_dim(),
        }
    }

    pub fn b_dim(&self) -> usize {
        self.psi[0].nrows()
    }

    /// Evaluates `V` (rows `c·|W| + w`). `with_ebit` also computes `I(C:W) − I(C:X)`.
    pub fn evaluate(&self, v: &ComplexMatrix, c_dim: usize, w_dim: usize, with_ebit: bool) -> ChannelValues {
        let r = self.r;
        let mut avg_w = ComplexMatrix::zeros(w_dim, w_dim);
        let mut sum_s_w = 0.0;
        let mut sum_s_c = 0.0;
        let mut cmi = 0.0;
        let mut stacked = if with_ebit {
            ComplexMatrix::zeros(c_dim * w_dim, r * self.psi.len())
        } else {
            ComplexMatrix::zeros(0, 0)
        };
        let mut f_w = ComplexMatrix::zeros(w_dim, c_dim * r);
        let mut f_c = ComplexMatrix::zeros(c_dim, w_dim * r);
        for (x, psi) in self.psi.iter().enumerate() {
            let p = self.probs[x];
            if p == 0.0 {
                continue;
            }
            let phi = v * psi;
            for ci in 0..c_dim {
                for wi in 0..w_dim {
                    for ri in 0..r {
                        let z = phi[(ci * w_dim + wi, ri)];
                        f_w[(wi, ci * r + ri)] = z;
                        f_c[(ci, wi * r + ri)] = z;
                    }
                }
            }
            let rho_w = &f_w * f_w.adjoint();
            let s_w = spectrum_entropy(&hermitian_eigenvalues(&rho_w));
            let s_c = factor_entropy(&f_c);
            avg_w += rho_w * C64::new(p, 0.0);
            sum_s_w += p * s_w;
            sum_s_c += p * s_c;
            cmi += p * (s_w + self.s_r[x] - s_c);
            if with_ebit {
                let scale = C64::new(p.sqrt(), 0.0);
                stacked.view_mut((0, x * r), (c_dim * w_dim, r)).copy_from(&(phi * scale));
            }
        }
        let s_w_avg = spectrum_entropy(&hermitian_eigenvalues(&avg_w));
        let i_xw = (s_w_avg - sum_s_w).max(0.0);
        let ebit = if with_ebit {
            s_w_avg - factor_entropy(&stacked) + sum_s_c
        } else {
            f64::NAN
        };
        ChannelValues {
            i_xw,
            i_rw_given_x: cmi.max(0.0),
            i_cw_minus_i_cx: ebit,
        }
    }

    pub fn evaluate_param(&self, param: &ChannelParam) -> ChannelValues {
        self.evaluate(param.matrix(), param.c_dim(), param.w_dim(), true)
    }
}

/// `E = ½(I(C:W) − I(C:X))` of the channel.
pub fn ebit_rate(src: &CqSource, param: &ChannelParam) -> Result<f64> {
    check_dims(src, param)?;
    Ok(Evaluator::new(src).evaluate_param(param).ebit_rate())
}
