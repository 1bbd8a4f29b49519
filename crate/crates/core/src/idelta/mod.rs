//! The constrained quantity `I_δ`, its limits and the unassisted variant.

mod channel;
mod eval;
mod optimize;
mod oracle;

pub use channel::{ChannelParam, ChannelParamDoc};
pub use eval::{apply_channel, ebit_rate, ChannelOutput, ChannelValues, Evaluator};
pub use optimize::{
    collapse_bound, estimate_i0_tilde, idelta_curve, optimize_i0_minus, optimize_idelta, CurvePoint, I0Estimate,
    IdeltaCurve, IdeltaResult, OptimizerOptions, I0_TILDE_GRID, TOL_FEAS, TOL_OPT,
};
pub use oracle::{oracle_grid, ORACLE_MAX_RESOLUTION};
