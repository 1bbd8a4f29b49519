use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::ChannelParam;
use super::eval::{ChannelValues, Evaluator};
use crate::error::{Error, Result};
use crate::qcore::linalg::{hermitian_part, polar_isometry, ComplexMatrix, C64};
use crate::qcore::random::{ginibre, haar_isometry, substream, QRng};
use crate::source::CqSource;

/// Feasibility slack on the constraints.
pub const TOL_FEAS: f64 = 1e-4;
/// Agreement tolerance for optimizer comparisons.
pub const TOL_OPT: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerOptions {
    pub seed: u64,
    pub restarts: usize,
    /// `|C|`; defaults to `|B|²`.
    pub c_dim: Option<usize>,
    /// `|W|`; defaults to `|B|²`.
    pub w_dim: Option<usize>,
    pub penalty_schedule: Vec<f64>,
    pub steps_per_stage: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub tol_feas: f64,
    /// Keep every feasible `(value, constraint)` pair visited.
    pub record_trace: bool,
    /// Cycle restarts through `|C|, |W| ∈ {2, |B|, cap}` instead of using the caps only.
    pub mixed_dims: bool,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 64,
            c_dim: None,
            w_dim: None,
            penalty_schedule: vec![10.0, 1e2, 1e3, 1e4],
            steps_per_stage: 200,
            initial_step: 0.3,
            min_step: 1e-7,
            tol_feas: TOL_FEAS,
            record_trace: false,
            mixed_dims: true,
        }
    }
}

impl OptimizerOptions {
    pub fn dims_for(&self, b: usize) -> (usize, usize) {
        (self.c_dim.unwrap_or(b * b), self.w_dim.unwrap_or(b * b))
    }

    /// `(|C|, |W|)` used by restart `index`; restarts 0 and 1 always use the caps.
    pub fn restart_dims(&self, b: usize, index: usize) -> (usize, usize) {
        let (c, w) = self.dims_for(b);
        if !self.mixed_dims || index < 2 {
            return (c, w);
        }
        let ladder = |cap: usize| {
            let mut l: Vec<usize> = [2, b, cap].into_iter().filter(|&d| d <= cap).collect();
            l.sort_unstable();
            l.dedup();
            l
        };
        let pairs: Vec<(usize, usize)> = ladder(c)
            .into_iter()
            .flat_map(|ci| ladder(w).into_iter().map(move |wi| (ci, wi)))
            .filter(|&(ci, wi)| ci * wi >= b)
            .collect();
        if pairs.is_empty() {
            return (c, w);
        }
        pairs[(index - 2) % pairs.len()]
    }

    fn validate(&self, b: usize) -> Result<()> {
        let (c, w) = self.dims_for(b);
        if c == 0 || w == 0 || c * w < b {
            return Err(Error::DimensionMismatch(format!("|C|={c}, |W|={w} cannot dilate |B|={b}")));
        }
        if self.restarts == 0 {
            return Err(Error::OutOfDomain("at least one restart is required".into()));
        }
        if self.penalty_schedule.is_empty() || self.penalty_schedule.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::OutOfDomain("penalty schedule must be positive".into()));
        }
        if !(self.initial_step > 0.0) || !(self.tol_feas >= 0.0) {
            return Err(Error::OutOfDomain("step and tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Best channel found for one `δ`; `value` is a lower bound on `I_δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdeltaResult {
    pub delta: f64,
    pub value: f64,
    pub constraint: f64,
    /// `I(C:W) − I(C:X)` of the returned channel.
    pub secondary: f64,
    pub ebit_rate: f64,
    pub feasible: bool,
    pub param: ChannelParam,
    pub restarts_used: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Problem {
    /// `I(R:W|X) ≤ δ`.
    Idelta,
    /// `I(R:W|X) ≤ tol` and `I(C:W) − I(C:X) ≤ tol`.
    ZeroMinus,
}

struct Candidate {
    v: ComplexMatrix,
    c: usize,
    w: usize,
    vals: ChannelValues,
}

struct RestartOutcome {
    best: Option<Candidate>,
    final_feasible_value: Option<f64>,
    trace: Vec<(f64, f64)>,
}

struct Ctx<'a> {
    eval: &'a Evaluator,
    problem: Problem,
    delta: f64,
    opts: &'a OptimizerOptions,
}

impl Ctx<'_> {
    fn values(&self, v: &ComplexMatrix, c: usize, w: usize) -> ChannelValues {
        self.eval.evaluate(v, c, w, self.problem == Problem::ZeroMinus)
    }

    fn feasible(&self, vals: &ChannelValues) -> bool {
        let tol = self.opts.tol_feas;
        match self.problem {
            Problem::Idelta => vals.i_rw_given_x <= self.delta + tol,
            Problem::ZeroMinus => vals.i_rw_given_x <= tol && vals.i_cw_minus_i_cx <= tol,
        }
    }

    fn objective(&self, vals: &ChannelValues, mu: f64) -> f64 {
        let excess = (vals.i_rw_given_x - self.delta).max(0.0);
        let mut f = vals.i_xw - mu * excess * excess;
        if self.problem == Problem::ZeroMinus {
            let e = vals.i_cw_minus_i_cx.max(0.0);
            f -= mu * e * e;
        }
        f
    }

    fn start(&self, index: usize, c: usize, w: usize, rng: &mut QRng) -> ComplexMatrix {
        let b = self.eval.b_dim();
        let structured = match index {
            0 => ChannelParam::identity_to_w(b, c, w).ok(),
            1 => ChannelParam::trivial(b, c, w).ok(),
            _ => None,
        };
        match structured {
            Some(p) => p.matrix().clone(),
            None => haar_isometry(rng, c * w, b),
        }
    }

    fn run(&self, index: usize) -> RestartOutcome {
        let mut rng = substream(self.opts.seed, index as u64);
        let (c, w) = self.opts.restart_dims(self.eval.b_dim(), index);
        let mut v = self.start(index, c, w, &mut rng);
        let mut vals = self.values(&v, c, w);
        let mut best: Option<Candidate> = None;
        let mut trace = Vec::new();
        let mut consider = |v: &ComplexMatrix, vals: &ChannelValues, best: &mut Option<Candidate>| {
            if self.feasible(vals) {
                if self.opts.record_trace {
                    trace.push((vals.i_xw, vals.i_rw_given_x));
                }
                if best.as_ref().is_none_or(|b| vals.i_xw > b.vals.i_xw) {
                    *best = Some(Candidate { v: v.clone(), c, w, vals: *vals });
                }
            }
        };
        consider(&v, &vals, &mut best);
        let (m, b) = (v.nrows(), v.ncols());
        for &mu in &self.opts.penalty_schedule {
            let mut step = self.opts.initial_step;
            let mut f = self.objective(&vals, mu);
            for _ in 0..self.opts.steps_per_stage {
                if step < self.opts.min_step {
                    step = self.opts.min_step * 10.0;
                }
                // Random tangent direction ξ = Z − V·herm(V†Z), normalized.
                let z = ginibre(&mut rng, m, b);
                let mut xi = &z - &v * hermitian_part(&(v.adjoint() * &z));
                let n = xi.norm();
                if n < 1e-14 {
                    continue;
                }
                xi /= C64::new(n, 0.0);
                let mut improved = false;
                for sign in [1.0, -1.0] {
                    let cand = polar_isometry(&(&v + &xi * C64::new(sign * step, 0.0)));
                    let cv = self.values(&cand, c, w);
                    consider(&cand, &cv, &mut best);
                    let cf = self.objective(&cv, mu);
                    if cf > f {
                        v = cand;
                        vals = cv;
                        f = cf;
                        improved = true;
                        break;
                    }
                }
                step *= if improved { 1.5 } else { 0.7 };
                step = step.min(1.0);
            }
        }
        let final_feasible_value = self.feasible(&vals).then_some(vals.i_xw);
        RestartOutcome { best, final_feasible_value, trace }
    }
}

fn optimize(src: &CqSource, delta: f64, opts: &OptimizerOptions, problem: Problem) -> Result<IdeltaResult> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::OutOfDomain(format!("δ = {delta}")));
    }
    let b = src.b_dim();
    opts.validate(b)?;
    let eval = Evaluator::new(src);
    let ctx = Ctx { eval: &eval, problem, delta, opts };
    let outcomes: Vec<RestartOutcome> = (0..opts.restarts).into_par_iter().map(|i| ctx.run(i)).collect();

    // Deterministic reduction: strictly larger value wins, ties keep the lower index.
    let mut best: Option<&Candidate> = None;
    for o in &outcomes {
        if let Some(cand) = &o.best {
            if best.is_none_or(|b| cand.vals.i_xw > b.vals.i_xw) {
                best = Some(cand);
            }
        }
    }
    let trace: Vec<(f64, f64)> = outcomes.iter().flat_map(|o| o.trace.iter().copied()).collect();
    let (v, c, w, vals, feasible) = match best {
        Some(cand) => (cand.v.clone(), cand.c, cand.w, cand.vals, true),
        None => {
            // Nothing feasible (possible only when |C| < |B|): report the constant-channel start.
            let (c, w) = opts.dims_for(b);
            let start = ctx.start(1, c, w, &mut substream(opts.seed, 1));
            let vals = ctx.values(&start, c, w);
            let ok = ctx.feasible(&vals);
            (start, c, w, vals, ok)
        }
    };
    let value = vals.i_xw;
    let converged = feasible
        && outcomes
            .iter()
            .any(|o| o.final_feasible_value.is_some_and(|f| f >= value - TOL_OPT));
    let full = eval.evaluate(&v, c, w, true);
    Ok(IdeltaResult {
        delta,
        value,
        constraint: vals.i_rw_given_x,
        secondary: full.i_cw_minus_i_cx,
        ebit_rate: full.ebit_rate(),
        feasible,
        param: ChannelParam::unchecked(v, b, c, w),
        restarts_used: opts.restarts,
        converged,
        trace,
    })
}

/// Lower bound on `I_δ(ω) = sup { I(X:W) : I(R:W|X) ≤ δ }` by penalized random ascent.
pub fn optimize_idelta(src: &CqSource, delta: f64, opts: &OptimizerOptions) -> Result<IdeltaResult> {
    optimize(src, delta, opts, Problem::Idelta)
}

/// Lower bound on `I_{0−}`: additionally `I(C:W) − I(C:X) ≤ 0`.
pub fn optimize_i0_minus(src: &CqSource, opts: &OptimizerOptions) -> Result<IdeltaResult> {
    optimize(src, 0.0, opts, Problem::ZeroMinus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub delta: f64,
    /// Optimizer value at this `δ`.
    pub raw: f64,
    /// Running maximum of `raw`.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdeltaCurve {
    pub points: Vec<CurvePoint>,
    pub monotonized: bool,
    /// Indices `i` where the monotonized value at `δ_i` lies more than
    /// `TOL_OPT` below the chord through its neighbours.
    pub concavity_failures: Vec<usize>,
    #[serde(skip)]
    pub results: Vec<IdeltaResult>,
}

impl IdeltaCurve {
    pub fn value_at(&self, delta: f64) -> Option<f64> {
        self.points.iter().find(|p| p.delta == delta).map(|p| p.lower_bound)
    }
}

pub fn idelta_curve(src: &CqSource, grid: &[f64], opts: &OptimizerOptions) -> Result<IdeltaCurve> {
    if grid.is_empty() {
        return Err(Error::OutOfDomain("empty δ grid".into()));
    }
    if grid.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::OutOfDomain("δ grid must be nonnegative and ascending".into()));
    }
    let results = grid
        .iter()
        .map(|&d| optimize_idelta(src, d, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut running = f64::NEG_INFINITY;
    let points: Vec<CurvePoint> = results
        .iter()
        .map(|r| {
            running = running.max(r.value);
            CurvePoint { delta: r.delta, raw: r.value, lower_bound: running }
        })
        .collect();
    let mut concavity_failures = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        let (a, m, z) = (&points[i - 1], &points[i], &points[i + 1]);
        if z.delta > a.delta {
            let t = (m.delta - a.delta) / (z.delta - a.delta);
            let chord = a.lower_bound + t * (z.lower_bound - a.lower_bound);
            if m.lower_bound < chord - TOL_OPT {
                concavity_failures.push(i);
            }
        }
    }
    Ok(IdeltaCurve { points, monotonized: true, concavity_failures, results })
}

/// Geometric grid used for the `δ ↘ 0` extrapolation.
pub const I0_TILDE_GRID: [f64; 5] = [0.0, 1e-4, 1e-3, 1e-2, 1e-1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct I0Estimate {
    pub i0: f64,
    pub i0_tilde: f64,
    pub gap: f64,
    pub curve: IdeltaCurve,
}

/// `I₀` from the optimizer at `δ = 0`; `Ĩ₀` as the monotonized curve value at the
/// smallest positive grid point, so `Ĩ₀ ≥ I₀` by construction.
pub fn estimate_i0_tilde(src: &CqSource, opts: &OptimizerOptions) -> Result<I0Estimate> {
    let curve = idelta_curve(src, &I0_TILDE_GRID, opts)?;
    let i0 = curve.points[0].raw;
    let i0_tilde = curve.points[1].lower_bound;
    Ok(I0Estimate { i0, i0_tilde, gap: i0_tilde - i0, curve })
}

/// Right-hand side `δ′·log|X| + 2h̃(δ′/2)` of the generic-collapse bound, where
/// `h̃` is the binary entropy on `[0, ½]` and 1 beyond.
pub fn collapse_bound(delta_prime: f64, alphabet: usize) -> f64 {
    let t = delta_prime / 2.0;
    let h = if t >= 0.5 {
        1.0
    } else {
        crate::qcore::metrics::binary_entropy_unchecked(t)
    };
    delta_prime * (alphabet as f64).log2() + 2.0 * h
}
