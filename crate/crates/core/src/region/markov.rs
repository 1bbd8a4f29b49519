use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{RatePoint, TOL_REGION};
use crate::error::{Error, Result};
use crate::idelta::{optimize_idelta, OptimizerOptions};
use crate::qcore::linalg::{ComplexVector, C64};
use crate::qcore::random::rng_from_seed;
use crate::source::{entropic_profile, CqSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarkovOptions {
    /// Noise levels `q` for `q(y|x) = (1−q)·[y=x] + q/|Y|`.
    pub noise_levels: Vec<f64>,
    /// Additional uniformly random stochastic maps.
    pub random_maps: usize,
    pub seed: u64,
    pub optimizer: OptimizerOptions,
}

impl Default for MarkovOptions {
    fn default() -> Self {
        Self {
            noise_levels: vec![0.25, 0.5, 0.75],
            random_maps: 4,
            seed: 0,
            optimizer: OptimizerOptions { restarts: 16, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovPoint {
    pub label: String,
    /// `q(y|x)`, one row per `x`.
    pub map: Vec<Vec<f64>>,
    pub i_y_b: f64,
    pub i_y_w: f64,
    pub point: RatePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovResult {
    /// Non-dominated points sorted by `R_X`.
    pub points: Vec<RatePoint>,
    pub candidates: Vec<MarkovPoint>,
    /// Point of the constant map.
    pub dw_endpoint: RatePoint,
    /// Point of `Y = X`, when `|Y| ≥ |X|`.
    pub qsr_endpoint: Option<RatePoint>,
}

/// The source seen through `Y`: letters `y` with `p(y) > 0` and purifications
/// `Ψ_y = Σ_x √p(x|y) |ψ_x⟩^{BR} |x⟩`, whose reference is `R ⊗ X`.
pub fn conditioned_source(src: &CqSource, map: &[Vec<f64>]) -> Result<(CqSource, Vec<usize>)> {
    let (nx, b, r) = (src.alphabet(), src.b_dim(), src.r_dim());
    let ny = map.first().map_or(0, Vec::len);
    let mut probs = Vec::new();
    let mut amps = Vec::new();
    let mut letters = Vec::new();
    for y in 0..ny {
        let py: f64 = (0..nx).map(|x| src.probs()[x] * map[x][y]).sum();
        if py <= 1e-15 {
            continue;
        }
        let mut v = ComplexVector::zeros(b * r * nx);
        for x in 0..nx {
            let w = (src.probs()[x] * map[x][y] / py).sqrt();
            if w == 0.0 {
                continue;
            }
            let psi = src.states()[x].amplitudes();
            for bi in 0..b {
                for ri in 0..r {
                    v[bi * r * nx + ri * nx + x] = psi[bi * r + ri] * C64::new(w, 0.0);
                }
            }
        }
        probs.push(py);
        amps.push(v);
        letters.push(y);
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok((CqSource::new(probs, amps, b, r * nx)?, letters))
}

fn check_map(map: &[Vec<f64>], nx: usize) -> Result<()> {
    if map.len() != nx {
        return Err(Error::OutOfDomain("map needs one row per letter".into()));
    }
    for row in map {
        let s: f64 = row.iter().sum();
        if row.iter().any(|q| !(*q >= 0.0)) || (s - 1.0).abs() > 1e-9 {
            return Err(Error::OutOfDomain("map rows must be probability vectors".into()));
        }
    }
    Ok(())
}

/// `R_X = S(X|B) + I(Y:B)`, `R_B = S(B) − ½(I(Y:B) + I(Y:W))` for one map.
pub fn markov_point(src: &CqSource, map: &[Vec<f64>], opts: &OptimizerOptions) -> Result<(f64, f64, RatePoint)> {
    check_map(map, src.alphabet())?;
    let prof = entropic_profile(src);
    let (cond, _) = conditioned_source(src, map)?;
    let i_y_b = entropic_profile(&cond).i_x_b.max(0.0);
    let i_y_w = if cond.alphabet() == 1 {
        0.0
    } else {
        optimize_idelta(&cond, 0.0, opts)?.value
    };
    let point = RatePoint::new(prof.s_x_given_b + i_y_b, prof.s_b - 0.5 * (i_y_b + i_y_w));
    Ok((i_y_b, i_y_w, point))
}

/// Achievable points from Markov chains `Y – X – B` with `|Y| = y_dim ≤ |X| + 1`.
pub fn markov_interpolation(src: &CqSource, y_dim: usize, opts: &MarkovOptions) -> Result<MarkovResult> {
    let nx = src.alphabet();
    if y_dim == 0 || y_dim > nx + 1 {
        return Err(Error::OutOfDomain(format!("|Y| = {y_dim} must lie in 1..={}", nx + 1)));
    }
    let mut maps: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    let constant: Vec<Vec<f64>> = (0..nx).map(|_| (0..y_dim).map(|y| if y == 0 { 1.0 } else { 0.0 }).collect()).collect();
    maps.push(("constant".into(), constant));
    if y_dim >= nx {
        let noisy = |q: f64| -> Vec<Vec<f64>> {
            (0..nx)
                .map(|x| (0..y_dim).map(|y| (1.0 - q) * f64::from(u8::from(x == y)) + q / y_dim as f64).collect())
                .collect()
        };
        maps.push(("identity".into(), noisy(0.0)));
        for &q in &opts.noise_levels {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::OutOfDomain(format!("noise level {q}")));
            }
            maps.push((format!("noisy q={q}"), noisy(q)));
        }
    }
    let mut rng = rng_from_seed(opts.seed);
    for k in 0..opts.random_maps {
        let map = (0..nx)
            .map(|_| {
                let row: Vec<f64> = (0..y_dim).map(|_| rng.random::<f64>()).collect();
                let s: f64 = row.iter().sum();
                row.into_iter().map(|q| q / s).collect()
            })
            .collect();
        maps.push((format!("random {k}"), map));
    }
    let mut candidates = Vec::with_capacity(maps.len());
    for (label, map) in maps {
        let (i_y_b, i_y_w, point) = markov_point(src, &map, &opts.optimizer)?;
        candidates.push(MarkovPoint { label, map, i_y_b, i_y_w, point });
    }
    let dw_endpoint = candidates[0].point;
    let qsr_endpoint = (y_dim >= nx).then(|| candidates[1].point);
    let all: Vec<RatePoint> = candidates.iter().map(|c| c.point).collect();
    let mut points: Vec<RatePoint> = Vec::new();
    for (i, p) in all.iter().enumerate() {
        let dominated = all.iter().enumerate().any(|(j, q)| {
            j != i
                && q.r_x <= p.r_x + TOL_REGION
                && q.r_b <= p.r_b + TOL_REGION
                && (q.r_x < p.r_x - TOL_REGION || q.r_b < p.r_b - TOL_REGION || j < i)
        });
        if !dominated {
            points.push(*p);
        }
    }
    points.sort_by(|a, b| a.r_x.total_cmp(&b.r_x).then(a.r_b.total_cmp(&b.r_b)));
    Ok(MarkovResult { points, candidates, dw_endpoint, qsr_endpoint })
}
