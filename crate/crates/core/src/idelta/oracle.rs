use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;

use super::optimize::TOL_FEAS;
use crate::error::{Error, Result};
use crate::qcore::C64;
use crate::source::CqSource;

pub const ORACLE_MAX_RESOLUTION: usize = 24;

/// Entropy (bits) of a 2×2 Hermitian PSD matrix `[[a, b], [b̄, d]]`.
fn entropy2(a: f64, b: C64, d: f64) -> f64 {
    let t = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b.norm_sqr()).sqrt();
    let term = |l: f64| if l > 0.0 { -l * l.log2() } else { 0.0 };
    term(0.5 * (t + disc)) + term(0.5 * (t - disc))
}

/// `[[a, b], [b̄, d]]` as `(a, b, d)`.
type Herm2 = (f64, C64, f64);

fn add(acc: &mut Herm2, m: Herm2, w: f64) {
    acc.0 += w * m.0;
    acc.1 += m.1 * w;
    acc.2 += w * m.2;
}

struct Letters {
    probs: Vec<f64>,
    /// `ψ_x[b][r]`.
    psi: Vec<Vec<[C64; 2]>>,
    s_b: Vec<f64>,
}

/// `(I(X:W), I(R:W|X))` for `V|0⟩ = a`, `V|1⟩ = b` with `a, b ∈ C²⊗W²` (index `c·2 + w`).
fn values_cw22(l: &Letters, a: &[C64; 4], bv: &[C64; 4]) -> (f64, f64) {
    let mut avg: Herm2 = (0.0, C64::new(0.0, 0.0), 0.0);
    let mut sum_sw = 0.0;
    let mut cmi = 0.0;
    for (x, psi) in l.psi.iter().enumerate() {
        let p = l.probs[x];
        let mut w: Herm2 = (0.0, C64::new(0.0, 0.0), 0.0);
        let mut c: Herm2 = (0.0, C64::new(0.0, 0.0), 0.0);
        for col in psi {
            // φ = a·ψ[0][r] + b·ψ[1][r]
            let phi: [C64; 4] = std::array::from_fn(|k| a[k] * col[0] + bv[k] * col[1]);
            w.0 += phi[0].norm_sqr() + phi[2].norm_sqr();
            w.2 += phi[1].norm_sqr() + phi[3].norm_sqr();
            w.1 += phi[0] * phi[1].conj() + phi[2] * phi[3].conj();
            c.0 += phi[0].norm_sqr() + phi[1].norm_sqr();
            c.2 += phi[2].norm_sqr() + phi[3].norm_sqr();
            c.1 += phi[0] * phi[2].conj() + phi[1] * phi[3].conj();
        }
        let sw = entropy2(w.0, w.1, w.2);
        let sc = entropy2(c.0, c.1, c.2);
        add(&mut avg, w, p);
        sum_sw += p * sw;
        cmi += p * (sw + l.s_b[x] - sc);
    }
    (entropy2(avg.0, avg.1, avg.2) - sum_sw, cmi)
}

/// Brute-force maximum of `I(X:W)` subject to `I(R:W|X) ≤ δ + tol_feas` over a net
/// of isometries `B → C⊗W` with `|B| = 2`, `|C|, |W| ≤ 2`.
///
/// For `|C| = |W| = 2`, local unitaries on `C` and `W` leave both quantities
/// unchanged, so `V|0⟩ = cos θ|00⟩ + sin θ|11⟩` with `θ ∈ [0, π/4]` and
/// `V|1⟩ = e^{iη}(cos φ₁|01⟩ + sin φ₁ cos φ₂|10⟩) + sin φ₁ sin φ₂ e^{iχ}|a⊥⟩`.
/// Endpoints are included, so the net contains the identity and the constant
/// channel exactly. The constant channel makes 0 a floor.
pub fn oracle_grid(src: &CqSource, delta: f64, c_dim: usize, w_dim: usize, resolution: usize) -> Result<f64> {
    if src.b_dim() > 2 || c_dim > 2 || w_dim > 2 || c_dim == 0 || w_dim == 0 {
        return Err(Error::DimensionMismatch(format!(
            "oracle needs |B|, |C|, |W| ≤ 2 (got {}, {c_dim}, {w_dim})",
            src.b_dim()
        )));
    }
    if resolution == 0 || resolution > ORACLE_MAX_RESOLUTION {
        return Err(Error::OutOfDomain(format!("resolution {resolution} not in 1..={ORACLE_MAX_RESOLUTION}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::OutOfDomain(format!("δ = {delta}")));
    }
    let (r, b) = (src.r_dim(), src.b_dim());
    let letters = Letters {
        probs: src.probs().to_vec(),
        psi: src
            .states()
            .iter()
            .map(|s| {
                let v = s.amplitudes();
                (0..r)
                    .map(|ri| std::array::from_fn(|bi| if bi < b { v[bi * r + ri] } else { C64::new(0.0, 0.0) }))
                    .collect()
            })
            .collect(),
        s_b: src
            .states()
            .iter()
            .map(|s| {
                let v = s.amplitudes();
                let m = |i: usize, j: usize| (0..r).map(|k| v[i * r + k] * v[j * r + k].conj()).sum::<C64>();
                if b == 1 {
                    0.0
                } else {
                    entropy2(m(0, 0).re, m(0, 1), m(1, 1).re)
                }
            })
            .collect(),
    };
    let limit = delta + TOL_FEAS;
    if w_dim == 1 || b == 1 {
        // Nothing reaches W, or B is one-dimensional: I(X:W) = 0.
        return Ok(0.0);
    }
    if c_dim == 1 {
        // V is a unitary onto W: the values of the identity channel.
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let (v, c) = values_cw22(&letters, &[one, zero, zero, zero], &[zero, one, zero, zero]);
        return Ok(if c <= limit { v.max(0.0) } else { 0.0 });
    }
    let n = resolution;
    let lin = |lo: f64, hi: f64, k: usize, steps: usize| lo + (hi - lo) * k as f64 / steps as f64;
    let best = (0..=n)
        .into_par_iter()
        .map(|it| {
            let th = lin(0.0, FRAC_PI_4, it, n);
            let (ct, st) = (th.cos(), th.sin());
            let zero = C64::new(0.0, 0.0);
            let a = [C64::new(ct, 0.0), zero, zero, C64::new(st, 0.0)];
            let a_perp = [C64::new(st, 0.0), zero, zero, C64::new(-ct, 0.0)];
            let mut best = 0.0f64;
            for i1 in 0..=n {
                let f1 = lin(0.0, FRAC_PI_2, i1, n);
                for i2 in 0..=n {
                    let f2 = lin(0.0, FRAC_PI_2, i2, n);
                    let m01 = f1.cos();
                    let m10 = f1.sin() * f2.cos();
                    let mperp = f1.sin() * f2.sin();
                    for ie in 0..n {
                        let eta = C64::from_polar(1.0, lin(0.0, 2.0 * PI, ie, n));
                        // χ is irrelevant when the a⊥ component vanishes.
                        let chis = if mperp.abs() < 1e-15 { 1 } else { n };
                        for ic in 0..chis {
                            let chi = C64::from_polar(mperp, lin(0.0, 2.0 * PI, ic, n));
                            let bv: [C64; 4] = std::array::from_fn(|k| {
                                let base = match k {
                                    1 => eta * m01,
                                    2 => eta * m10,
                                    _ => zero,
                                };
                                base + chi * a_perp[k]
                            });
                            let (v, c) = values_cw22(&letters, &a, &bv);
                            if c <= limit && v > best {
                                best = v;
                            }
                        }
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best.max(0.0))
}
