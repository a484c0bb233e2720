use nm_tensor::{sigmoid, softplus, Sequence};

use crate::error::SsmError;
use crate::params::{ScanState, SsmParams};
use crate::scan::{check_inputs, time_major};

/// Exact reverse-mode gradients of the scan. Projection-weight and input
/// entries that have no path to the output under a pinned-projection
/// override stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SsmGradients {
    pub dx: Sequence,
    pub d_a: Vec<f64>,
    pub d_w_delta: Vec<f64>,
    pub d_w_b: Vec<f64>,
    pub d_w_c: Vec<f64>,
    pub d_d_skip: Vec<f64>,
    pub d_h0: Vec<f64>,
}

/// Reverse-mode pass of [`crate::selective_scan_seq`]. `dy` holds
/// ∂loss/∂y in the same channel-major layout as y.
///
/// The state adjoint runs right to left: g_t = dy_t ⊗ C_t + Ā_{t+1} ⊙ g_{t+1};
/// every other gradient is a per-step local product against g_t or dy_t.
pub fn selective_scan_backward(
    x: &Sequence,
    p: &SsmParams,
    h0: &ScanState,
    dy: &Sequence,
) -> Result<SsmGradients, SsmError> {
    check_inputs(x, p, h0)?;
    if dy.channels != x.channels || dy.len != x.len {
        return Err(SsmError::ShapeMismatch {
            what: "readout gradient",
            expected: x.channels * x.len,
            got: dy.channels * dy.len,
        });
    }
    let cn = p.channels;
    let n = p.n_state;
    let l = x.len;
    let xt = time_major(x);
    let dyt = time_major(dy);

    // Forward replay, keeping every state h_0..h_L.
    let mut states = Vec::with_capacity(l + 1);
    states.push(h0.h.clone());
    let mut delta = vec![0.0; cn];
    let mut raw = vec![0.0; cn];
    let mut b_t = vec![0.0; n];
    let mut c_t = vec![0.0; n];
    let mut h = h0.h.clone();
    for t in 0..l {
        let x_t = &xt[t * cn..(t + 1) * cn];
        project_raw(p, x_t, &mut raw, &mut delta, &mut b_t, &mut c_t);
        for ci in 0..cn {
            let dl = delta[ci];
            let xv = x_t[ci];
            for ni in 0..n {
                let k = ci * n + ni;
                let abar = (dl * p.a[k]).exp();
                h[k] = abar * h[k] + dl * b_t[ni] * xv;
            }
        }
        states.push(h.clone());
    }

    let mut g_carry = vec![0.0; cn * n];
    let mut dxt = vec![0.0; l * cn];
    let mut d_a = vec![0.0; cn * n];
    let mut d_w_delta = vec![0.0; cn * cn];
    let mut d_w_b = vec![0.0; n * cn];
    let mut d_w_c = vec![0.0; n * cn];
    let mut d_d_skip = vec![0.0; cn];
    let mut d_delta = vec![0.0; cn];
    let mut d_b = vec![0.0; n];
    let mut d_c = vec![0.0; n];

    for t in (0..l).rev() {
        let x_t = &xt[t * cn..(t + 1) * cn];
        let dy_t = &dyt[t * cn..(t + 1) * cn];
        project_raw(p, x_t, &mut raw, &mut delta, &mut b_t, &mut c_t);
        let h_prev = &states[t];
        let h_cur = &states[t + 1];

        // Skip path and readout-projection gradient.
        for ci in 0..cn {
            d_d_skip[ci] += dy_t[ci] * x_t[ci];
            dxt[t * cn + ci] += dy_t[ci] * p.d_skip[ci];
        }
        for ni in 0..n {
            let mut acc = 0.0;
            for ci in 0..cn {
                acc += dy_t[ci] * h_cur[ci * n + ni];
            }
            d_c[ni] = acc;
        }

        // Recurrence path.
        d_b.fill(0.0);
        for ci in 0..cn {
            let dl = delta[ci];
            let xv = x_t[ci];
            let mut d_delta_acc = 0.0;
            let mut dx_inject = 0.0;
            for ni in 0..n {
                let k = ci * n + ni;
                let abar = (dl * p.a[k]).exp();
                let g = dy_t[ci] * c_t[ni] + g_carry[k];
                let d_abar = g * h_prev[k];
                g_carry[k] = g * abar;
                d_a[k] += d_abar * dl * abar;
                d_delta_acc += d_abar * p.a[k] * abar + g * b_t[ni] * xv;
                d_b[ni] += g * dl * xv;
                dx_inject += g * dl * b_t[ni];
            }
            d_delta[ci] = d_delta_acc;
            dxt[t * cn + ci] += dx_inject;
        }

        // Chain into the projections (dead paths under a pinned override).
        if p.const_proj.is_none() {
            for ni in 0..n {
                for j in 0..cn {
                    d_w_c[ni * cn + j] += d_c[ni] * x_t[j];
                    d_w_b[ni * cn + j] += d_b[ni] * x_t[j];
                    dxt[t * cn + j] +=
                        d_c[ni] * p.w_c[ni * cn + j] + d_b[ni] * p.w_b[ni * cn + j];
                }
            }
            for ci in 0..cn {
                let dr = d_delta[ci] * sigmoid(raw[ci]);
                for j in 0..cn {
                    d_w_delta[ci * cn + j] += dr * x_t[j];
                    dxt[t * cn + j] += dr * p.w_delta[ci * cn + j];
                }
            }
        }
    }

    // Back to channel-major for dx.
    let mut dx = Sequence::zeros(cn, l);
    for t in 0..l {
        for ci in 0..cn {
            dx.data[ci * l + t] = dxt[t * cn + ci];
        }
    }

    Ok(SsmGradients {
        dx,
        d_a,
        d_w_delta,
        d_w_b,
        d_w_c,
        d_d_skip,
        d_h0: g_carry,
    })
}

/// Like the forward projection, but also exposes the pre-softplus Δ input
/// (needed for its derivative).
fn project_raw(
    p: &SsmParams,
    x_t: &[f64],
    raw: &mut [f64],
    delta: &mut [f64],
    b_t: &mut [f64],
    c_t: &mut [f64],
) {
    if let Some(cp) = p.const_proj {
        raw.fill(0.0);
        delta.fill(cp.delta);
        b_t.fill(cp.b);
        c_t.fill(cp.c);
        return;
    }
    let cn = p.channels;
    for ci in 0..cn {
        let row = &p.w_delta[ci * cn..(ci + 1) * cn];
        let mut acc = 0.0;
        for j in 0..cn {
            acc += row[j] * x_t[j];
        }
        raw[ci] = acc;
        delta[ci] = softplus(acc);
    }
    for ni in 0..p.n_state {
        let row_b = &p.w_b[ni * cn..(ni + 1) * cn];
        let row_c = &p.w_c[ni * cn..(ni + 1) * cn];
        let mut acc_b = 0.0;
        let mut acc_c = 0.0;
        for j in 0..cn {
            acc_b += row_b[j] * x_t[j];
            acc_c += row_c[j] * x_t[j];
        }
        b_t[ni] = acc_b;
        c_t[ni] = acc_c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::selective_scan_seq;
    use nm_tensor::ParamRng;

    fn random_instance(
        seed: u64,
        channels: usize,
        n_state: usize,
        len: usize,
    ) -> (Sequence, SsmParams, ScanState, Sequence) {
        let mut rng = ParamRng::seed(seed);
        let p = SsmParams::seeded(channels, n_state, &mut rng);
        let x = Sequence::new(channels, len, rng.uniform(channels * len, -1.0, 1.0)).unwrap();
        let h0 = ScanState {
            h: rng.uniform(channels * n_state, -0.5, 0.5),
        };
        let dy = Sequence::new(channels, len, rng.uniform(channels * len, -1.0, 1.0)).unwrap();
        (x, p, h0, dy)
    }

    fn loss(x: &Sequence, p: &SsmParams, h0: &ScanState, g: &Sequence) -> f64 {
        let (y, _) = selective_scan_seq(x, p, h0).unwrap();
        y.data.iter().zip(&g.data).map(|(a, b)| a * b).sum()
    }

    fn check_close(analytic: f64, numeric: f64, what: &str) {
        let scale = 1.0f64.max(analytic.abs()).max(numeric.abs());
        assert!(
            (analytic - numeric).abs() <= 1e-5 * scale,
            "{}: analytic {} vs numeric {}",
            what,
            analytic,
            numeric
        );
    }

    #[test]
    fn zero_readout_gradient_means_zero_everything() {
        let (x, p, h0, _) = random_instance(11, 2, 3, 6);
        let dy = Sequence::zeros(2, 6);
        let g = selective_scan_backward(&x, &p, &h0, &dy).unwrap();
        assert!(g.dx.data.iter().all(|v| *v == 0.0));
        assert!(g.d_a.iter().all(|v| *v == 0.0));
        assert!(g.d_w_delta.iter().all(|v| *v == 0.0));
        assert!(g.d_d_skip.iter().all(|v| *v == 0.0));
        assert!(g.d_h0.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn skip_gain_gradient_is_input_weighted_readout_gradient() {
        let (x, p, h0, dy) = random_instance(12, 2, 3, 7);
        let g = selective_scan_backward(&x, &p, &h0, &dy).unwrap();
        for c in 0..2 {
            let manual: f64 = (0..7).map(|t| dy.get(c, t) * x.get(c, t)).sum();
            assert!((g.d_d_skip[c] - manual).abs() < 1e-12);
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let eps = 1e-5;
        for seed in [21u64, 22, 23] {
            let (x, p, h0, dy) = random_instance(seed, 2, 3, 8);
            let g = selective_scan_backward(&x, &p, &h0, &dy).unwrap();

            let mut param_checks: Vec<(&str, Vec<f64>, Box<dyn Fn(&mut SsmParams) -> &mut Vec<f64>>)> = vec![
                ("a", g.d_a.clone(), Box::new(|p| &mut p.a)),
                ("w_delta", g.d_w_delta.clone(), Box::new(|p| &mut p.w_delta)),
                ("w_b", g.d_w_b.clone(), Box::new(|p| &mut p.w_b)),
                ("w_c", g.d_w_c.clone(), Box::new(|p| &mut p.w_c)),
                ("d_skip", g.d_d_skip.clone(), Box::new(|p| &mut p.d_skip)),
            ];
            for (what, analytic, access) in param_checks.iter_mut() {
                for i in 0..analytic.len() {
                    let mut p_hi = p.clone();
                    access(&mut p_hi)[i] += eps;
                    let mut p_lo = p.clone();
                    access(&mut p_lo)[i] -= eps;
                    let numeric =
                        (loss(&x, &p_hi, &h0, &dy) - loss(&x, &p_lo, &h0, &dy)) / (2.0 * eps);
                    check_close(analytic[i], numeric, what);
                }
            }

            for i in 0..x.data.len() {
                let mut x_hi = x.clone();
                x_hi.data[i] += eps;
                let mut x_lo = x.clone();
                x_lo.data[i] -= eps;
                let numeric =
                    (loss(&x_hi, &p, &h0, &dy) - loss(&x_lo, &p, &h0, &dy)) / (2.0 * eps);
                check_close(g.dx.data[i], numeric, "x");
            }

            for i in 0..h0.h.len() {
                let mut h_hi = h0.clone();
                h_hi.h[i] += eps;
                let mut h_lo = h0.clone();
                h_lo.h[i] -= eps;
                let numeric =
                    (loss(&x, &p, &h_hi, &dy) - loss(&x, &p, &h_lo, &dy)) / (2.0 * eps);
                check_close(g.d_h0[i], numeric, "h0");
            }
        }
    }

    #[test]
    fn pinned_projections_keep_projection_gradients_zero() {
        let (x, mut p, h0, dy) = random_instance(31, 2, 2, 6);
        p.const_proj = Some(crate::params::ConstProjection {
            delta: 0.5,
            b: 1.0,
            c: 1.0,
        });
        let g = selective_scan_backward(&x, &p, &h0, &dy).unwrap();
        assert!(g.d_w_delta.iter().all(|v| *v == 0.0));
        assert!(g.d_w_b.iter().all(|v| *v == 0.0));
        assert!(g.d_w_c.iter().all(|v| *v == 0.0));
        // A and the skip path stay live.
        assert!(g.d_a.iter().any(|v| *v != 0.0));

        // And the surviving gradients still pass finite differences.
        let eps = 1e-5;
        for i in 0..p.a.len() {
            let mut p_hi = p.clone();
            p_hi.a[i] += eps;
            let mut p_lo = p.clone();
            p_lo.a[i] -= eps;
            let numeric = (loss(&x, &p_hi, &h0, &dy) - loss(&x, &p_lo, &h0, &dy)) / (2.0 * eps);
            check_close(g.d_a[i], numeric, "a under pinned projections");
        }
        for i in 0..x.data.len() {
            let mut x_hi = x.clone();
            x_hi.data[i] += eps;
            let mut x_lo = x.clone();
            x_lo.data[i] -= eps;
            let numeric = (loss(&x_hi, &p, &h0, &dy) - loss(&x_lo, &p, &h0, &dy)) / (2.0 * eps);
            check_close(g.dx.data[i], numeric, "x under pinned projections");
        }
    }
}
