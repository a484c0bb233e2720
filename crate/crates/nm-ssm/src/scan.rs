use rayon::prelude::*;

use nm_tensor::{softplus, Sequence};

use crate::error::SsmError;
use crate::params::{ScanState, SsmParams};

pub(crate) fn check_inputs(
    x: &Sequence,
    p: &SsmParams,
    h0: &ScanState,
) -> Result<(), SsmError> {
    if x.channels != p.channels {
        return Err(SsmError::ShapeMismatch {
            what: "input channels",
            expected: p.channels,
            got: x.channels,
        });
    }
    if x.len == 0 {
        return Err(SsmError::ShapeMismatch {
            what: "sequence length",
            expected: 1,
            got: 0,
        });
    }
    let state_len = p.channels * p.n_state;
    if h0.h.len() != state_len {
        return Err(SsmError::ShapeMismatch {
            what: "initial state",
            expected: state_len,
            got: h0.h.len(),
        });
    }
    if !x.data.iter().all(|v| v.is_finite()) || !h0.h.iter().all(|v| v.is_finite()) {
        return Err(SsmError::NonFiniteInput);
    }
    Ok(())
}

/// Reorder a channel-major sequence into per-step rows: `out[t*C + c]`.
pub(crate) fn time_major(x: &Sequence) -> Vec<f64> {
    let (cn, l) = (x.channels, x.len);
    let mut out = vec![0.0; cn * l];
    for c in 0..cn {
        let ch = x.channel(c);
        for (t, v) in ch.iter().enumerate() {
            out[t * cn + c] = *v;
        }
    }
    out
}

fn channel_major(y_time: &[f64], channels: usize, len: usize) -> Sequence {
    let mut out = Sequence::zeros(channels, len);
    for t in 0..len {
        for c in 0..channels {
            out.data[c * len + t] = y_time[t * channels + c];
        }
    }
    out
}

pub(crate) struct StepBufs {
    pub delta: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl StepBufs {
    pub(crate) fn new(p: &SsmParams) -> StepBufs {
        StepBufs {
            delta: vec![0.0; p.channels],
            b: vec![0.0; p.n_state],
            c: vec![0.0; p.n_state],
        }
    }
}

/// Per-step projections: Δ_t = softplus(W_Δ x_t), B_t = W_B x_t, C_t = W_C x_t,
/// or the pinned constants when the test override is set.
pub(crate) fn project(p: &SsmParams, x_t: &[f64], bufs: &mut StepBufs) {
    if let Some(cp) = p.const_proj {
        bufs.delta.fill(cp.delta);
        bufs.b.fill(cp.b);
        bufs.c.fill(cp.c);
        return;
    }
    let cn = p.channels;
    for ci in 0..cn {
        let row = &p.w_delta[ci * cn..(ci + 1) * cn];
        let mut acc = 0.0;
        for j in 0..cn {
            acc += row[j] * x_t[j];
        }
        bufs.delta[ci] = softplus(acc);
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
        bufs.b[ni] = acc_b;
        bufs.c[ni] = acc_c;
    }
}

/// Advance the recurrence over steps `t0..t1` of a time-major input,
/// updating `h` in place. When `y` is given (full-length time-major buffer),
/// the readouts for those steps are written into it.
fn run_span(
    p: &SsmParams,
    xt: &[f64],
    t0: usize,
    t1: usize,
    h: &mut [f64],
    mut y: Option<&mut [f64]>,
) {
    let cn = p.channels;
    let n = p.n_state;
    let mut bufs = StepBufs::new(p);
    for t in t0..t1 {
        let x_t = &xt[t * cn..(t + 1) * cn];
        project(p, x_t, &mut bufs);
        for ci in 0..cn {
            let dl = bufs.delta[ci];
            let xv = x_t[ci];
            let a_row = &p.a[ci * n..(ci + 1) * n];
            let h_row = &mut h[ci * n..(ci + 1) * n];
            let mut readout = 0.0;
            for ni in 0..n {
                let abar = (dl * a_row[ni]).exp();
                h_row[ni] = abar * h_row[ni] + dl * bufs.b[ni] * xv;
                readout += bufs.c[ni] * h_row[ni];
            }
            if let Some(buf) = y.as_deref_mut() {
                buf[t * cn + ci] = readout + p.d_skip[ci] * xv;
            }
        }
    }
}

/// The zero-state affine summary of a span: running the span from state `h`
/// lands on `a_prod ⊙ h + b_acc` (the recurrence is affine in the state).
fn span_summary(p: &SsmParams, xt: &[f64], t0: usize, t1: usize) -> (Vec<f64>, Vec<f64>) {
    let cn = p.channels;
    let n = p.n_state;
    let mut a_prod = vec![1.0; cn * n];
    let mut b_acc = vec![0.0; cn * n];
    let mut bufs = StepBufs::new(p);
    for t in t0..t1 {
        let x_t = &xt[t * cn..(t + 1) * cn];
        project(p, x_t, &mut bufs);
        for ci in 0..cn {
            let dl = bufs.delta[ci];
            let xv = x_t[ci];
            let a_row = &p.a[ci * n..(ci + 1) * n];
            for ni in 0..n {
                let abar = (dl * a_row[ni]).exp();
                let k = ci * n + ni;
                a_prod[k] *= abar;
                b_acc[k] = abar * b_acc[k] + dl * bufs.b[ni] * xv;
            }
        }
    }
    (a_prod, b_acc)
}

/// Reference kernel: strict left-to-right recurrence.
///
/// Per step: Δ_t = softplus(W_Δ x_t); Ā_t = exp(Δ_t ⊙ A); B̄_t = Δ_t ⊙ B_t;
/// h_t = Ā_t ⊙ h_{t−1} + B̄_t ⊗ x_t; y_t = ⟨C_t, h_t⟩ + D_skip ⊙ x_t.
pub fn selective_scan_seq(
    x: &Sequence,
    p: &SsmParams,
    h0: &ScanState,
) -> Result<(Sequence, ScanState), SsmError> {
    check_inputs(x, p, h0)?;
    let xt = time_major(x);
    let mut h = h0.h.clone();
    let mut y_time = vec![0.0; x.len * x.channels];
    run_span(p, &xt, 0, x.len, &mut h, Some(&mut y_time));
    Ok((
        channel_major(&y_time, x.channels, x.len),
        ScanState { h },
    ))
}

/// Same contract as [`selective_scan_seq`], evaluated in chunks: per-chunk
/// affine summaries (parallel), a left-to-right combine producing each
/// chunk's entry state, then a parallel replay materializing y. A single
/// chunk degenerates to the sequential kernel exactly.
pub fn selective_scan_chunked(
    x: &Sequence,
    p: &SsmParams,
    h0: &ScanState,
    chunk: usize,
) -> Result<(Sequence, ScanState), SsmError> {
    if chunk == 0 {
        return Err(SsmError::InvalidParams(
            "chunk size must be at least 1".to_string(),
        ));
    }
    check_inputs(x, p, h0)?;
    let l = x.len;
    let cn = x.channels;
    let xt = time_major(x);

    let bounds: Vec<(usize, usize)> = (0..l)
        .step_by(chunk)
        .map(|t0| (t0, (t0 + chunk).min(l)))
        .collect();
    let k = bounds.len();

    // Summaries for all chunks but the last (its exit state comes from the
    // replay, keeping the single-chunk case bit-identical to sequential).
    let summaries: Vec<(Vec<f64>, Vec<f64>)> = bounds[..k - 1]
        .par_iter()
        .map(|&(t0, t1)| span_summary(p, &xt, t0, t1))
        .collect();

    // Entry state of chunk i, combined strictly left to right.
    let mut entries = Vec::with_capacity(k);
    entries.push(h0.h.clone());
    for (a_prod, b_acc) in &summaries {
        let prev = entries.last().unwrap();
        let next: Vec<f64> = prev
            .iter()
            .zip(a_prod.iter().zip(b_acc))
            .map(|(h, (a, b))| a * h + b)
            .collect();
        entries.push(next);
    }

    let mut y_time = vec![0.0; l * cn];
    let y_slices: Vec<&mut [f64]> = y_time.chunks_mut(chunk * cn).collect();
    let exit_states: Vec<Vec<f64>> = bounds
        .par_iter()
        .zip(entries.into_par_iter())
        .zip(y_slices.into_par_iter())
        .map(|((&(t0, t1), mut h), y_slice)| {
            // The slice starts at step t0: shift the span indices to 0.
            run_span(p, &xt[t0 * cn..t1 * cn], 0, t1 - t0, &mut h, Some(y_slice));
            h
        })
        .collect();

    Ok((
        channel_major(&y_time, cn, l),
        ScanState {
            h: exit_states.into_iter().last().unwrap(),
        },
    ))
}
