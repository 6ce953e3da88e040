//! Linear MMSE baseline: undo `diag(h_I, h_Q) R(theta)` with a 2x2 MMSE
//! filter, then demap each axis on its own with a 1D max-log search,
//! treating residual interference as Gaussian noise.

use super::{DemapOptions, LlrVector, MAX_BITS};
use crate::channel::Observation;
use crate::constellation::{ConstellationSpec, SymbolIndex};

use arrayvec::ArrayVec;

/// Per-axis MMSE demapper with default options.
pub fn mmse_demap(obs: &Observation, spec: &ConstellationSpec) -> LlrVector {
    mmse_with(obs, spec, &DemapOptions::default())
}

pub(super) fn mmse_with(obs: &Observation, spec: &ConstellationSpec, opts: &DemapOptions) -> LlrVector {
    let bits = spec.bits_per_symbol() as usize;
    let (sin, cos) = spec.theta().sin_cos();
    // y = H s + n with Cov(s) = I/2 and Cov(n) = sigma2/2 I.
    let h = [[obs.h_i * cos, -obs.h_i * sin], [obs.h_q * sin, obs.h_q * cos]];
    let s2 = obs.sigma2;
    // G = H^T H + sigma2 I
    let g00 = h[0][0] * h[0][0] + h[1][0] * h[1][0] + s2;
    let g01 = h[0][0] * h[0][1] + h[1][0] * h[1][1];
    let g11 = h[0][1] * h[0][1] + h[1][1] * h[1][1] + s2;
    let det = g00 * g11 - g01 * g01;
    if !(det.is_finite() && det > 0.0) {
        return LlrVector::zeros(bits);
    }
    let gi = [[g11 / det, -g01 / det], [-g01 / det, g00 / det]];
    // W = G^-1 H^T
    let mut w = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            w[r][c] = gi[r][0] * h[c][0] + gi[r][1] * h[c][1];
        }
    }
    // B = W H
    let mut b = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            b[r][c] = w[r][0] * h[0][c] + w[r][1] * h[1][c];
        }
    }
    let est = [
        w[0][0] * obs.y_i + w[0][1] * obs.y_q,
        w[1][0] * obs.y_i + w[1][1] * obs.y_q,
    ];

    let side = spec.side();
    let mut llr: ArrayVec<f64, MAX_BITS> = (0..bits).map(|_| 0.0).collect();
    for axis in 0..2 {
        let gain = b[axis][axis];
        let other = b[axis][1 - axis];
        let var = 0.5 * other * other
            + 0.5 * s2 * (w[axis][0] * w[axis][0] + w[axis][1] * w[axis][1]);
        if gain <= f64::EPSILON || var <= 0.0 {
            continue;
        }
        let mut min0 = [f64::INFINITY; MAX_BITS];
        let mut min1 = [f64::INFINITY; MAX_BITS];
        for p in 0..side {
            let index = if axis == 0 {
                SymbolIndex::new(p, 0)
            } else {
                SymbolIndex::new(0, p)
            };
            let (s_i, s_q) = spec.unrotated(index);
            let level = if axis == 0 { s_i } else { s_q };
            let d = (est[axis] - gain * level).powi(2);
            let label = spec.labeling().label(index);
            for i in (axis..bits).step_by(2) {
                let slot = if (label >> i) & 1 == 0 { &mut min0[i] } else { &mut min1[i] };
                *slot = slot.min(d);
            }
        }
        for i in (axis..bits).step_by(2) {
            llr[i] = (min1[i] - min0[i]) / (2.0 * var);
        }
    }
    LlrVector(llr).clamp(opts.llr_cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_channel_recovers_bits() {
        for m in [4, 16, 64, 256] {
            let spec = ConstellationSpec::proposed(m).unwrap();
            for label in 0..m {
                let z = spec.map_label(label);
                let o = Observation {
                    y_i: z.z_i,
                    y_q: z.z_q,
                    h_i: 1.0,
                    h_q: 1.0,
                    sigma2: 1e-9,
                };
                assert_eq!(mmse_demap(&o, &spec).hard_label(), label, "M={m}");
            }
        }
    }

    #[test]
    fn dead_channel_gives_zeros() {
        let spec = ConstellationSpec::proposed(16).unwrap();
        let o = Observation {
            y_i: 0.2,
            y_q: -0.1,
            h_i: 0.0,
            h_q: 0.0,
            sigma2: 0.1,
        };
        assert!(mmse_demap(&o, &spec).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_erasure_stays_finite() {
        let spec = ConstellationSpec::proposed(64).unwrap();
        let z = spec.map_label(17);
        let o = Observation {
            y_i: 0.0,
            y_q: 0.8 * z.z_q,
            h_i: 0.0,
            h_q: 0.8,
            sigma2: 0.01,
        };
        assert!(mmse_demap(&o, &spec).iter().all(|v| v.is_finite()));
    }
}
