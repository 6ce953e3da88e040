//! Windowed max-log demapper for constellations rotated by
//! `arctan(1/sqrt(M))`.
//!
//! 1. Each received component is mapped to the lattice domain,
//!    `Y = y / (d1d_min h) + (M-1)/2`.
//! 2. Around each `Y` a window of `2d` consecutive integer coordinates is
//!    chosen, clamped to `[0, M-1]`.
//! 3. Every coordinate in the I (resp. Q) window identifies one point, whose
//!    metric `(h_I (Y_I - T_I))^2 + (h_Q (Y_Q - T_Q))^2` is evaluated.
//! 4. The global minimum and, for each bit, the minimum over candidates
//!    with the complementary bit value give the max-log ratios.
//!
//! Since any `sqrt(M)` consecutive I coordinates cover every `p_Q` level
//! (and vice versa), the default radius `d = sqrt(M)/2` always leaves a
//! complementary candidate for every bit.

use std::ops::RangeInclusive;

use arrayvec::ArrayVec;

use super::{DemapOptions, LlrVector, MAX_BITS};
use crate::channel::Observation;
use crate::complexity::{Arith, OpCounters};
use crate::constellation::{ConstellationSpec, SymbolIndex};
use crate::error::{Error, Result};

const MAX_CANDIDATES: usize = 512;

/// Lattice-domain observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizedObservation {
    pub y_i: f64,
    pub y_q: f64,
    pub valid_i: bool,
    pub valid_q: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    I,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Coordinate on `axis` that produced the candidate.
    pub t: u32,
    pub axis: Axis,
    pub index: SymbolIndex,
    pub label: u32,
    /// Metric in lattice units; multiply by `d1d_min^2` for the Euclidean
    /// distance.
    pub distance: f64,
}

/// Candidates in evaluation order: the I window ascending, then the Q
/// window ascending. Points found by both windows appear twice.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub entries: ArrayVec<Candidate, MAX_CANDIDATES>,
    pub window_i: RangeInclusive<u32>,
    pub window_q: RangeInclusive<u32>,
}

impl CandidateSet {
    pub fn contains(&self, index: SymbolIndex) -> bool {
        self.entries.iter().any(|c| c.index == index)
    }
}

/// How [`sphere_demap`] produced its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpherePath {
    /// Both gains usable; windowed search.
    Windowed,
    /// One component erased; 1D search over all `M` coordinates of the
    /// surviving axis.
    SingleAxis(Axis),
    /// Both components erased; all ratios are zero.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereOutput {
    pub llr: LlrVector,
    pub counters: OpCounters,
    pub path: SpherePath,
}

/// Window of `2d` consecutive coordinates around `y`, clamped to `[0, M-1]`.
pub fn window(y: f64, m: u32, d: u32) -> RangeInclusive<u32> {
    debug_assert!(d >= 1 && 2 * d <= m);
    let start = window_start(y < f64::from(d), y >= f64::from(m - d), y, m, d);
    start..=start + 2 * d - 1
}

fn window_start(below: bool, above: bool, y: f64, m: u32, d: u32) -> u32 {
    if below {
        0
    } else if above {
        m - 2 * d
    } else {
        // d <= y < M - d here, so the floor is a valid coordinate
        y.floor() as u32 + 1 - d
    }
}

/// Lattice-domain transform of an observation.
pub fn equalize(obs: &Observation, spec: &ConstellationSpec) -> Result<EqualizedObservation> {
    require_lattice(spec)?;
    let floor = super::DEFAULT_GAIN_FLOOR;
    let scale = spec.d1d_min().recip();
    let offset = f64::from(spec.order() - 1) / 2.0;
    let valid_i = obs.h_i >= floor;
    let valid_q = obs.h_q >= floor;
    if !valid_i && !valid_q {
        return Err(Error::DegenerateChannel);
    }
    let lift = |y: f64, h: f64, ok: bool| if ok { y * scale / h + offset } else { f64::NAN };
    Ok(EqualizedObservation {
        y_i: lift(obs.y_i, obs.h_i, valid_i),
        y_q: lift(obs.y_q, obs.h_q, valid_q),
        valid_i,
        valid_q,
    })
}

/// Candidate list of the windowed search with radius `d`.
pub fn candidate_set(
    obs: &Observation,
    spec: &ConstellationSpec,
    d: u32,
) -> Result<CandidateSet> {
    let opts = DemapOptions {
        radius: Some(d),
        ..DemapOptions::default()
    };
    opts.radius_for(spec)?;
    let eq = equalize(obs, spec)?;
    if !(eq.valid_i && eq.valid_q) {
        return Err(Error::DegenerateChannel);
    }
    Ok(collect(obs, spec, &eq, d, &mut crate::complexity::Uncounted))
}

/// Sphere demapper with the default radius `sqrt(M)/2`, reporting the
/// operations it executed.
pub fn sphere_demap(obs: &Observation, spec: &ConstellationSpec) -> Result<SphereOutput> {
    let mut counters = OpCounters::default();
    let mut out = sphere_with(obs, spec, &DemapOptions::default(), &mut counters)?;
    out.counters = counters;
    Ok(out)
}

fn require_lattice(spec: &ConstellationSpec) -> Result<()> {
    if spec.has_lattice() {
        Ok(())
    } else {
        Err(Error::UnsupportedAngle {
            m: spec.order(),
            theta: spec.theta(),
        })
    }
}

/// Steps 2 and 3: windows and candidate metrics.
fn collect<A: Arith>(
    obs: &Observation,
    spec: &ConstellationSpec,
    eq: &EqualizedObservation,
    d: u32,
    ops: &mut A,
) -> CandidateSet {
    let m = spec.order();
    let mut bounds = [(0u32, 0u32); 2];
    for (slot, y) in bounds.iter_mut().zip([eq.y_i, eq.y_q]) {
        let below = ops.lt(y, f64::from(d));
        let above = ops.ge(y, f64::from(m - d));
        let start = window_start(below, above, y, m, d);
        *slot = (start, start + 2 * d - 1);
    }
    let mut entries = ArrayVec::new();
    for (axis, (start, _)) in [Axis::I, Axis::Q].into_iter().zip(bounds) {
        let base = f64::from(start);
        for k in 0..2 * d {
            let t = start + k;
            let t_axis = ops.add(base, f64::from(k));
            let (index, t_i, t_q) = match axis {
                Axis::I => {
                    let index = spec.split_t_i(t);
                    (index, t_axis, f64::from(spec.t_q_of(index)))
                }
                Axis::Q => {
                    let index = spec.split_t_q(t);
                    (index, f64::from(spec.t_i_of(index)), t_axis)
                }
            };
            ops.candidate();
            let diff_i = ops.sub(eq.y_i, t_i);
            let e_i = ops.mul(obs.h_i, diff_i);
            let diff_q = ops.sub(eq.y_q, t_q);
            let e_q = ops.mul(obs.h_q, diff_q);
            let sq_i = ops.mul(e_i, e_i);
            let sq_q = ops.mul(e_q, e_q);
            entries.push(Candidate {
                t,
                axis,
                index,
                label: spec.labeling().label(index),
                distance: ops.add(sq_i, sq_q),
            });
        }
    }
    CandidateSet {
        entries,
        window_i: bounds[0].0..=bounds[0].1,
        window_q: bounds[1].0..=bounds[1].1,
    }
}

/// Step 4: global minimum plus one complementary minimum per bit.
///
/// Each complementary search visits every candidate but the global winner;
/// candidates sharing the winner's bit value compete as +inf.
fn max_log<A: Arith>(
    labels_and_distances: impl Iterator<Item = (u32, f64)> + Clone,
    bits: usize,
    scale: f64,
    ops: &mut A,
) -> LlrVector {
    let mut iter = labels_and_distances.clone().enumerate();
    let Some((_, (mut best_label, mut best))) = iter.next() else {
        return LlrVector::zeros(bits);
    };
    let mut best_pos = 0;
    for (pos, (label, dist)) in iter {
        if ops.lt(dist, best) {
            best = dist;
            best_label = label;
            best_pos = pos;
        }
    }
    let mut llr = ArrayVec::<f64, MAX_BITS>::new();
    for i in 0..bits {
        let own = (best_label >> i) & 1;
        let mut rest = labels_and_distances
            .clone()
            .enumerate()
            .filter(|(pos, _)| *pos != best_pos)
            .map(|(_, (label, dist))| {
                if (label >> i) & 1 == own {
                    f64::INFINITY
                } else {
                    dist
                }
            });
        let mut comp = rest.next().unwrap_or(f64::INFINITY);
        for dist in rest {
            if ops.lt(dist, comp) {
                comp = dist;
            }
        }
        let gap = ops.sub(comp, best);
        let magnitude = ops.mul(gap, scale);
        llr.push(if own == 0 { magnitude } else { -magnitude });
    }
    LlrVector(llr)
}

pub(super) fn sphere_with<A: Arith>(
    obs: &Observation,
    spec: &ConstellationSpec,
    opts: &DemapOptions,
    ops: &mut A,
) -> Result<SphereOutput> {
    require_lattice(spec)?;
    let d = opts.radius_for(spec)?;
    let bits = spec.bits_per_symbol() as usize;
    let m = spec.order();
    let valid_i = obs.h_i >= opts.gain_floor;
    let valid_q = obs.h_q >= opts.gain_floor;
    // 1/d1d_min and (M-1)/2 are per-constellation constants, and
    // d1d_min^2 / sigma^2 is fixed for a whole frame.
    let inv_d1d = spec.d1d_min().recip();
    let offset = f64::from(m - 1) / 2.0;
    let scale = spec.d1d_min().powi(2) / obs.sigma2;
    let lift = |y: f64, h: f64, ops: &mut A| {
        let inv_h = ops.recip(h);
        let scaled = ops.mul(y * inv_d1d, inv_h);
        ops.add(scaled, offset)
    };
    let done = |llr: LlrVector, path| SphereOutput {
        llr: llr.clamp(opts.llr_cap),
        counters: OpCounters::default(),
        path,
    };
    match (valid_i, valid_q) {
        (true, true) => {
            let eq = EqualizedObservation {
                y_i: lift(obs.y_i, obs.h_i, ops),
                y_q: lift(obs.y_q, obs.h_q, ops),
                valid_i,
                valid_q,
            };
            let set = collect(obs, spec, &eq, d, ops);
            let llr = max_log(
                set.entries.iter().map(|c| (c.label, c.distance)),
                bits,
                scale,
                ops,
            );
            Ok(done(llr, SpherePath::Windowed))
        }
        (false, false) => Ok(done(LlrVector::zeros(bits), SpherePath::Degenerate)),
        (true, false) | (false, true) => {
            let (axis, y, h) = if valid_i {
                (Axis::I, obs.y_i, obs.h_i)
            } else {
                (Axis::Q, obs.y_q, obs.h_q)
            };
            let y_lat = lift(y, h, ops);
            let mut cands = ArrayVec::<(u32, f64), 256>::new();
            for t in 0..m {
                let index = match axis {
                    Axis::I => spec.split_t_i(t),
                    Axis::Q => spec.split_t_q(t),
                };
                ops.candidate();
                let diff = ops.sub(y_lat, f64::from(t));
                let e = ops.mul(h, diff);
                cands.push((spec.labeling().label(index), ops.mul(e, e)));
            }
            let llr = max_log(cands.iter().copied(), bits, scale, ops);
            Ok(done(llr, SpherePath::SingleAxis(axis)))
        }
    }
}
