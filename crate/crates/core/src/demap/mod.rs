//! Soft demappers for rotated QAM observed through independent I/Q fading.
//!
//! Every demapper returns an [`LlrVector`] with the convention
//! `llr[i] > 0` when `b_i = 0` is the more likely value. Decoders expecting
//! the opposite orientation must negate.

mod mmse;
mod sphere;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use arrayvec::ArrayVec;

use crate::channel::Observation;
use crate::complexity::{Arith, OpCounters, Uncounted};
use crate::constellation::{ConstellationSpec, RotatedPoint};
use crate::error::{Error, Result};

pub use mmse::mmse_demap;
pub use sphere::{
    candidate_set, equalize, sphere_demap, window, Axis, Candidate, CandidateSet,
    EqualizedObservation, SphereOutput, SpherePath,
};

/// Default magnitude cap applied to every LLR.
pub const DEFAULT_LLR_CAP: f64 = 50.0;

/// Fading gains below this are treated as erased by the sphere demapper.
pub const DEFAULT_GAIN_FLOOR: f64 = 1e-6;

pub(crate) const MAX_BITS: usize = 8;

/// Soft metrics of the `log2(M)` bits of one symbol.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrVector(ArrayVec<f64, MAX_BITS>);

impl LlrVector {
    pub fn zeros(bits: usize) -> Self {
        LlrVector((0..bits).map(|_| 0.0).collect())
    }

    pub fn from_slice(values: &[f64]) -> Self {
        LlrVector(values.iter().copied().collect())
    }

    /// Hard decision of bit `i`: 1 when `llr[i] < 0`, else 0.
    pub fn hard_bit(&self, i: usize) -> u8 {
        u8::from(self.0[i] < 0.0)
    }

    /// Hard decisions packed as a label (bit `i` = decision on `b_i`).
    pub fn hard_label(&self) -> u32 {
        (0..self.0.len()).fold(0, |acc, i| acc | (u32::from(self.hard_bit(i)) << i))
    }

    fn clamp(mut self, cap: f64) -> Self {
        for v in self.0.iter_mut() {
            *v = v.clamp(-cap, cap);
        }
        self
    }
}

impl Deref for LlrVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Tuning shared by the demappers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemapOptions {
    pub llr_cap: f64,
    pub gain_floor: f64,
    /// Sphere window radius; `None` means `sqrt(M)/2`.
    pub radius: Option<u32>,
}

impl Default for DemapOptions {
    fn default() -> Self {
        DemapOptions {
            llr_cap: DEFAULT_LLR_CAP,
            gain_floor: DEFAULT_GAIN_FLOOR,
            radius: None,
        }
    }
}

impl DemapOptions {
    pub(crate) fn radius_for(&self, spec: &ConstellationSpec) -> Result<u32> {
        let d = self.radius.unwrap_or(spec.side() / 2);
        if d == 0 || 2 * d > spec.order() {
            return Err(Error::invalid(format!(
                "sphere radius {d} outside [1, {}]",
                spec.order() / 2
            )));
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemapperKind {
    /// Log-sum-exp over all points.
    Exact,
    /// Max-log over all points.
    MaxLog,
    /// Windowed max-log over `2 sqrt(M)` lattice candidates.
    Sphere,
    /// Linear MMSE equalisation followed by per-axis max-log.
    Mmse,
}

impl DemapperKind {
    pub fn name(self) -> &'static str {
        match self {
            DemapperKind::Exact => "exact",
            DemapperKind::MaxLog => "maxlog",
            DemapperKind::Sphere => "sphere",
            DemapperKind::Mmse => "mmse",
        }
    }
}

impl fmt::Display for DemapperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DemapperKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(DemapperKind::Exact),
            "maxlog" => Ok(DemapperKind::MaxLog),
            "sphere" => Ok(DemapperKind::Sphere),
            "mmse" => Ok(DemapperKind::Mmse),
            other => Err(Error::invalid(format!(
                "unknown demapper '{other}' (expected exact, maxlog, sphere or mmse)"
            ))),
        }
    }
}

/// A demapper choice bundled with its options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Demapper {
    pub kind: DemapperKind,
    pub options: DemapOptions,
}

impl Demapper {
    pub fn new(kind: DemapperKind) -> Self {
        Demapper {
            kind,
            options: DemapOptions::default(),
        }
    }

    /// Checks that the demapper can run on `spec`.
    pub fn supports(&self, spec: &ConstellationSpec) -> Result<()> {
        if self.kind == DemapperKind::Sphere {
            if !spec.has_lattice() {
                return Err(Error::UnsupportedAngle {
                    m: spec.order(),
                    theta: spec.theta(),
                });
            }
            self.options.radius_for(spec)?;
        }
        Ok(())
    }

    pub fn demap(&self, obs: &Observation, spec: &ConstellationSpec) -> Result<LlrVector> {
        match self.kind {
            DemapperKind::Exact => Ok(exact_with(obs, spec, &self.options)),
            DemapperKind::MaxLog => Ok(maxlog_with(obs, spec, &self.options, &mut Uncounted)),
            DemapperKind::Sphere => {
                sphere::sphere_with(obs, spec, &self.options, &mut Uncounted).map(|o| o.llr)
            }
            DemapperKind::Mmse => Ok(mmse::mmse_with(obs, spec, &self.options)),
        }
    }

    /// Like [`Demapper::demap`], adding the executed operations to `counters`.
    ///
    /// Only the max-log and sphere demappers are instrumented; the others
    /// leave `counters` untouched.
    pub fn demap_counted(
        &self,
        obs: &Observation,
        spec: &ConstellationSpec,
        counters: &mut OpCounters,
    ) -> Result<LlrVector> {
        match self.kind {
            DemapperKind::MaxLog => Ok(maxlog_with(obs, spec, &self.options, counters)),
            DemapperKind::Sphere => {
                sphere::sphere_with(obs, spec, &self.options, counters).map(|o| o.llr)
            }
            _ => self.demap(obs, spec),
        }
    }
}

/// Squared Euclidean distance between the observation and the faded image
/// of `z`.
pub fn distance(obs: &Observation, z: &RotatedPoint) -> f64 {
    let e_i = obs.y_i - obs.h_i * z.z_i;
    let e_q = obs.y_q - obs.h_q * z.z_q;
    e_i * e_i + e_q * e_q
}

/// The same metric as [`distance`], evaluated through its expansion in the
/// unrotated amplitudes `(s_I, s_Q)`.
///
/// The expansion isolates the term coupling `s_I` and `s_Q`, whose
/// coefficient `h11 h12 + h21 h22` vanishes when `h_I = h_Q` or the
/// rotation is trivial.
pub fn expanded_distance(obs: &Observation, s_i: f64, s_q: f64, theta: f64) -> Result<f64> {
    let (sin, cos) = theta.sin_cos();
    let h11 = obs.h_i * cos;
    let h12 = -obs.h_i * sin;
    let h21 = obs.h_q * sin;
    let h22 = obs.h_q * cos;
    let a = h11 * h11 + h21 * h21;
    let b = h12 * h12 + h22 * h22;
    if a == 0.0 || b == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    let u = obs.y_i * h11 + obs.y_q * h21;
    let v = obs.y_i * h12 + obs.y_q * h22;
    Ok(obs.y_i * obs.y_i + obs.y_q * obs.y_q - u * u / a - v * v / b
        + a * (s_i - u / a).powi(2)
        + b * (s_q - v / b).powi(2)
        + 2.0 * cross_coefficient(obs, theta) * s_i * s_q)
}

/// `h11 h12 + h21 h22`, the coupling coefficient of the expansion.
pub fn cross_coefficient(obs: &Observation, theta: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    (obs.h_i * cos) * (-obs.h_i * sin) + (obs.h_q * sin) * (obs.h_q * cos)
}

/// Exact log-likelihood ratios (log-sum-exp over every point).
pub fn llr_exact(obs: &Observation, spec: &ConstellationSpec) -> LlrVector {
    exact_with(obs, spec, &DemapOptions::default())
}

/// Max-log ratios from an exhaustive search over all `M` points.
pub fn llr_maxlog_full(obs: &Observation, spec: &ConstellationSpec) -> LlrVector {
    maxlog_with(obs, spec, &DemapOptions::default(), &mut Uncounted)
}

/// [`llr_maxlog_full`] with operation counting.
pub fn llr_maxlog_full_counted(
    obs: &Observation,
    spec: &ConstellationSpec,
) -> (LlrVector, OpCounters) {
    let mut counters = OpCounters::default();
    let llr = maxlog_with(obs, spec, &DemapOptions::default(), &mut counters);
    (llr, counters)
}

fn exact_with(obs: &Observation, spec: &ConstellationSpec, opts: &DemapOptions) -> LlrVector {
    let m = spec.order();
    let bits = spec.bits_per_symbol() as usize;
    let mut metric = [0.0f64; 256];
    for label in 0..m {
        metric[label as usize] = -distance(obs, &spec.map_label(label)) / obs.sigma2;
    }
    let metric = &metric[..m as usize];
    let llr = (0..bits)
        .map(|i| {
            let coset = |b: u32| metric.iter().enumerate().filter(move |(l, _)| (*l as u32 >> i) & 1 == b);
            let lse = |b: u32| {
                let top = coset(b).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
                top + coset(b).map(|(_, v)| (v - top).exp()).sum::<f64>().ln()
            };
            lse(0) - lse(1)
        })
        .collect();
    LlrVector(llr).clamp(opts.llr_cap)
}

fn maxlog_with<A: Arith>(
    obs: &Observation,
    spec: &ConstellationSpec,
    opts: &DemapOptions,
    ops: &mut A,
) -> LlrVector {
    let bits = spec.bits_per_symbol() as usize;
    let inv_sigma2 = obs.sigma2.recip();
    let mut min0 = [f64::INFINITY; MAX_BITS];
    let mut min1 = [f64::INFINITY; MAX_BITS];
    for label in 0..spec.order() {
        ops.candidate();
        let z = spec.map_label(label);
        let hz_i = ops.mul(obs.h_i, z.z_i);
        let e_i = ops.sub(obs.y_i, hz_i);
        let hz_q = ops.mul(obs.h_q, z.z_q);
        let e_q = ops.sub(obs.y_q, hz_q);
        let sq_i = ops.mul(e_i, e_i);
        let sq_q = ops.mul(e_q, e_q);
        let d = ops.add(sq_i, sq_q);
        for i in 0..bits {
            let slot = if (label >> i) & 1 == 0 {
                &mut min0[i]
            } else {
                &mut min1[i]
            };
            if ops.lt(d, *slot) {
                *slot = d;
            }
        }
    }
    let llr = (0..bits)
        .map(|i| {
            let diff = ops.sub(min1[i], min0[i]);
            ops.mul(diff, inv_sigma2)
        })
        .collect();
    LlrVector(llr).clamp(opts.llr_cap)
}
