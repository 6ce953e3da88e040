//! Square QAM alphabets, their rotated versions and the integer lattice
//! that appears when the rotation angle is `arctan(1/sqrt(M))`.
//!
//! A point is addressed by its per-axis level indices `(p_I, p_Q)`, each in
//! `0..sqrt(M)`. The unrotated amplitude of level `p` is
//! `beta_s * (2p - sqrt(M) + 1)`, and the transmitted point is the
//! unrotated one multiplied by `exp(j theta)`.
//!
//! For `theta = arctan(1/sqrt(M))` the I and Q projections of the rotated
//! alphabet land on `M` equally spaced values each. Indexing those values
//! from the most negative gives the integer coordinates
//! `T_I = sqrt(M) p_I + (sqrt(M) - 1 - p_Q)` and `T_Q = sqrt(M) p_Q + p_I`,
//! i.e. two-digit numbers in base `sqrt(M)`; either one alone identifies the
//! point.

use std::f64::consts::FRAC_PI_4;

use crate::channel::CellPair;
use crate::error::{Error, Result};

/// Modulation orders handled throughout the crate.
pub const SUPPORTED_ORDERS: [u32; 4] = [4, 16, 64, 256];

/// Angles closer than this to `arctan(1/sqrt(M))` are treated as the
/// lattice angle.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

fn check_order(m: u32) -> Result<()> {
    if SUPPORTED_ORDERS.contains(&m) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "modulation order {m} is not one of {SUPPORTED_ORDERS:?}"
        )))
    }
}

fn side_of(m: u32) -> u32 {
    // Exact for the supported (even power of two) orders.
    1 << (m.trailing_zeros() / 2)
}

/// Rotation angle `arctan(1/sqrt(M))` giving the uniform projection lattice.
pub fn angle_for(m: u32) -> Result<f64> {
    check_order(m)?;
    Ok((1.0 / f64::from(side_of(m))).atan())
}

/// Rotation angle standardised for DVB-T2 rotated constellations.
///
/// 256-QAM already uses `arctan(1/16)`, so it coincides with [`angle_for`].
pub fn dvbt2_angle(m: u32) -> Result<f64> {
    check_order(m)?;
    let degrees = match m {
        4 => 29.0,
        16 => 16.8,
        64 => 8.6,
        _ => return angle_for(m),
    };
    Ok(f64::to_radians(degrees))
}

/// Level indices of one constellation point, `0..sqrt(M)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolIndex {
    pub p_i: u32,
    pub p_q: u32,
}

impl SymbolIndex {
    pub fn new(p_i: u32, p_q: u32) -> Self {
        SymbolIndex { p_i, p_q }
    }
}

/// Amplitudes of a rotated point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotatedPoint {
    pub z_i: f64,
    pub z_q: f64,
}

impl std::ops::Neg for RotatedPoint {
    type Output = RotatedPoint;

    fn neg(self) -> RotatedPoint {
        RotatedPoint {
            z_i: -self.z_i,
            z_q: -self.z_q,
        }
    }
}

/// Integer projection coordinates of a point at the lattice angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeCoord {
    pub t_i: u32,
    pub t_q: u32,
    /// Spacing between consecutive projections, `2 beta_s sin(theta)`.
    pub d1d_min: f64,
}

/// Per-axis binary-reflected Gray labeling.
///
/// Bit `b_i` of a symbol label is stored at bit position `i` of a `u32`.
/// Even positions carry the Gray code of `p_I`, odd positions the Gray code
/// of `p_Q`, both most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitLabeling {
    axis_bits: u32,
    // indexed by p_I * side + p_Q
    label_of: Vec<u32>,
    // indexed by label
    index_of: Vec<SymbolIndex>,
}

fn gray(p: u32) -> u32 {
    p ^ (p >> 1)
}

impl BitLabeling {
    pub fn gray(m: u32) -> Result<Self> {
        check_order(m)?;
        let side = side_of(m);
        let axis_bits = side.trailing_zeros();
        let mut label_of = vec![0; m as usize];
        let mut index_of = vec![SymbolIndex::new(0, 0); m as usize];
        for p_i in 0..side {
            for p_q in 0..side {
                let (gi, gq) = (gray(p_i), gray(p_q));
                let mut label = 0u32;
                for j in 0..axis_bits {
                    let shift = axis_bits - 1 - j;
                    label |= ((gi >> shift) & 1) << (2 * j);
                    label |= ((gq >> shift) & 1) << (2 * j + 1);
                }
                label_of[(p_i * side + p_q) as usize] = label;
                index_of[label as usize] = SymbolIndex::new(p_i, p_q);
            }
        }
        Ok(BitLabeling {
            axis_bits,
            label_of,
            index_of,
        })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        2 * self.axis_bits
    }

    /// Whether bit `b_i` is carried by the I axis level.
    pub fn is_i_bit(&self, i: u32) -> bool {
        i.is_multiple_of(2)
    }

    pub fn label(&self, index: SymbolIndex) -> u32 {
        let side = 1 << self.axis_bits;
        self.label_of[(index.p_i * side + index.p_q) as usize]
    }

    pub fn index(&self, label: u32) -> SymbolIndex {
        self.index_of[label as usize]
    }
}

/// Static geometry of one (possibly rotated) square QAM constellation.
#[derive(Debug, Clone)]
pub struct ConstellationSpec {
    m: u32,
    side: u32,
    beta_s: f64,
    theta: f64,
    labeling: BitLabeling,
    // rotated points indexed by p_I * side + p_Q
    points: Vec<RotatedPoint>,
    lattice: bool,
}

impl ConstellationSpec {
    /// Builds the constellation for order `m` rotated by `theta`.
    ///
    /// `theta = 0` yields conventional (non-rotated) QAM; otherwise `theta`
    /// must lie in `(0, pi/4]`.
    pub fn new(m: u32, theta: f64) -> Result<Self> {
        check_order(m)?;
        if !(0.0..=FRAC_PI_4).contains(&theta) {
            return Err(Error::invalid(format!(
                "rotation angle {theta} rad outside [0, pi/4]"
            )));
        }
        let side = side_of(m);
        let levels: Vec<f64> = (0..side)
            .map(|p| 2.0 * f64::from(p) - f64::from(side) + 1.0)
            .collect();
        // Mean energy over all points is twice the mean squared level.
        let mean_level_energy = levels.iter().map(|a| a * a).sum::<f64>() / f64::from(side);
        let beta_s = (2.0 * mean_level_energy).sqrt().recip();
        let (sin, cos) = theta.sin_cos();
        let mut points = Vec::with_capacity(m as usize);
        for p_i in 0..side as usize {
            for p_q in 0..side as usize {
                let (s_i, s_q) = (beta_s * levels[p_i], beta_s * levels[p_q]);
                points.push(RotatedPoint {
                    z_i: s_i * cos - s_q * sin,
                    z_q: s_i * sin + s_q * cos,
                });
            }
        }
        let lattice = (theta - (1.0 / f64::from(side)).atan()).abs() <= ANGLE_TOLERANCE;
        Ok(ConstellationSpec {
            m,
            side,
            beta_s,
            theta,
            labeling: BitLabeling::gray(m)?,
            points,
            lattice,
        })
    }

    /// Constellation rotated by [`angle_for`].
    pub fn proposed(m: u32) -> Result<Self> {
        Self::new(m, angle_for(m)?)
    }

    /// Constellation rotated by [`dvbt2_angle`].
    pub fn dvbt2(m: u32) -> Result<Self> {
        Self::new(m, dvbt2_angle(m)?)
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    /// `sqrt(M)`, the number of levels per axis.
    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.labeling.bits_per_symbol()
    }

    pub fn beta_s(&self) -> f64 {
        self.beta_s
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn labeling(&self) -> &BitLabeling {
        &self.labeling
    }

    /// True when the angle is `arctan(1/sqrt(M))` and the lattice
    /// operations are available.
    pub fn has_lattice(&self) -> bool {
        self.lattice
    }

    /// Projection spacing `2 beta_s sin(theta)`.
    pub fn d1d_min(&self) -> f64 {
        2.0 * self.beta_s * self.theta.sin()
    }

    fn flat(&self, index: SymbolIndex) -> usize {
        (index.p_i * self.side + index.p_q) as usize
    }

    fn check_index(&self, index: SymbolIndex) -> Result<()> {
        if index.p_i >= self.side || index.p_q >= self.side {
            return Err(Error::invalid(format!(
                "level index ({}, {}) out of range for M={}",
                index.p_i, index.p_q, self.m
            )));
        }
        Ok(())
    }

    fn require_lattice(&self) -> Result<()> {
        if self.lattice {
            Ok(())
        } else {
            Err(Error::UnsupportedAngle {
                m: self.m,
                theta: self.theta,
            })
        }
    }

    /// Unrotated amplitudes `(s_I, s_Q)`.
    pub fn unrotated(&self, index: SymbolIndex) -> (f64, f64) {
        let level = |p: u32| self.beta_s * (2.0 * f64::from(p) - f64::from(self.side) + 1.0);
        (level(index.p_i), level(index.p_q))
    }

    pub fn point(&self, index: SymbolIndex) -> RotatedPoint {
        self.points[self.flat(index)]
    }

    /// All rotated points with their labels, in `(p_I, p_Q)` row-major order.
    pub fn points(&self) -> impl Iterator<Item = (SymbolIndex, u32, RotatedPoint)> + '_ {
        (0..self.side).flat_map(move |p_i| {
            (0..self.side).map(move |p_q| {
                let index = SymbolIndex::new(p_i, p_q);
                (index, self.labeling.label(index), self.point(index))
            })
        })
    }

    /// Maps `log2(M)` bits (`bits[i]` is `b_i`, 0 or 1) to a rotated point.
    pub fn map_bits(&self, bits: &[u8]) -> Result<RotatedPoint> {
        if bits.len() != self.bits_per_symbol() as usize {
            return Err(Error::invalid(format!(
                "expected {} bits per symbol, got {}",
                self.bits_per_symbol(),
                bits.len()
            )));
        }
        let mut label = 0u32;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::invalid(format!("bit {i} has value {b}")));
            }
            label |= u32::from(b) << i;
        }
        Ok(self.map_label(label))
    }

    /// Maps a packed label (bit `i` = `b_i`) to its rotated point.
    pub fn map_label(&self, label: u32) -> RotatedPoint {
        self.point(self.labeling.index(label))
    }

    /// Integer projection coordinates of a point.
    pub fn lattice_coords(&self, index: SymbolIndex) -> Result<LatticeCoord> {
        self.require_lattice()?;
        self.check_index(index)?;
        Ok(LatticeCoord {
            t_i: self.t_i_of(index),
            t_q: self.t_q_of(index),
            d1d_min: self.d1d_min(),
        })
    }

    /// Rotated amplitudes rebuilt from the lattice coordinates, i.e.
    /// `(T - (M-1)/2) * d1d_min` on each axis.
    pub fn lattice_point(&self, index: SymbolIndex) -> Result<RotatedPoint> {
        let c = self.lattice_coords(index)?;
        let offset = f64::from(self.m - 1) / 2.0;
        Ok(RotatedPoint {
            z_i: (f64::from(c.t_i) - offset) * c.d1d_min,
            z_q: (f64::from(c.t_q) - offset) * c.d1d_min,
        })
    }

    /// Recovers the point whose I projection has index `t_i`.
    pub fn coords_from_t_i(&self, t_i: u32) -> Result<SymbolIndex> {
        self.require_lattice()?;
        self.check_t(t_i)?;
        Ok(self.split_t_i(t_i))
    }

    /// Recovers the point whose Q projection has index `t_q`.
    pub fn coords_from_t_q(&self, t_q: u32) -> Result<SymbolIndex> {
        self.require_lattice()?;
        self.check_t(t_q)?;
        Ok(self.split_t_q(t_q))
    }

    fn check_t(&self, t: u32) -> Result<()> {
        if t >= self.m {
            return Err(Error::invalid(format!(
                "lattice coordinate {t} outside [0, {}]",
                self.m - 1
            )));
        }
        Ok(())
    }

    fn shift(&self) -> u32 {
        self.side.trailing_zeros()
    }

    pub(crate) fn t_i_of(&self, index: SymbolIndex) -> u32 {
        (index.p_i << self.shift()) | (self.side - 1 - index.p_q)
    }

    pub(crate) fn t_q_of(&self, index: SymbolIndex) -> u32 {
        (index.p_q << self.shift()) | index.p_i
    }

    pub(crate) fn split_t_i(&self, t_i: u32) -> SymbolIndex {
        let mask = self.side - 1;
        SymbolIndex::new(t_i >> self.shift(), mask - (t_i & mask))
    }

    pub(crate) fn split_t_q(&self, t_q: u32) -> SymbolIndex {
        SymbolIndex::new(t_q & (self.side - 1), t_q >> self.shift())
    }
}

/// Cyclic Q delay over one block: cell `k` carries `Re z_k` and
/// `Im z_{k-1}`, with cell 0 taking the Q component of the last symbol.
pub fn q_delay(block: &[RotatedPoint]) -> Result<Vec<CellPair>> {
    if block.is_empty() {
        return Err(Error::invalid("cannot Q-delay an empty block"));
    }
    let n = block.len();
    Ok((0..n)
        .map(|k| CellPair {
            x_i: block[k].z_i,
            x_q: block[(k + n - 1) % n].z_q,
        })
        .collect())
}

/// Inverse of [`q_delay`].
pub fn q_undelay(cells: &[CellPair]) -> Result<Vec<RotatedPoint>> {
    if cells.is_empty() {
        return Err(Error::invalid("cannot undo the Q delay of an empty block"));
    }
    let n = cells.len();
    Ok((0..n)
        .map(|k| RotatedPoint {
            z_i: cells[k].x_i,
            z_q: cells[(k + 1) % n].x_q,
        })
        .collect())
}
