//! Per-cell Rayleigh fading with erasures and complex AWGN.
//!
//! Every cell fades independently (ideal interleaving). Because of the
//! cyclic Q delay, the I and Q components of one rotated symbol ride two
//! different cells; [`transmit`] undoes that association so each
//! [`Observation`] describes one rotated symbol with its two gains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// One transmitted channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellPair {
    pub x_i: f64,
    /// Q component of a different (previously delayed) rotated symbol.
    pub x_q: f64,
}

/// Received components of one rotated symbol together with perfect CSI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub y_i: f64,
    pub y_q: f64,
    pub h_i: f64,
    pub h_q: f64,
    /// Total complex noise variance; each component carries half of it.
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fading {
    #[default]
    Rayleigh,
    /// Unit gain on every cell (erasures still apply).
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub esn0_db: f64,
    pub erasure_prob: f64,
    pub fading: Fading,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.esn0_db.is_finite() {
            return Err(Error::invalid("Es/N0 must be finite"));
        }
        if !(0.0..1.0).contains(&self.erasure_prob) {
            return Err(Error::invalid(format!(
                "erasure probability {} outside [0, 1)",
                self.erasure_prob
            )));
        }
        Ok(())
    }

    pub fn sigma2(&self) -> f64 {
        sigma_from_esn0(self.esn0_db)
    }
}

/// Fading state of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellFade {
    pub h: f64,
    pub erased: bool,
}

/// Complex noise variance for unit symbol energy.
pub fn sigma_from_esn0(esn0_db: f64) -> f64 {
    10f64.powf(-esn0_db / 10.0)
}

/// Independent generator for substream `stream` of a master seed.
///
/// Frames draw from their own stream so results do not depend on how the
/// frames are scheduled.
pub fn frame_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `n_cells` i.i.d. fading gains (`E[h^2] = 1`), zeroing each one
/// independently with probability `erasure_prob`.
pub fn sample_channel<R: Rng + ?Sized>(
    config: &ChannelConfig,
    n_cells: usize,
    rng: &mut R,
) -> Vec<CellFade> {
    (0..n_cells)
        .map(|_| {
            let h = match config.fading {
                Fading::Rayleigh => {
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    ((a * a + b * b) / 2.0).sqrt()
                }
                Fading::None => 1.0,
            };
            let erased = config.erasure_prob > 0.0 && rng.random::<f64>() < config.erasure_prob;
            CellFade {
                h: if erased { 0.0 } else { h },
                erased,
            }
        })
        .collect()
}

/// Passes Q-delayed cells through the channel and re-associates the
/// components of each rotated symbol.
///
/// Observation `k` pairs the I component of cell `k` with the Q component
/// of cell `k+1` (cyclically), which is where the Q part of symbol `k` was
/// sent.
pub fn transmit<R: Rng + ?Sized>(
    cells: &[CellPair],
    fades: &[CellFade],
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<Observation>> {
    if cells.len() != fades.len() {
        return Err(Error::invalid(format!(
            "{} cells but {} fading gains",
            cells.len(),
            fades.len()
        )));
    }
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    let std = (sigma2 / 2.0).sqrt();
    let received: Vec<(f64, f64)> = cells
        .iter()
        .zip(fades)
        .map(|(c, f)| {
            let n_i: f64 = rng.sample(StandardNormal);
            let n_q: f64 = rng.sample(StandardNormal);
            (f.h * c.x_i + std * n_i, f.h * c.x_q + std * n_q)
        })
        .collect();
    let n = cells.len();
    Ok((0..n)
        .map(|k| {
            let next = (k + 1) % n;
            Observation {
                y_i: received[k].0,
                y_q: received[next].1,
                h_i: fades[k].h,
                h_q: fades[next].h,
                sigma2,
            }
        })
        .collect())
}
