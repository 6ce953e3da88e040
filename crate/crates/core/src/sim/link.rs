//! One frame through mapper, Q delay, channel and demapper.

use std::fs;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{frame_rng, sample_channel, transmit, ChannelConfig, Observation};
use crate::constellation::{q_delay, ConstellationSpec};
use crate::demap::{DemapOptions, Demapper, DemapperKind, LlrVector};
use crate::error::{Error, Result};
use crate::fec::{DecoderConfig, Encoder, MinSumDecoder, ParityCheckMatrix};

use super::SimConfig;

/// Frames in flight between two stop-condition checks.
pub(crate) const BATCH: u64 = 32;

/// Substream of frame `frame` at grid point `grid`.
pub(crate) fn stream_id(grid: usize, frame: u64) -> u64 {
    ((grid as u64) << 40) | frame
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

pub(crate) struct Code {
    pub h: ParityCheckMatrix,
    /// `None` when the matrix is not staircase-encodable; frames then carry
    /// the all-zero codeword.
    pub encoder: Option<Encoder>,
    pub decoder: DecoderConfig,
}

impl Code {
    pub fn load(cfg: &SimConfig) -> Result<Option<Self>> {
        let Some(path) = &cfg.ldpc else { return Ok(None) };
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let h = ParityCheckMatrix::parse_alist(&text)?;
        let encoder = Encoder::new(&h).ok();
        Ok(Some(Code {
            h,
            encoder,
            decoder: DecoderConfig {
                max_iters: cfg.max_iters,
                ..DecoderConfig::default()
            },
        }))
    }
}

pub(crate) struct Link {
    pub spec: ConstellationSpec,
    pub seed: u64,
    pub erasure: f64,
    pub fading: crate::channel::Fading,
    pub frame_symbols: usize,
}

/// Outcome of one frame.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct FrameTally {
    pub bit_errors: u64,
    pub bits: u64,
}

impl Link {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Link {
            spec: cfg.spec()?,
            seed: cfg.seed,
            erasure: cfg.erasure,
            fading: cfg.fading,
            frame_symbols: cfg.frame_symbols,
        })
    }

    pub fn demapper(kind: DemapperKind, cfg: &SimConfig) -> Demapper {
        Demapper {
            kind,
            options: DemapOptions {
                llr_cap: cfg.llr_cap,
                ..DemapOptions::default()
            },
        }
    }

    fn channel(&self, esn0_db: f64) -> ChannelConfig {
        ChannelConfig {
            esn0_db,
            erasure_prob: self.erasure,
            fading: self.fading,
            seed: self.seed,
        }
    }

    /// Sends `labels` through the channel, drawing fades then noise from
    /// `rng`.
    pub fn observe(&self, labels: &[u32], esn0_db: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Observation>> {
        let points: Vec<_> = labels.iter().map(|&l| self.spec.map_label(l)).collect();
        let cells = q_delay(&points)?;
        let ch = self.channel(esn0_db);
        let fades = sample_channel(&ch, cells.len(), rng);
        transmit(&cells, &fades, ch.sigma2(), rng)
    }

    /// Random labels and their observations for one uncoded frame.
    pub fn uncoded_frame(&self, esn0_db: f64, grid: usize, frame: u64) -> Result<(Vec<u32>, Vec<Observation>)> {
        let mut rng = frame_rng(self.seed, stream_id(grid, frame));
        let m = self.spec.order();
        let labels: Vec<u32> = (0..self.frame_symbols).map(|_| rng.random_range(0..m)).collect();
        let obs = self.observe(&labels, esn0_db, &mut rng)?;
        Ok((labels, obs))
    }

    pub fn run_uncoded(&self, demapper: &Demapper, esn0_db: f64, grid: usize, frame: u64) -> Result<FrameTally> {
        let (labels, obs) = self.uncoded_frame(esn0_db, grid, frame)?;
        let mut errors = 0;
        for (label, o) in labels.iter().zip(&obs) {
            let llr = demapper.demap(o, &self.spec)?;
            errors += u64::from((llr.hard_label() ^ label).count_ones());
        }
        Ok(FrameTally {
            bit_errors: errors,
            bits: labels.len() as u64 * u64::from(self.spec.bits_per_symbol()),
        })
    }

    pub fn run_coded(
        &self,
        code: &Code,
        demapper: &Demapper,
        esn0_db: f64,
        grid: usize,
        frame: u64,
    ) -> Result<FrameTally> {
        let mut rng = frame_rng(self.seed, stream_id(grid, frame));
        let n = code.h.n();
        let bps = self.spec.bits_per_symbol() as usize;
        let symbols = n.div_ceil(bps);

        let (info, codeword) = match &code.encoder {
            Some(enc) => {
                let info: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2u8)).collect();
                let cw = enc.encode(&info)?;
                (Some(info), cw)
            }
            None => (None, vec![0u8; n]),
        };
        let mut bits = codeword.clone();
        bits.extend((n..symbols * bps).map(|_| rng.random_range(0..2u8)));

        let labels: Vec<u32> = bits
            .chunks(bps)
            .map(|c| c.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << i)))
            .collect();
        let obs = self.observe(&labels, esn0_db, &mut rng)?;
        let mut llr = Vec::with_capacity(symbols * bps);
        for o in &obs {
            let v: LlrVector = demapper.demap(o, &self.spec)?;
            llr.extend_from_slice(&v);
        }
        llr.truncate(n);
        let decoded = MinSumDecoder::new(&code.h).decode(&llr, &code.decoder)?;

        let (reference, got): (&[u8], &[u8]) = match &info {
            Some(info) => (info, &decoded.bits[..info.len()]),
            None => (&codeword, &decoded.bits),
        };
        let bit_errors = reference.iter().zip(got).filter(|(a, b)| a != b).count() as u64;
        Ok(FrameTally {
            bit_errors,
            bits: reference.len() as u64,
        })
    }
}
