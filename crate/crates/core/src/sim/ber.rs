use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::link::{pool, Code, FrameTally, Link, BATCH};
use super::stats::{fmt_g, wilson};
use super::SimConfig;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The frame budget ran out.
    Frames,
    /// Enough erroneous frames were seen.
    Errors,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Frames => "frames",
            StopReason::Errors => "errors",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub esn0_db: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub frames: u64,
    pub frame_errors: u64,
    /// Sum over frames of the squared per-frame bit-error count.
    pub frame_error_sq: u64,
    pub stop: StopReason,
    /// Wall time; reported but never written to CSV.
    pub elapsed: Duration,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    /// 95% Wilson interval of the BER, treating bits as independent.
    pub fn ci(&self) -> (f64, f64) {
        wilson(self.bit_errors, self.bits)
    }

    /// 95% interval from the spread of per-frame error counts.
    ///
    /// Decoded errors arrive in bursts, so this is the honest interval for
    /// coded runs. It assumes equal-length frames and falls back to
    /// [`BerPoint::ci`] when every frame was error-free.
    pub fn frame_ci(&self) -> (f64, f64) {
        if self.frames < 2 || self.bit_errors == 0 {
            return self.ci();
        }
        let n = self.frames as f64;
        let per_frame = self.bits as f64 / n;
        let mean = self.bit_errors as f64 / n;
        let var = (self.frame_error_sq as f64 / n - mean * mean) * n / (n - 1.0);
        let half = 1.959963984540054 * (var.max(0.0) / n).sqrt() / per_frame;
        let ber = self.ber();
        ((ber - half).max(0.0), (ber + half).min(1.0))
    }
}

#[derive(Debug, Clone)]
pub struct SimReport {
    pub config: SimConfig,
    pub points: Vec<BerPoint>,
}

impl SimReport {
    /// `(esn0_db, ber)` pairs.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.esn0_db, p.ber())).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.config.preamble("ber");
        s.push_str("esn0_db,bit_errors,bits,ber,ci_low,ci_high,frames,frame_errors,stop\n");
        for p in &self.points {
            let (lo, hi) = p.ci();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                fmt_g(p.esn0_db),
                p.bit_errors,
                p.bits,
                fmt_g(p.ber()),
                fmt_g(lo),
                fmt_g(hi),
                p.frames,
                p.frame_errors,
                p.stop.name()
            );
        }
        s
    }
}

/// Monte-Carlo BER over the configured Es/N0 grid.
///
/// Frame `f` of grid point `g` always draws from the same substream, and
/// frames are accumulated in index order, so the report does not depend on
/// the number of workers.
pub fn run_ber(cfg: &SimConfig) -> Result<SimReport> {
    let link = Link::new(cfg)?;
    let code = Code::load(cfg)?;
    let demapper = Link::demapper(cfg.demapper, cfg);
    let pool = pool(cfg.workers)?;

    let mut points = Vec::with_capacity(cfg.esn0.len());
    for (g, &esn0) in cfg.esn0.iter().enumerate() {
        let start = Instant::now();
        let mut p = BerPoint {
            esn0_db: esn0,
            bit_errors: 0,
            bits: 0,
            frames: 0,
            frame_errors: 0,
            frame_error_sq: 0,
            stop: StopReason::Frames,
            elapsed: Duration::ZERO,
        };
        let mut next = 0;
        'grid: while next < cfg.frames {
            let end = (next + BATCH).min(cfg.frames);
            let tallies: Vec<FrameTally> = pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|f| match &code {
                        Some(code) => link.run_coded(code, &demapper, esn0, g, f),
                        None => link.run_uncoded(&demapper, esn0, g, f),
                    })
                    .collect::<Result<_>>()
            })?;
            for t in tallies {
                p.frames += 1;
                p.bits += t.bits;
                p.bit_errors += t.bit_errors;
                p.frame_errors += u64::from(t.bit_errors > 0);
                p.frame_error_sq += t.bit_errors * t.bit_errors;
                if cfg.stop_at_errors > 0 && p.frame_errors >= cfg.stop_at_errors {
                    p.stop = StopReason::Errors;
                    break 'grid;
                }
            }
            next = end;
        }
        p.elapsed = start.elapsed();
        points.push(p);
    }
    Ok(SimReport {
        config: cfg.clone(),
        points,
    })
}
