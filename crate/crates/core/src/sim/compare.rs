use std::fmt::Write as _;

use rayon::prelude::*;

use super::link::{pool, Link};
use super::stats::{fmt_g, quantile};
use super::SimConfig;
use crate::demap::DemapperKind;
use crate::error::Result;

/// Agreement between two demappers at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrStats {
    pub esn0_db: f64,
    pub bits: u64,
    /// Fraction of bits whose hard decisions agree.
    pub sign_agreement: f64,
    /// Fraction of bits whose LLRs are equal as floating-point values.
    pub exact_match: f64,
    /// Fraction of symbols whose LLR vectors are equal.
    pub symbol_match: f64,
    pub mean_abs_delta: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    pub max_abs_delta: f64,
}

#[derive(Debug, Clone)]
pub struct LlrReport {
    pub config: SimConfig,
    pub demapper: DemapperKind,
    pub reference: DemapperKind,
    pub points: Vec<LlrStats>,
    /// Per-bit rows `(esn0_db, frame, symbol, bit, llr, ref_llr)`, kept only
    /// when a dump was requested.
    pub dump: Vec<(f64, u64, usize, usize, f64, f64)>,
}

impl LlrReport {
    pub fn to_csv(&self) -> String {
        let mut s = self.config.preamble("llr-compare");
        s.push_str(
            "esn0_db,demapper,reference,bits,sign_agreement,exact_match,symbol_match,mean_abs_delta,q50,q90,q99,max_abs_delta\n",
        );
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_g(p.esn0_db),
                self.demapper,
                self.reference,
                p.bits,
                fmt_g(p.sign_agreement),
                fmt_g(p.exact_match),
                fmt_g(p.symbol_match),
                fmt_g(p.mean_abs_delta),
                fmt_g(p.q50),
                fmt_g(p.q90),
                fmt_g(p.q99),
                fmt_g(p.max_abs_delta)
            );
        }
        s
    }

    pub fn dump_csv(&self) -> String {
        let mut s = self.config.preamble("llr-compare");
        s.push_str("esn0_db,frame,symbol,demapper,bit,llr,ref_llr,agree\n");
        for &(e, f, sym, bit, a, b) in &self.dump {
            let agree = u8::from((a < 0.0) == (b < 0.0));
            let _ = writeln!(
                s,
                "{},{f},{sym},{},{bit},{},{},{agree}",
                fmt_g(e),
                self.demapper,
                fmt_g(a),
                fmt_g(b)
            );
        }
        s
    }
}

/// Runs `cfg.demapper` and `cfg.reference` on the same uncoded
/// observations and summarises their LLR differences.
pub fn run_llr_compare(cfg: &SimConfig) -> Result<LlrReport> {
    let link = Link::new(cfg)?;
    let dut = Link::demapper(cfg.demapper, cfg);
    let reference = Link::demapper(cfg.reference, cfg);
    let pool = pool(cfg.workers)?;
    let keep = cfg.llr_dump.is_some();

    let mut points = Vec::new();
    let mut dump = Vec::new();
    for (g, &esn0) in cfg.esn0.iter().enumerate() {
        type FrameOut = (Vec<(f64, f64)>, u64);
        let frames: Vec<FrameOut> = pool.install(|| {
            (0..cfg.frames)
                .into_par_iter()
                .map(|f| -> Result<FrameOut> {
                    let (_, obs) = link.uncoded_frame(esn0, g, f)?;
                    let mut pairs = Vec::with_capacity(obs.len() * 8);
                    let mut same_symbols = 0;
                    for o in &obs {
                        let a = dut.demap(o, &link.spec)?;
                        let b = reference.demap(o, &link.spec)?;
                        same_symbols += u64::from(*a == *b);
                        pairs.extend(a.iter().copied().zip(b.iter().copied()));
                    }
                    Ok((pairs, same_symbols))
                })
                .collect::<Result<_>>()
        })?;

        let bps = link.spec.bits_per_symbol() as usize;
        let mut deltas = Vec::new();
        let (mut agree, mut exact, mut same_symbols) = (0u64, 0u64, 0u64);
        for (f, (pairs, same)) in frames.iter().enumerate() {
            same_symbols += same;
            for (k, &(a, b)) in pairs.iter().enumerate() {
                agree += u64::from((a < 0.0) == (b < 0.0));
                exact += u64::from(a == b);
                deltas.push((a - b).abs());
                if keep {
                    dump.push((esn0, f as u64, k / bps, k % bps, a, b));
                }
            }
        }
        let n = deltas.len() as u64;
        let mean = deltas.iter().sum::<f64>() / n as f64;
        deltas.sort_by(f64::total_cmp);
        points.push(LlrStats {
            esn0_db: esn0,
            bits: n,
            sign_agreement: agree as f64 / n as f64,
            exact_match: exact as f64 / n as f64,
            symbol_match: same_symbols as f64 / (n / bps as u64) as f64,
            mean_abs_delta: mean,
            q50: quantile(&deltas, 0.5),
            q90: quantile(&deltas, 0.9),
            q99: quantile(&deltas, 0.99),
            max_abs_delta: deltas.last().copied().unwrap_or(0.0),
        });
    }
    Ok(LlrReport {
        config: cfg.clone(),
        demapper: cfg.demapper,
        reference: cfg.reference,
        points,
        dump,
    })
}
