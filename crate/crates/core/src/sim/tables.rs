use std::fmt::Write as _;

use super::link::Link;
use super::stats::fmt_g;
use super::SimConfig;
use crate::complexity::{analytic_cost, reduction_report, Algorithm, OpCounters};
use crate::demap::DemapperKind;
use crate::error::Result;

/// Where a cost row comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostSource {
    Analytic,
    /// Mean of the counters over the simulated symbols.
    Measured,
    /// Published 256-QAM figure.
    Published,
}

impl CostSource {
    pub fn name(self) -> &'static str {
        match self {
            CostSource::Analytic => "analytic",
            CostSource::Measured => "measured",
            CostSource::Published => "published",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub algorithm: Algorithm,
    pub source: CostSource,
    /// `cp, rm, rs, rc, ri`; measured rows may be fractional.
    pub values: [f64; 5],
}

#[derive(Debug, Clone)]
pub struct OpsReport {
    pub config: SimConfig,
    pub rows: Vec<CostRow>,
    pub symbols: u64,
}

impl OpsReport {
    pub fn row(&self, algorithm: Algorithm, source: CostSource) -> Option<&CostRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.source == source)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.config.preamble("count-ops");
        let _ = writeln!(s, "# measured over {} symbols", self.symbols);
        let m = self.config.m;
        if let Ok(sphere) = analytic_cost(m, Algorithm::Sphere) {
            for base in [Algorithm::MaxLogFull, Algorithm::PdDem] {
                let Ok(other) = analytic_cost(m, base) else { continue };
                let parts: Vec<String> = reduction_report(&sphere, &other)
                    .iter()
                    .map(|r| format!("{}={}%", r.field, r.nearest()))
                    .collect();
                let _ = writeln!(s, "# sphere vs {base}: {}", parts.join(" "));
            }
        }
        s.push_str("algorithm,cp,rm,rs,rc,ri,source\n");
        for r in &self.rows {
            let v: Vec<String> = r.values.iter().map(|x| fmt_g(*x)).collect();
            let _ = writeln!(s, "{},{},{}", r.algorithm, v.join(","), r.source.name());
        }
        s
    }
}

fn as_row(algorithm: Algorithm, source: CostSource, c: &OpCounters) -> CostRow {
    let f = c.fields();
    CostRow {
        algorithm,
        source,
        values: f.map(|(_, v)| v as f64),
    }
}

/// Table of per-symbol costs: closed forms, counters measured on simulated
/// observations (first grid point, frame 0), and the published figures.
pub fn run_count_ops(cfg: &SimConfig) -> Result<OpsReport> {
    let mut probe = cfg.clone();
    // counting needs no particular demapper; keep validation from rejecting
    // a non-lattice angle because of the default
    probe.demapper = DemapperKind::MaxLog;
    probe.reference = DemapperKind::MaxLog;
    let link = Link::new(&probe)?;
    let (_, obs) = link.uncoded_frame(cfg.esn0[0], 0, 0)?;
    let symbols = obs.len() as u64;

    let mut rows = Vec::new();
    for alg in Algorithm::ALL {
        if let Ok(c) = analytic_cost(cfg.m, alg) {
            rows.push(as_row(alg, CostSource::Analytic, &c));
        }
        let kind = match alg {
            Algorithm::Sphere if link.spec.has_lattice() => Some(DemapperKind::Sphere),
            Algorithm::MaxLogFull => Some(DemapperKind::MaxLog),
            _ => None,
        };
        if let Some(kind) = kind {
            let dm = Link::demapper(kind, cfg);
            let mut total = OpCounters::default();
            for o in &obs {
                dm.demap_counted(o, &link.spec, &mut total)?;
            }
            let mut row = as_row(alg, CostSource::Measured, &total);
            for v in &mut row.values {
                *v /= symbols as f64;
            }
            rows.push(row);
        }
        if cfg.m == 256 {
            rows.push(as_row(alg, CostSource::Published, &alg.published_256()));
        }
    }
    Ok(OpsReport {
        config: cfg.clone(),
        rows,
        symbols,
    })
}

/// Constellation table: indices, label bits, amplitudes, rotated
/// coordinates and (for the proposed angle) lattice coordinates.
pub fn dump_constellation(cfg: &SimConfig) -> Result<String> {
    let spec = cfg.spec()?;
    let mut s = cfg.preamble("dump-constellation");
    s.push_str("p_i,p_q,bits,s_i,s_q,z_i,z_q,t_i,t_q\n");
    let bps = spec.bits_per_symbol();
    for label in 0..spec.order() {
        let index = spec.labeling().index(label);
        let (s_i, s_q) = spec.unrotated(index);
        let z = spec.point(index);
        let bits: String = (0..bps)
            .map(|i| if (label >> i) & 1 == 1 { '1' } else { '0' })
            .collect();
        let (t_i, t_q) = match spec.lattice_coords(index) {
            Ok(t) => (t.t_i.to_string(), t.t_q.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        let _ = writeln!(
            s,
            "{},{},{bits},{},{},{},{},{t_i},{t_q}",
            index.p_i,
            index.p_q,
            fmt_g(s_i),
            fmt_g(s_q),
            fmt_g(z.z_i),
            fmt_g(z.z_q)
        );
    }
    Ok(s)
}
