use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssd_lab::sim::{self, SimConfig};
use ssd_lab::Error;

#[derive(Parser)]
#[command(name = "ssd-lab", version, about = "Rotated QAM demapping experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo BER over an Es/N0 grid.
    Ber(Common),
    /// Compare the LLRs of two demappers on the same observations.
    LlrCompare(Common),
    /// Per-symbol operation counts of each demapper.
    CountOps(Common),
    /// Constellation table with rotated and lattice coordinates.
    DumpConstellation(Common),
}

/// Every flag overrides the config-file key of the same name.
#[derive(Args)]
struct Common {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<String>,
    /// proposed, dvbt2, none or an angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<String>,
    /// exact, maxlog, sphere or mmse.
    #[arg(long)]
    demapper: Option<String>,
    /// Second demapper for llr-compare.
    #[arg(long)]
    reference: Option<String>,
    /// `a:b:step` or a comma-separated list, in dB.
    #[arg(long, allow_hyphen_values = true)]
    esn0: Option<String>,
    #[arg(long)]
    erasure: Option<String>,
    /// rayleigh or none.
    #[arg(long)]
    fading: Option<String>,
    /// Parity-check matrix (alist) for coded runs.
    #[arg(long)]
    ldpc: Option<String>,
    #[arg(long)]
    frames: Option<String>,
    #[arg(long = "frame_symbols", visible_alias = "frame-symbols")]
    frame_symbols: Option<String>,
    #[arg(long = "stop_at_errors", visible_alias = "stop-at-errors")]
    stop_at_errors: Option<String>,
    #[arg(long = "max_iters", visible_alias = "max-iters")]
    max_iters: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<String>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// Per-bit LLR dump for llr-compare.
    #[arg(long = "llr_dump", visible_alias = "llr-dump")]
    llr_dump: Option<String>,
    #[arg(long = "llr_cap", visible_alias = "llr-cap")]
    llr_cap: Option<String>,
}

impl Common {
    fn overrides(&self) -> [(&'static str, &Option<String>); 17] {
        [
            ("m", &self.m),
            ("angle", &self.angle),
            ("demapper", &self.demapper),
            ("reference", &self.reference),
            ("esn0", &self.esn0),
            ("erasure", &self.erasure),
            ("fading", &self.fading),
            ("ldpc", &self.ldpc),
            ("frames", &self.frames),
            ("frame_symbols", &self.frame_symbols),
            ("stop_at_errors", &self.stop_at_errors),
            ("max_iters", &self.max_iters),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("out", &self.out),
            ("llr_dump", &self.llr_dump),
            ("llr_cap", &self.llr_cap),
        ]
    }

    fn config(&self) -> Result<SimConfig, Error> {
        let mut cfg = SimConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_text(&read(path)?)?;
        }
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Ber(args) => {
            let cfg = args.config()?;
            let report = sim::run_ber(&cfg)?;
            for p in &report.points {
                eprintln!(
                    "Es/N0 {:>6} dB  BER {:.3e}  frames {} ({} in error, stopped by {})  {:.2?}",
                    sim::stats::fmt_g(p.esn0_db),
                    p.ber(),
                    p.frames,
                    p.frame_errors,
                    p.stop.name(),
                    p.elapsed
                );
            }
            emit(cfg.out.as_deref(), &report.to_csv())
        }
        Command::LlrCompare(args) => {
            let cfg = args.config()?;
            let report = sim::run_llr_compare(&cfg)?;
            if let Some(path) = &cfg.llr_dump {
                emit(Some(path), &report.dump_csv())?;
            }
            emit(cfg.out.as_deref(), &report.to_csv())
        }
        Command::CountOps(args) => {
            let cfg = args.config()?;
            emit(cfg.out.as_deref(), &sim::run_count_ops(&cfg)?.to_csv())
        }
        Command::DumpConstellation(args) => {
            let cfg = args.config()?;
            emit(cfg.out.as_deref(), &sim::dump_constellation(&cfg)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ssd-lab: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
