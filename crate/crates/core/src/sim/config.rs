//! Flat `key = value` experiment configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::channel::Fading;
use crate::constellation::ConstellationSpec;
use crate::demap::{DemapperKind, DEFAULT_LLR_CAP};
use crate::error::{Error, Result};

use super::stats::fmt_g;

/// Rotation angle selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleMode {
    /// `atan(1/sqrt(M))`.
    Proposed,
    /// The angle tabulated in DVB-T2 for the order.
    Dvbt2,
    /// No rotation.
    None,
    Radians(f64),
}

impl AngleMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(AngleMode::Proposed),
            "dvbt2" => Ok(AngleMode::Dvbt2),
            "none" => Ok(AngleMode::None),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(AngleMode::Radians)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "angle '{other}' is not proposed, dvbt2, none or a number of radians"
                    ))
                }),
        }
    }

    pub fn spec(self, m: u32) -> Result<ConstellationSpec> {
        match self {
            AngleMode::Proposed => ConstellationSpec::proposed(m),
            AngleMode::Dvbt2 => ConstellationSpec::dvbt2(m),
            AngleMode::None => ConstellationSpec::new(m, 0.0),
            AngleMode::Radians(t) => ConstellationSpec::new(m, t),
        }
    }

    fn render(self) -> String {
        match self {
            AngleMode::Proposed => "proposed".into(),
            AngleMode::Dvbt2 => "dvbt2".into(),
            AngleMode::None => "none".into(),
            AngleMode::Radians(t) => format!("{t:?}"),
        }
    }
}

/// Every knob of an experiment. Keys of the text format match the field
/// names.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub m: u32,
    pub angle: AngleMode,
    pub demapper: DemapperKind,
    /// Second demapper for LLR comparisons.
    pub reference: DemapperKind,
    pub esn0: Vec<f64>,
    pub erasure: f64,
    pub fading: Fading,
    /// Parity-check matrix in alist format; `None` runs uncoded.
    pub ldpc: Option<PathBuf>,
    /// Frame budget per grid point.
    pub frames: u64,
    /// Symbols per uncoded frame (coded frames follow the code length).
    pub frame_symbols: usize,
    /// Stop a grid point after this many erroneous frames; 0 disables.
    pub stop_at_errors: u64,
    pub max_iters: u32,
    pub seed: u64,
    /// Worker threads; 0 picks the machine default. Never affects results.
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Optional per-bit LLR dump written by the comparison run.
    pub llr_dump: Option<PathBuf>,
    pub llr_cap: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            m: 16,
            angle: AngleMode::Proposed,
            demapper: DemapperKind::Sphere,
            reference: DemapperKind::MaxLog,
            esn0: vec![10.0],
            erasure: 0.0,
            fading: Fading::Rayleigh,
            ldpc: None,
            frames: 100,
            frame_symbols: 1000,
            stop_at_errors: 200,
            max_iters: 25,
            seed: 1,
            workers: 0,
            out: None,
            llr_dump: None,
            llr_cap: DEFAULT_LLR_CAP,
        }
    }
}

pub const KEYS: [&str; 17] = [
    "m",
    "angle",
    "demapper",
    "reference",
    "esn0",
    "erasure",
    "fading",
    "ldpc",
    "frames",
    "frame_symbols",
    "stop_at_errors",
    "max_iters",
    "seed",
    "workers",
    "out",
    "llr_dump",
    "llr_cap",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

/// Parses `a:b:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("esn0: cannot parse '{s}'"));
    let grid: Vec<f64> = if s.contains(':') {
        let parts = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let [a, b, step] = parts[..] else {
            return Err(bad());
        };
        if step.is_nan() || step <= 0.0 || b < a {
            return Err(Error::Config(format!("esn0: empty or invalid range '{s}'")));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| a + i as f64 * step).collect()
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

fn opt_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty() && value != "none").then(|| PathBuf::from(value))
}

impl SimConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "m" => self.m = num(key, value)?,
            "angle" => self.angle = AngleMode::parse(value)?,
            "demapper" => {
                self.demapper = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "reference" => {
                self.reference = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "esn0" => self.esn0 = parse_grid(value)?,
            "erasure" => self.erasure = num(key, value)?,
            "fading" => {
                self.fading = match value {
                    "rayleigh" => Fading::Rayleigh,
                    "none" => Fading::None,
                    other => {
                        return Err(Error::Config(format!(
                            "fading: '{other}' is not rayleigh or none"
                        )))
                    }
                }
            }
            "ldpc" => self.ldpc = opt_path(value),
            "frames" => self.frames = num(key, value)?,
            "frame_symbols" => self.frame_symbols = num(key, value)?,
            "stop_at_errors" => self.stop_at_errors = num(key, value)?,
            "max_iters" => self.max_iters = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "out" => self.out = opt_path(value),
            "llr_dump" => self.llr_dump = opt_path(value),
            "llr_cap" => self.llr_cap = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a config file on top of `self`. Later lines win.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", no + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.angle.spec(self.m).map_err(|e| Error::Config(e.to_string()))?;
        for kind in [self.demapper, self.reference] {
            crate::demap::Demapper::new(kind)
                .supports(&spec)
                .map_err(|e| Error::Config(format!("{kind}: {e}")))?;
        }
        if self.esn0.is_empty() {
            return Err(Error::Config("esn0 grid is empty".into()));
        }
        if !(0.0..1.0).contains(&self.erasure) {
            return Err(Error::Config(format!("erasure {} outside [0, 1)", self.erasure)));
        }
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.frame_symbols == 0 {
            return Err(Error::Config("frame_symbols must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.llr_cap.is_nan() || self.llr_cap <= 0.0 {
            return Err(Error::Config("llr_cap must be positive".into()));
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<ConstellationSpec> {
        self.angle.spec(self.m)
    }

    /// Canonical `key = value` lines for every result-affecting key.
    /// `workers` and the output paths are left out on purpose.
    pub fn echo(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("none".into(), |p| p.display().to_string());
        let grid = self.esn0.iter().map(|v| fmt_g(*v)).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("m", self.m.to_string());
        put("angle", self.angle.render());
        put("demapper", self.demapper.to_string());
        put("reference", self.reference.to_string());
        put("esn0", grid);
        put("erasure", fmt_g(self.erasure));
        put(
            "fading",
            match self.fading {
                Fading::Rayleigh => "rayleigh".into(),
                Fading::None => "none".into(),
            },
        );
        put("ldpc", path(&self.ldpc));
        put("frames", self.frames.to_string());
        put("frame_symbols", self.frame_symbols.to_string());
        put("stop_at_errors", self.stop_at_errors.to_string());
        put("max_iters", self.max_iters.to_string());
        put("seed", self.seed.to_string());
        put("llr_cap", fmt_g(self.llr_cap));
        s
    }

    /// Hex SHA-256 of [`SimConfig::echo`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.echo().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// CSV preamble: tool line, the echo as comments, and the hash.
    pub(crate) fn preamble(&self, command: &str) -> String {
        let mut s = format!("# ssd-lab {command}\n");
        for line in self.echo().lines() {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "# config_sha256 = {}", self.hash());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0:2:0.5").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("10, 15,20").unwrap(), vec![10.0, 15.0, 20.0]);
        assert_eq!(parse_grid("7").unwrap(), vec![7.0]);
        for bad in ["", "1:2", "3:1:1", "0:1:0", "a,b", "1:2:x"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_file_with_comments() {
        let cfg = SimConfig::from_text(
            "# demo\nm = 64\nangle = dvbt2  # inline\ndemapper = maxlog\n\nesn0 = 5:7:1\nerasure=0.15\n",
        )
        .unwrap();
        assert_eq!(cfg.m, 64);
        assert_eq!(cfg.angle, AngleMode::Dvbt2);
        assert_eq!(cfg.demapper, DemapperKind::MaxLog);
        assert_eq!(cfg.esn0, vec![5.0, 6.0, 7.0]);
        assert_eq!(cfg.erasure, 0.15);
        cfg.validate().unwrap();
    }

    #[test]
    fn errors_name_the_line() {
        let err = SimConfig::from_text("m = 16\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(SimConfig::from_text("m 16\n").is_err());
        assert!(SimConfig::from_text("fading = rician\n").is_err());
    }

    #[test]
    fn sphere_needs_the_proposed_angle() {
        let mut cfg = SimConfig {
            angle: AngleMode::Dvbt2,
            ..SimConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.demapper = DemapperKind::MaxLog;
        cfg.validate().unwrap();
    }

    #[test]
    fn echo_ignores_workers_and_outputs() {
        let a = SimConfig::default();
        let mut b = a.clone();
        b.workers = 7;
        b.out = Some("x.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
        let round = SimConfig::from_text(&a.echo()).unwrap();
        assert_eq!(round, a);
    }
}
