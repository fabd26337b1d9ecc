//! Experiment configuration: a flat `key = value` text format with
//! command-line overrides, validated before anything runs.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::channel::ChannelConfig;
use crate::sinr::Regime;
use crate::{Error, Result};

/// Which concatenation scheme a run simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Sctc,
    Pctc,
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeKind::Sctc => write!(f, "sctc"),
            CodeKind::Pctc => write!(f, "pctc"),
        }
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationConfig {
    /// Total antennas `N_tot = N_t + N_r`.
    pub n_tot: usize,
    /// Transmit antennas.
    pub n_t: usize,
    /// Retransmissions.
    pub n_rt: usize,
    /// Data bits per frame.
    pub l_d1: usize,
    pub code: CodeKind,
    /// Turbo iterations per frame.
    pub iterations: usize,
    /// Transmit-side channel correlation, `[0, 1)`.
    pub rho: f64,
    /// Apply the prediction-filter precoder.
    pub precoding: bool,
    /// Send throwaway symbols on the first antenna.
    pub dummy_data: bool,
    /// Sweep targets in dB (minimum over data antennas for per-antenna
    /// regimes).
    pub sinr_sweep_db: Vec<f64>,
    /// Frames per sweep point.
    pub frames: usize,
    pub seed: u64,
    /// Channel tap variance per dimension.
    pub sigma2_h: f64,
    /// Worker threads for the frame loop.
    pub workers: usize,
    /// Calibrate against the after-combining SINR instead of the
    /// before-combining definition.
    pub calibrate_combined: bool,
    /// Use the branch metric without the gain factor.
    pub unscaled_gamma: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            n_tot: 32,
            n_t: 16,
            n_rt: 2,
            l_d1: 1024,
            code: CodeKind::Sctc,
            iterations: 8,
            rho: 0.0,
            precoding: false,
            dummy_data: false,
            sinr_sweep_db: Vec::new(),
            frames: 100,
            seed: 1,
            sigma2_h: 0.5,
            workers: 1,
            calibrate_combined: false,
            unscaled_gamma: false,
        }
    }
}

impl SimulationConfig {
    pub fn n_r(&self) -> usize {
        self.n_tot.saturating_sub(self.n_t)
    }

    pub fn l_d(&self) -> usize {
        2 * self.l_d1
    }

    /// Codeword symbols per block: `N_t`, or `N_t - 1` in dummy mode where
    /// antenna 1 carries a throwaway symbol.
    pub fn symbols_per_block(&self) -> usize {
        if self.dummy_data {
            self.n_t - 1
        } else {
            self.n_t
        }
    }

    pub fn blocks_per_frame(&self) -> usize {
        self.l_d() / self.symbols_per_block()
    }

    /// 1-based antennas that carry codeword symbols.
    pub fn data_antennas(&self) -> Vec<usize> {
        let first = if self.dummy_data { 2 } else { 1 };
        (first..=self.n_t).collect()
    }

    pub fn channel_config(&self, sigma2_w: f64) -> ChannelConfig {
        ChannelConfig {
            n_t: self.n_t,
            n_r: self.n_r(),
            n_rt: self.n_rt,
            sigma2_h: self.sigma2_h,
            sigma2_w,
            correlation_rho: self.rho,
            p_av: 2.0,
        }
    }

    /// Regime whose formula the sweep x-axis is calibrated against.
    pub fn calibration_regime(&self) -> Regime {
        match (self.precoding, self.calibrate_combined) {
            (false, false) => Regime::CorrelatedBefore,
            (false, true) => Regime::CorrelatedAfter,
            (true, false) => Regime::PrecodedBefore,
            (true, true) => Regime::PrecodedAfter,
        }
    }

    /// Checks every structural invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.n_t < 1 {
            return Err(Error::Config("n_t must be at least 1".into()));
        }
        if self.n_tot <= self.n_t {
            return Err(Error::Config(format!(
                "n_tot = {} leaves no receive antennas for n_t = {}",
                self.n_tot, self.n_t
            )));
        }
        if self.l_d1 < 2 {
            return Err(Error::Config("l_d1 must be at least 2".into()));
        }
        if self.dummy_data && self.n_t < 2 {
            return Err(Error::Config(
                "dummy_data needs at least 2 transmit antennas".into(),
            ));
        }
        let divisor = self.symbols_per_block();
        if !self.l_d().is_multiple_of(divisor) {
            // valid l_d1 values are multiples of divisor / gcd(divisor, 2)
            let step = if divisor.is_multiple_of(2) { divisor / 2 } else { divisor };
            let down = (self.l_d1 / step) * step;
            let up = down + step;
            let near = if down >= 2 && self.l_d1 - down <= up - self.l_d1 {
                down
            } else {
                up
            };
            return Err(Error::Config(format!(
                "L_d = {} not divisible by {divisor}{}; nearest valid l_d1 is {near}",
                self.l_d(),
                if self.dummy_data { " (n_t - 1, dummy mode)" } else { " (n_t)" },
            )));
        }
        if self.frames < 1 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho = {} outside [0, 1)", self.rho)));
        }
        if !(self.sigma2_h > 0.0) {
            return Err(Error::Config("sigma2_h must be positive".into()));
        }
        Ok(())
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        macro_rules! parse {
            ($t:ty) => {
                v.parse::<$t>()
                    .map_err(|e| Error::Config(format!("{key} = {v}: {e}")))?
            };
        }
        match key {
            "n_tot" => self.n_tot = parse!(usize),
            "n_t" => self.n_t = parse!(usize),
            "n_rt" => self.n_rt = parse!(usize),
            "l_d1" => self.l_d1 = parse!(usize),
            "code" => {
                self.code = match v {
                    "sctc" => CodeKind::Sctc,
                    "pctc" => CodeKind::Pctc,
                    other => {
                        return Err(Error::Config(format!(
                            "code = {other}: expected sctc or pctc"
                        )))
                    }
                }
            }
            "iterations" => self.iterations = parse!(usize),
            "rho" => self.rho = parse!(f64),
            "precoding" => self.precoding = parse!(bool),
            "dummy_data" => self.dummy_data = parse!(bool),
            "sinr_sweep_db" => {
                self.sinr_sweep_db = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Config(format!("sinr_sweep_db: {s}: {e}")))
                    })
                    .collect::<Result<Vec<f64>>>()?
            }
            "frames" => self.frames = parse!(usize),
            "seed" => self.seed = parse!(u64),
            "sigma2_h" => self.sigma2_h = parse!(f64),
            "workers" => self.workers = parse!(usize),
            "calibrate_combined" => self.calibrate_combined = parse!(bool),
            "unscaled_gamma" => self.unscaled_gamma = parse!(bool),
            other => return Err(Error::Config(format!("unknown key: {other}"))),
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }
}

/// Parses the flat `key = value` text format. Blank lines and `#` comments
/// are skipped; defaults fill whatever the text omits.
impl std::str::FromStr for SimulationConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = SimulationConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }
}
