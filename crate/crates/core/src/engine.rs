//! The experiment engine: seeded parallel Monte-Carlo frame loop, sweep
//! orchestration and histogram runs.
//!
//! A frame outcome is a pure function of `(config, seed, frame index)`:
//! every random draw comes from a substream addressed by purpose, frame,
//! block and retransmission, and aggregation reduces frame results in frame
//! order. Worker count therefore cannot perturb any output byte.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ber::{empirical_ber, histogram_diagnostics, qualifying_llrs, semi_analytic_frame_ber, Histogram};
use crate::channel::{
    draw_channel, effective_noise_variance_correlated, effective_noise_variance_precoded,
    matched_filter_combine, transmit_block, EqualizedFrame,
};
use crate::codes::{build_trellis, make_interleaver, Interleaver, Trellis};
use crate::config::{CodeKind, SimulationConfig};
use crate::pctc::pctc_decode;
use crate::precoder::{
    autocorrelation_sequence, build_precoding_matrix, levinson_durbin, Predictor,
};
use crate::rng::{substream, Purpose};
use crate::sctc::{sctc_decode, sctc_encode, ExchangeMoments, GammaForm};
use crate::sinr::calibrate_noise;
use crate::{bit_to_amp, Error, Result};

/// Everything derived once per configuration: trellis, interleaver,
/// prediction filters and the precoding matrix.
pub struct RunContext {
    pub cfg: SimulationConfig,
    trellis: Trellis,
    interleaver: Interleaver,
    predictor: Option<Predictor>,
    precode: Option<DMatrix<Complex64>>,
}

impl RunContext {
    pub fn new(cfg: SimulationConfig) -> Result<Self> {
        let il_len = match cfg.code {
            CodeKind::Sctc => cfg.l_d(),
            CodeKind::Pctc => cfg.l_d1,
        };
        // The permutation is part of the code; one per run.
        let il_seed = cfg.seed ^ 0x9e37_79b9_7f4a_7c15;
        Self::with_interleaver(cfg, make_interleaver(il_len, il_seed)?)
    }

    /// Builds a context around a caller-supplied interleaver, e.g. to study
    /// sensitivity to the permutation while keeping every noise substream
    /// fixed.
    pub fn with_interleaver(cfg: SimulationConfig, interleaver: Interleaver) -> Result<Self> {
        cfg.validate()?;
        let expected = match cfg.code {
            CodeKind::Sctc => cfg.l_d(),
            CodeKind::Pctc => cfg.l_d1,
        };
        if interleaver.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "interleaver length {} != {expected}",
                interleaver.len()
            )));
        }
        let trellis = build_trellis();
        let (predictor, precode) = if cfg.precoding {
            let p = levinson_durbin(&autocorrelation_sequence(cfg.rho, cfg.sigma2_h, cfg.n_t))?;
            let b = build_precoding_matrix(&p);
            (Some(p), Some(b))
        } else {
            (None, None)
        };
        Ok(RunContext {
            cfg,
            trellis,
            interleaver,
            predictor,
            precode,
        })
    }

    pub fn predictor(&self) -> Option<&Predictor> {
        self.predictor.as_ref()
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    /// Per-antenna decoder noise variance (per dimension, after combining)
    /// at the given noise level, indexed by antenna - 1.
    pub fn sigma2_u_table(&self, sigma2_w: f64) -> Result<Vec<f64>> {
        let ccfg = self.cfg.channel_config(sigma2_w);
        (1..=self.cfg.n_t)
            .map(|i| match &self.predictor {
                Some(p) => {
                    effective_noise_variance_precoded(&ccfg, p.sigma2_z_all(), i, true)
                }
                None => effective_noise_variance_correlated(&ccfg, i, true),
            })
            .collect()
    }
}

/// 1-based transmit antenna carrying codeword symbol `idx`.
pub fn antenna_of_symbol(idx: usize, n_t: usize, dummy_data: bool) -> usize {
    if dummy_data {
        (idx % (n_t - 1)) + 2
    } else {
        (idx % n_t) + 1
    }
}

/// Lays codeword symbols into per-block antenna vectors.
///
/// Without dummy data, block `b` holds symbols `b n_t .. (b+1) n_t` in
/// antenna order. With dummy data, antenna 1 of every block carries the
/// supplied throwaway symbol and the codeword fills antennas `2..=n_t`.
/// The returned mask marks dummy slots in the transmitted slot stream
/// (length `blocks * n_t`).
pub fn map_symbols_to_blocks(
    s: &[Complex64],
    n_t: usize,
    dummy_symbols: Option<&[Complex64]>,
) -> Result<(Vec<DVector<Complex64>>, Vec<bool>)> {
    match dummy_symbols {
        None => {
            if n_t == 0 || !s.len().is_multiple_of(n_t) {
                return Err(Error::InvalidArgument(format!(
                    "{} symbols not divisible by N_t = {n_t}",
                    s.len()
                )));
            }
            let blocks = s
                .chunks_exact(n_t)
                .map(DVector::from_row_slice)
                .collect();
            Ok((blocks, vec![false; s.len()]))
        }
        Some(dummies) => {
            let per = n_t - 1;
            if n_t < 2 || !s.len().is_multiple_of(per) {
                return Err(Error::InvalidArgument(format!(
                    "{} symbols not divisible by N_t - 1 = {per}",
                    s.len()
                )));
            }
            let n_blocks = s.len() / per;
            if dummies.len() != n_blocks {
                return Err(Error::InvalidArgument(format!(
                    "{} dummy symbols for {n_blocks} blocks",
                    dummies.len()
                )));
            }
            let mut blocks = Vec::with_capacity(n_blocks);
            let mut mask = vec![false; n_blocks * n_t];
            for b in 0..n_blocks {
                let mut v = DVector::from_element(n_t, Complex64::new(0.0, 0.0));
                v[0] = dummies[b];
                for j in 0..per {
                    v[j + 1] = s[b * per + j];
                }
                mask[b * n_t] = true;
                blocks.push(v);
            }
            Ok((blocks, mask))
        }
    }
}

/// Inverse of [`map_symbols_to_blocks`]: collects the non-dummy slots back
/// into codeword order.
pub fn demap_blocks(blocks: &[DVector<Complex64>], mask: &[bool]) -> Vec<Complex64> {
    let n_t = blocks.first().map_or(0, |b| b.len());
    let mut out = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        for j in 0..n_t {
            if !mask[b * n_t + j] {
                out.push(block[j]);
            }
        }
    }
    out
}

/// Result of simulating one frame.
#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub bits_counted: u64,
    /// Semi-analytic frame error probability.
    pub p_f: f64,
    /// Qualifying positions behind `p_f`.
    pub l_d2: usize,
    /// True when no position qualified and `p_f = 0.5` was recorded.
    pub degenerate: bool,
    pub exchange: ExchangeMoments,
    /// Qualifying LLR values, kept only when requested.
    pub llr: Option<Vec<f64>>,
}

fn qpsk_symbol<R: rand::Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(
        bit_to_amp(u8::from(rng.random::<bool>())),
        bit_to_amp(u8::from(rng.random::<bool>())),
    )
}

/// Simulates one frame end to end at the given noise level.
///
/// Deterministic in `(cfg, seed, frame)`; see the module docs.
pub fn run_frame(
    ctx: &RunContext,
    sigma2_w: f64,
    sigma2_u: &[f64],
    frame: u64,
    collect_llrs: bool,
) -> Result<FrameOutcome> {
    let cfg = &ctx.cfg;
    let ccfg = cfg.channel_config(sigma2_w);
    let gamma = if cfg.unscaled_gamma {
        GammaForm::Unscaled
    } else {
        GammaForm::GainScaled
    };

    let mut bit_rng = substream(cfg.seed, Purpose::DataBits, frame, 0, 0);
    let a: Vec<u8> = (0..cfg.l_d1)
        .map(|_| u8::from(bit_rng.random::<bool>()))
        .collect();

    let s = match cfg.code {
        CodeKind::Sctc => sctc_encode(&a, &ctx.interleaver, &ctx.trellis)?.s,
        CodeKind::Pctc => crate::pctc::pctc_encode(&a, &ctx.interleaver, &ctx.trellis)?.s,
    };

    let dummies: Option<Vec<Complex64>> = cfg.dummy_data.then(|| {
        (0..cfg.blocks_per_frame() as u64)
            .map(|b| qpsk_symbol(&mut substream(cfg.seed, Purpose::Dummy, frame, b, 0)))
            .collect()
    });
    let (blocks, _mask) = map_symbols_to_blocks(&s, cfg.n_t, dummies.as_deref())?;

    let mut y = Vec::with_capacity(s.len());
    let mut f = Vec::with_capacity(s.len());
    for (b, block) in blocks.iter().enumerate() {
        let b_idx = b as u64;
        let z: Vec<DMatrix<Complex64>> = (0..cfg.n_rt as u64)
            .map(|k| {
                let h = draw_channel(
                    &ccfg,
                    &mut substream(cfg.seed, Purpose::Channel, frame, b_idx, k),
                );
                match &ctx.precode {
                    Some(bmat) => h * bmat,
                    None => h,
                }
            })
            .collect();
        let r = transmit_block(block, &z, None, &ccfg, |k| {
            substream(cfg.seed, Purpose::Noise, frame, b_idx, k as u64)
        })?;
        let (yb, fb) = matched_filter_combine(&r, &z)?;
        // data slots only; the dummy slot sits at antenna 1
        let first = if cfg.dummy_data { 1 } else { 0 };
        y.extend_from_slice(&yb[first..]);
        f.extend_from_slice(&fb[first..]);
    }

    let eq = EqualizedFrame {
        sigma2_u: (0..s.len())
            .map(|i| sigma2_u[antenna_of_symbol(i, cfg.n_t, cfg.dummy_data) - 1])
            .collect(),
        y,
        f,
    };

    let decoded = match cfg.code {
        CodeKind::Sctc => sctc_decode(&eq, &ctx.interleaver, &ctx.trellis, cfg.iterations, gamma)?,
        CodeKind::Pctc => pctc_decode(&eq, &ctx.interleaver, &ctx.trellis, cfg.iterations, gamma)?,
    };

    let (bit_errors, bits_counted) = empirical_ber(&decoded.bits, &a, None)?;
    let (p_f, l_d2, degenerate) = match semi_analytic_frame_ber(&decoded.llr, &a) {
        Ok((p, l)) => (p, l, false),
        Err(Error::DegenerateFrame) => (0.5, 0, true),
        Err(e) => return Err(e),
    };
    Ok(FrameOutcome {
        bit_errors,
        bits_counted,
        p_f,
        l_d2,
        degenerate,
        exchange: decoded.exchange,
        llr: collect_llrs.then(|| qualifying_llrs(&decoded.llr)),
    })
}

/// One sweep point: empirical and semi-analytic BER plus diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct BerRecord {
    pub sinr_db: f64,
    pub sigma2_w: f64,
    pub frames: usize,
    pub bit_errors: u64,
    pub bits_counted: u64,
    pub ber_empirical: f64,
    pub ber_semianalytic: f64,
    pub mean_l_d2: f64,
    pub degenerate_frames: usize,
    pub code: CodeKind,
    pub rho: f64,
    pub precoding: bool,
    pub dummy_data: bool,
}

/// Outcome of one sweep target: a record, or the error that kept the point
/// from running.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub target_db: f64,
    pub record: Option<BerRecord>,
    pub error: Option<String>,
}

/// Full sweep result with the configuration echoed for provenance.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub config: SimulationConfig,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn has_failures(&self) -> bool {
        self.points.iter().any(|p| p.error.is_some())
    }

    pub fn records(&self) -> Vec<&BerRecord> {
        self.points.iter().filter_map(|p| p.record.as_ref()).collect()
    }
}

fn run_frames(
    ctx: &RunContext,
    sigma2_w: f64,
    collect_llrs: bool,
) -> Result<Vec<FrameOutcome>> {
    let sigma2_u = ctx.sigma2_u_table(sigma2_w)?;
    let outcomes: Vec<Result<FrameOutcome>> = (0..ctx.cfg.frames as u64)
        .into_par_iter()
        .map(|frame| run_frame(ctx, sigma2_w, &sigma2_u, frame, collect_llrs))
        .collect();
    // surface the first failure in frame order so reporting is deterministic
    let mut frames = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        frames.push(o?);
    }
    Ok(frames)
}

fn point_record(cfg: &SimulationConfig, target_db: f64, sigma2_w: f64, frames: &[FrameOutcome]) -> BerRecord {
    let bit_errors: u64 = frames.iter().map(|f| f.bit_errors).sum();
    let bits_counted: u64 = frames.iter().map(|f| f.bits_counted).sum();
    let p_f_sum: f64 = frames.iter().map(|f| f.p_f).sum();
    let l_d2_sum: f64 = frames.iter().map(|f| f.l_d2 as f64).sum();
    BerRecord {
        sinr_db: target_db,
        sigma2_w,
        frames: frames.len(),
        bit_errors,
        bits_counted,
        ber_empirical: bit_errors as f64 / bits_counted as f64,
        ber_semianalytic: p_f_sum / frames.len() as f64,
        mean_l_d2: l_d2_sum / frames.len() as f64,
        degenerate_frames: frames.iter().filter(|f| f.degenerate).count(),
        code: cfg.code,
        rho: cfg.rho,
        precoding: cfg.precoding,
        dummy_data: cfg.dummy_data,
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Runs the configured sweep, optionally persisting `ber.csv`, `ber.json`
/// and the gnuplot curve files into `out_dir`.
///
/// An unreachable target or a failed frame marks its point and the sweep
/// continues with the remaining points.
pub fn run_sweep(cfg: &SimulationConfig, out_dir: Option<&Path>) -> Result<SweepReport> {
    let ctx = RunContext::new(cfg.clone())?;
    if cfg.sinr_sweep_db.is_empty() {
        return Err(Error::Config("sinr_sweep_db is empty".into()));
    }
    let pool = thread_pool(cfg.workers)?;
    let mut points = Vec::with_capacity(cfg.sinr_sweep_db.len());
    for &target_db in &cfg.sinr_sweep_db {
        let point = match calibrate_noise(
            &cfg.channel_config(0.0),
            cfg.calibration_regime(),
            ctx.predictor(),
            target_db,
            &cfg.data_antennas(),
        ) {
            Ok(sigma2_w) => match pool.install(|| run_frames(&ctx, sigma2_w, false)) {
                Ok(frames) => SweepPoint {
                    target_db,
                    record: Some(point_record(cfg, target_db, sigma2_w, &frames)),
                    error: None,
                },
                Err(e) => SweepPoint {
                    target_db,
                    record: None,
                    error: Some(e.to_string()),
                },
            },
            Err(e) => SweepPoint {
                target_db,
                record: None,
                error: Some(e.to_string()),
            },
        };
        points.push(point);
    }
    let report = SweepReport {
        config: cfg.clone(),
        points,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        crate::report::write_ber_csv(&dir.join("ber.csv"), &report)?;
        crate::report::write_json(&dir.join("ber.json"), &report)?;
        crate::report::write_curves(dir, &report)?;
    }
    Ok(report)
}

/// Moments of one frame's qualifying LLR population.
#[derive(Debug, Clone, Serialize)]
pub struct FrameHistogram {
    pub frame: u64,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// Present when the frame had at least 30 qualifying values.
    pub histogram: Option<Histogram>,
}

/// Result of a histogram run at one operating point.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramReport {
    pub config: SimulationConfig,
    pub target_db: f64,
    pub sigma2_w: f64,
    pub bins: usize,
    pub pooled: Histogram,
    pub frames: Vec<FrameHistogram>,
    /// Final-iteration exchange moments averaged over frames: the decoder
    /// output extrinsics against the a-priori input, both as log-ratios.
    pub mean_prior_mean: f64,
    pub mean_prior_var: f64,
    pub mean_extrinsic_mean: f64,
    pub mean_extrinsic_var: f64,
}

/// Runs `cfg.frames` frames at `target_db` and histograms the qualifying
/// LLR statistic per frame and pooled.
pub fn run_histogram(
    cfg: &SimulationConfig,
    target_db: f64,
    bins: usize,
    out_dir: Option<&Path>,
) -> Result<HistogramReport> {
    let ctx = RunContext::new(cfg.clone())?;
    let sigma2_w = calibrate_noise(
        &cfg.channel_config(0.0),
        cfg.calibration_regime(),
        ctx.predictor(),
        target_db,
        &cfg.data_antennas(),
    )?;
    let pool = thread_pool(cfg.workers)?;
    let frames = pool.install(|| run_frames(&ctx, sigma2_w, true))?;

    let mut pooled_values = Vec::new();
    let mut per_frame = Vec::with_capacity(frames.len());
    let mut pm = 0.0;
    let mut pv = 0.0;
    let mut em = 0.0;
    let mut ev = 0.0;
    for (idx, fr) in frames.iter().enumerate() {
        let values = fr.llr.as_deref().unwrap_or(&[]);
        pooled_values.extend_from_slice(values);
        let n = values.len();
        let mean = if n > 0 {
            values.iter().sum::<f64>() / n as f64
        } else {
            0.0
        };
        let var = if n > 0 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64
        } else {
            0.0
        };
        per_frame.push(FrameHistogram {
            frame: idx as u64,
            count: n,
            mean,
            variance: var,
            histogram: histogram_diagnostics(values, bins).ok(),
        });
        pm += fr.exchange.prior_mean;
        pv += fr.exchange.prior_var;
        em += fr.exchange.extrinsic_mean;
        ev += fr.exchange.extrinsic_var;
    }
    let nf = frames.len() as f64;
    let pooled = histogram_diagnostics(&pooled_values, bins)?;
    let report = HistogramReport {
        config: cfg.clone(),
        target_db,
        sigma2_w,
        bins,
        pooled,
        frames: per_frame,
        mean_prior_mean: pm / nf,
        mean_prior_var: pv / nf,
        mean_extrinsic_mean: em / nf,
        mean_extrinsic_var: ev / nf,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        crate::report::write_histogram_csv(&dir.join("hist.csv"), &report)?;
        crate::report::write_json(&dir.join("hist_summary.json"), &report)?;
    }
    Ok(report)
}
