//! Closed-form average SINR per bit, its zero-noise upper bounds, surface
//! export over `(N_t, i)` grids and noise calibration for sweeps.
//!
//! Four regimes are covered: correlated channel with and without precoding,
//! each before and after retransmission combining. The white channel is the
//! `rho = 0` special case of the correlated formulas. All values are linear
//! power ratios per information bit (the `2 N_rt` factor included); dB
//! conversion uses `10 log10`.

use serde::Serialize;

use crate::channel::ChannelConfig;
use crate::precoder::Predictor;
use crate::{Error, Result};

/// Which link and receiver combination a SINR value describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Correlated (or white) channel, matched filter, single transmission
    /// viewpoint.
    CorrelatedBefore,
    /// Correlated channel after retransmission combining.
    CorrelatedAfter,
    /// Prediction-filter precoding, before combining.
    PrecodedBefore,
    /// Prediction-filter precoding, after combining.
    PrecodedAfter,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::CorrelatedBefore => "correlated-before",
            Regime::CorrelatedAfter => "correlated-after",
            Regime::PrecodedBefore => "precoded-before",
            Regime::PrecodedAfter => "precoded-after",
        }
    }

    pub fn is_precoded(&self) -> bool {
        matches!(self, Regime::PrecodedBefore | Regime::PrecodedAfter)
    }
}

/// Per-antenna SINR evaluation of one regime at one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct SinrReport {
    pub regime: Regime,
    /// Linear SINR per bit for antennas `1..=N_t`.
    pub per_antenna: Vec<f64>,
    pub per_antenna_db: Vec<f64>,
    pub min_db: f64,
    /// True when evaluated at `sigma2_w = 0`.
    pub is_upper_bound: bool,
}

#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[inline]
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Interference sums for antenna `i`: `sum_{j != i} (sigma_h^4 + N_r R^2)`
/// and `sum_{j != i} R^2`.
fn interference_sums(cfg: &ChannelConfig, i: usize) -> (f64, f64) {
    let s4 = cfg.sigma2_h * cfg.sigma2_h;
    let n_r = cfg.n_r as f64;
    let mut base = 0.0;
    let mut r2 = 0.0;
    for j in 1..=cfg.n_t {
        if j == i {
            continue;
        }
        let r = cfg.autocorrelation(j as i64 - i as i64);
        base += s4 + n_r * r * r;
        r2 += r * r;
    }
    (base, r2)
}

fn check_antenna(cfg: &ChannelConfig, i: usize) -> Result<()> {
    if i < 1 || i > cfg.n_t {
        return Err(Error::AntennaIndex { index: i, n_t: cfg.n_t });
    }
    if cfg.n_t == 1 && cfg.sigma2_w == 0.0 {
        return Err(Error::InfiniteSinr);
    }
    Ok(())
}

/// Average SINR per bit for antenna `i`, correlated channel, before
/// combining: signal `4 sigma_h^4 N_r (N_r+1) P_av x 2 N_rt` over
/// interference plus noise.
pub fn sinr_correlated(cfg: &ChannelConfig, i: usize) -> Result<f64> {
    check_antenna(cfg, i)?;
    let n_r = cfg.n_r as f64;
    let s4 = cfg.sigma2_h * cfg.sigma2_h;
    let (base, _) = interference_sums(cfg, i);
    let num = cfg.p_av * 4.0 * s4 * n_r * (n_r + 1.0) * 2.0 * cfg.n_rt as f64;
    let den = 4.0 * cfg.p_av * n_r * base + 4.0 * n_r * cfg.sigma2_h * cfg.sigma2_w;
    Ok(num / den)
}

/// Zero-noise upper bound of [`sinr_correlated`].
pub fn sinr_correlated_ub(cfg: &ChannelConfig, i: usize) -> Result<f64> {
    sinr_correlated(&ChannelConfig { sigma2_w: 0.0, ..*cfg }, i)
}

/// Average SINR per bit for antenna `i`, correlated channel, after
/// combining: `2 P_av E[F_i^2] / E[|U_i|^2]` with the
/// `N_r^2 (N_rt - 1) R^2` cross-retransmission interference term.
pub fn sinr_correlated_combined(cfg: &ChannelConfig, i: usize) -> Result<f64> {
    check_antenna(cfg, i)?;
    let n_r = cfg.n_r as f64;
    let n_rt = cfg.n_rt as f64;
    let s4 = cfg.sigma2_h * cfg.sigma2_h;
    let (base, r2) = interference_sums(cfg, i);
    let e_f2 = 4.0 * n_r * s4 / n_rt * (1.0 + n_r * n_rt);
    let e_u2 = (4.0 * cfg.p_av * n_r * base
        + 4.0 * cfg.p_av * n_r * n_r * (n_rt - 1.0) * r2
        + 4.0 * n_r * cfg.sigma2_h * cfg.sigma2_w)
        / n_rt;
    Ok(2.0 * cfg.p_av * e_f2 / e_u2)
}

/// Zero-noise upper bound of [`sinr_correlated_combined`].
pub fn sinr_correlated_combined_ub(cfg: &ChannelConfig, i: usize) -> Result<f64> {
    sinr_correlated_combined(&ChannelConfig { sigma2_w: 0.0, ..*cfg }, i)
}

fn check_predictor(cfg: &ChannelConfig, p: &Predictor) -> Result<()> {
    if p.order + 1 < cfg.n_t {
        return Err(Error::InvalidArgument(format!(
            "predictor order {} too small for N_t = {}",
            p.order, cfg.n_t
        )));
    }
    Ok(())
}

fn sigma2_z_sums(cfg: &ChannelConfig, p: &Predictor, i: usize) -> (f64, f64) {
    let own = p.sigma2_z(i);
    let others: f64 = (1..=cfg.n_t).filter(|&j| j != i).map(|j| p.sigma2_z(j)).sum();
    (own, others)
}

/// Average SINR per bit for antenna `i` with precoding, before combining:
/// `P_av (N_r+1) sigma2_z_i x 2 N_rt / (P_av sum_{j!=i} sigma2_z_j + sigma2_w)`.
pub fn sinr_precoded(cfg: &ChannelConfig, p: &Predictor, i: usize) -> Result<f64> {
    check_antenna(cfg, i)?;
    check_predictor(cfg, p)?;
    let (own, others) = sigma2_z_sums(cfg, p, i);
    let num = cfg.p_av * (cfg.n_r as f64 + 1.0) * own * 2.0 * cfg.n_rt as f64;
    Ok(num / (cfg.p_av * others + cfg.sigma2_w))
}

/// Zero-noise upper bound of [`sinr_precoded`].
pub fn sinr_precoded_ub(cfg: &ChannelConfig, p: &Predictor, i: usize) -> Result<f64> {
    sinr_precoded(&ChannelConfig { sigma2_w: 0.0, ..*cfg }, p, i)
}

/// Average SINR per bit for antenna `i` with precoding, after combining:
/// `(N_r N_rt + 1) sigma2_z_i x 2 P_av / (P_av sum_{j!=i} sigma2_z_j + sigma2_w)`.
pub fn sinr_precoded_combined(cfg: &ChannelConfig, p: &Predictor, i: usize) -> Result<f64> {
    check_antenna(cfg, i)?;
    check_predictor(cfg, p)?;
    let (own, others) = sigma2_z_sums(cfg, p, i);
    let num = (cfg.n_r as f64 * cfg.n_rt as f64 + 1.0) * own * 2.0 * cfg.p_av;
    Ok(num / (cfg.p_av * others + cfg.sigma2_w))
}

/// Zero-noise upper bound of [`sinr_precoded_combined`].
pub fn sinr_precoded_combined_ub(cfg: &ChannelConfig, p: &Predictor, i: usize) -> Result<f64> {
    sinr_precoded_combined(&ChannelConfig { sigma2_w: 0.0, ..*cfg }, p, i)
}

/// One regime's SINR at one antenna; `predictor` is required for the
/// precoded regimes.
pub fn sinr(
    cfg: &ChannelConfig,
    regime: Regime,
    predictor: Option<&Predictor>,
    i: usize,
) -> Result<f64> {
    match regime {
        Regime::CorrelatedBefore => sinr_correlated(cfg, i),
        Regime::CorrelatedAfter => sinr_correlated_combined(cfg, i),
        Regime::PrecodedBefore | Regime::PrecodedAfter => {
            let p = predictor.ok_or_else(|| {
                Error::InvalidArgument("precoded regime needs a predictor".into())
            })?;
            if regime == Regime::PrecodedBefore {
                sinr_precoded(cfg, p, i)
            } else {
                sinr_precoded_combined(cfg, p, i)
            }
        }
    }
}

/// Evaluates a regime at every antenna.
pub fn sinr_report(
    cfg: &ChannelConfig,
    regime: Regime,
    predictor: Option<&Predictor>,
) -> Result<SinrReport> {
    let mut per_antenna = Vec::with_capacity(cfg.n_t);
    for i in 1..=cfg.n_t {
        per_antenna.push(sinr(cfg, regime, predictor, i)?);
    }
    let per_antenna_db: Vec<f64> = per_antenna.iter().map(|&v| to_db(v)).collect();
    let min_db = per_antenna_db.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SinrReport {
        regime,
        per_antenna,
        per_antenna_db,
        min_db,
        is_upper_bound: cfg.sigma2_w == 0.0,
    })
}

/// One point of an exported SINR surface.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceRecord {
    pub regime: Regime,
    pub n_tot: usize,
    pub n_t: usize,
    pub n_r: usize,
    pub n_rt: usize,
    pub rho: f64,
    pub antenna_i: usize,
    pub sinr_db: f64,
    pub is_ub: bool,
}

/// Grid description for [`export_surface`].
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSpec {
    pub n_tot: usize,
    pub n_rt: usize,
    pub rho: f64,
    pub sigma2_h: f64,
    /// Zero exports the upper-bound surface.
    pub sigma2_w: f64,
    pub nt_min: usize,
    pub nt_max: usize,
}

/// Sweeps `N_t` at fixed `N_tot` and emits one record per `(N_t, i)`.
pub fn export_surface(spec: &SurfaceSpec, regime: Regime) -> Result<Vec<SurfaceRecord>> {
    if spec.nt_min < 1 || spec.nt_min > spec.nt_max || spec.nt_max >= spec.n_tot {
        return Err(Error::InvalidArgument(format!(
            "N_t range {}..={} invalid for N_tot = {}",
            spec.nt_min, spec.nt_max, spec.n_tot
        )));
    }
    if spec.nt_min == 1 && spec.sigma2_w == 0.0 {
        return Err(Error::InfiniteSinr);
    }
    let mut out = Vec::new();
    for n_t in spec.nt_min..=spec.nt_max {
        let cfg = ChannelConfig {
            n_t,
            n_r: spec.n_tot - n_t,
            n_rt: spec.n_rt,
            sigma2_h: spec.sigma2_h,
            sigma2_w: spec.sigma2_w,
            correlation_rho: spec.rho,
            p_av: 2.0,
        };
        let predictor = if regime.is_precoded() {
            Some(crate::precoder::levinson_durbin(
                &crate::precoder::autocorrelation_sequence(spec.rho, spec.sigma2_h, n_t),
            )?)
        } else {
            None
        };
        let report = sinr_report(&cfg, regime, predictor.as_ref())?;
        for (idx, &db) in report.per_antenna_db.iter().enumerate() {
            out.push(SurfaceRecord {
                regime,
                n_tot: spec.n_tot,
                n_t,
                n_r: cfg.n_r,
                n_rt: spec.n_rt,
                rho: spec.rho,
                antenna_i: idx + 1,
                sinr_db: db,
                is_ub: spec.sigma2_w == 0.0,
            });
        }
    }
    Ok(out)
}

/// Inverts a regime's SINR formula for `sigma2_w` so that the minimum over
/// `antennas` (1-based; all antennas when empty) hits `target_db`.
///
/// Fails with [`Error::UnreachableTarget`] when the target is at or above
/// the regime's upper bound at the limiting antenna.
pub fn calibrate_noise(
    cfg: &ChannelConfig,
    regime: Regime,
    predictor: Option<&Predictor>,
    target_db: f64,
    antennas: &[usize],
) -> Result<f64> {
    let all: Vec<usize>;
    let candidates: &[usize] = if antennas.is_empty() {
        all = (1..=cfg.n_t).collect();
        &all
    } else {
        antennas
    };
    let target = from_db(target_db);

    // The argmin antenna does not depend on sigma2_w in any regime (the
    // noise term is antenna-independent for the correlated regimes, and the
    // precoded numerator/denominator are respectively non-increasing and
    // non-decreasing in i), so locate it on the upper bound.
    let mut limiting = candidates[0];
    if cfg.n_t > 1 {
        let ub_cfg = ChannelConfig { sigma2_w: 0.0, ..*cfg };
        let mut best = f64::INFINITY;
        for &i in candidates {
            let ub = sinr(&ub_cfg, regime, predictor, i)?;
            if ub < best {
                best = ub;
                limiting = i;
            }
        }
        if target >= best {
            return Err(Error::UnreachableTarget {
                target_db,
                ub_db: to_db(best),
            });
        }
    }

    // Every regime has the shape T = A / (B + C sigma2_w).
    let i = limiting;
    let n_r = cfg.n_r as f64;
    let n_rt = cfg.n_rt as f64;
    let s4 = cfg.sigma2_h * cfg.sigma2_h;
    let (a, b, c) = match regime {
        Regime::CorrelatedBefore => {
            let (base, _) = interference_sums(cfg, i);
            (
                cfg.p_av * 4.0 * s4 * n_r * (n_r + 1.0) * 2.0 * n_rt,
                4.0 * cfg.p_av * n_r * base,
                4.0 * n_r * cfg.sigma2_h,
            )
        }
        Regime::CorrelatedAfter => {
            let (base, r2) = interference_sums(cfg, i);
            (
                2.0 * cfg.p_av * 4.0 * n_r * s4 / n_rt * (1.0 + n_r * n_rt),
                (4.0 * cfg.p_av * n_r * base + 4.0 * cfg.p_av * n_r * n_r * (n_rt - 1.0) * r2)
                    / n_rt,
                4.0 * n_r * cfg.sigma2_h / n_rt,
            )
        }
        Regime::PrecodedBefore | Regime::PrecodedAfter => {
            let p = predictor.ok_or_else(|| {
                Error::InvalidArgument("precoded regime needs a predictor".into())
            })?;
            check_predictor(cfg, p)?;
            let (own, others) = sigma2_z_sums(cfg, p, i);
            let num = if regime == Regime::PrecodedBefore {
                cfg.p_av * (n_r + 1.0) * own * 2.0 * n_rt
            } else {
                (n_r * n_rt + 1.0) * own * 2.0 * cfg.p_av
            };
            (num, cfg.p_av * others, 1.0)
        }
    };
    let sigma2_w = (a / target - b) / c;
    if !(sigma2_w > 0.0) {
        // N_t = 1 reaches here only when the target exceeds what finite
        // noise allows; interference-limited cases were caught above.
        return Err(Error::UnreachableTarget {
            target_db,
            ub_db: f64::INFINITY,
        });
    }
    Ok(sigma2_w)
}
