//! Batch front end for the SU-MMIMO link simulator.
//!
//! Subcommands: `sweep` runs a BER sweep from a config file, `sinr-surface`
//! exports closed-form SINR grids, `histogram` collects the LLR Gaussianity
//! diagnostics, and `selftest` runs a quick oracle suite. Exit code is
//! nonzero when any sweep point fails or a selftest check does not pass.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sumimo::config::SimulationConfig;
use sumimo::engine::{run_histogram, run_sweep};
use sumimo::report::write_surface_csv;
use sumimo::sinr::{export_surface, Regime, SurfaceSpec};

#[derive(Parser)]
#[command(name = "sumimo", about = "SU-MMIMO link-level simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Per-key overrides, e.g. --set n_t=16.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn build(&self) -> Result<SimulationConfig, sumimo::Error> {
        let mut cfg = match &self.config {
            Some(path) => SimulationConfig::from_file(path)?,
            None => SimulationConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                sumimo::Error::Config(format!("--set {kv}: expected KEY=VALUE"))
            })?;
            cfg.set(k.trim(), v)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(workers) = self.workers {
            cfg.workers = workers;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured BER sweep and persist ber.csv / ber.json /
    /// curve_*.dat.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Export a closed-form SINR surface over (N_t, antenna).
    SinrSurface {
        /// Regime: correlated-before, correlated-after, precoded-before,
        /// precoded-after.
        #[arg(long)]
        regime: String,
        #[arg(long, default_value_t = 1024)]
        n_tot: usize,
        #[arg(long, default_value_t = 2)]
        n_rt: usize,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma2_h: f64,
        /// Noise variance per dimension; 0 exports the upper bound.
        #[arg(long, default_value_t = 0.0)]
        sigma2_w: f64,
        #[arg(long, default_value_t = 2)]
        nt_min: usize,
        #[arg(long, default_value_t = 512)]
        nt_max: usize,
        /// Output CSV path.
        #[arg(long, default_value = "sinr_surface.csv")]
        out: PathBuf,
    },
    /// Run frames at one operating point and emit LLR histograms.
    Histogram {
        #[command(flatten)]
        config: ConfigArgs,
        /// Operating point in dB on the calibration regime's scale.
        #[arg(long)]
        target_db: f64,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the built-in oracle checks.
    Selftest,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Sweep { config, out } => {
            let cfg = match config.build() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run_sweep(&cfg, Some(&out)) {
                Ok(report) => {
                    for p in &report.points {
                        match (&p.record, &p.error) {
                            (Some(r), _) => println!(
                                "{:7.3} dB: BER {:.4e} empirical, {:.4e} semi-analytic ({} frames)",
                                r.sinr_db, r.ber_empirical, r.ber_semianalytic, r.frames
                            ),
                            (_, Some(e)) => eprintln!("{:7.3} dB: FAILED: {e}", p.target_db),
                            _ => {}
                        }
                    }
                    println!("results written to {}", out.display());
                    if report.has_failures() {
                        ExitCode::FAILURE
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::SinrSurface {
            regime,
            n_tot,
            n_rt,
            rho,
            sigma2_h,
            sigma2_w,
            nt_min,
            nt_max,
            out,
        } => {
            let regime = match regime.as_str() {
                "correlated-before" => Regime::CorrelatedBefore,
                "correlated-after" => Regime::CorrelatedAfter,
                "precoded-before" => Regime::PrecodedBefore,
                "precoded-after" => Regime::PrecodedAfter,
                other => {
                    eprintln!("error: unknown regime {other}");
                    return ExitCode::FAILURE;
                }
            };
            let spec = SurfaceSpec {
                n_tot,
                n_rt,
                rho,
                sigma2_h,
                sigma2_w,
                nt_min,
                nt_max,
            };
            match export_surface(&spec, regime).and_then(|recs| {
                write_surface_csv(&out, &recs).map(|()| recs.len())
            }) {
                Ok(n) => {
                    println!("{n} rows written to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Histogram {
            config,
            target_db,
            bins,
            out,
        } => {
            let cfg = match config.build() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run_histogram(&cfg, target_db, bins, Some(&out)) {
                Ok(report) => {
                    println!(
                        "pooled over {} values: mean {:.4}, skewness {:.4}, excess kurtosis {:.4}",
                        report.pooled.count,
                        report.pooled.mean,
                        report.pooled.skewness,
                        report.pooled.excess_kurtosis
                    );
                    println!(
                        "exchange moments (log-ratio): prior mean {:.4} var {:.4} vs extrinsic mean {:.4} var {:.4}",
                        report.mean_prior_mean,
                        report.mean_prior_var,
                        report.mean_extrinsic_mean,
                        report.mean_extrinsic_var
                    );
                    println!("results written to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Selftest => selftest(),
    }
}

fn fail(e: &sumimo::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::FAILURE
}

fn selftest() -> ExitCode {
    use nalgebra::DVector;
    use num_complex::Complex64;
    use sumimo::codes::{build_trellis, make_interleaver, rsc_encode};
    use sumimo::precoder::{autocorrelation_sequence, build_precoding_matrix, levinson_durbin};
    use sumimo::sinr::{sinr_precoded_ub, to_db};

    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!("{} {name}{}", if pass { "PASS" } else { "FAIL" }, detail);
        ok &= pass;
    };

    let t = build_trellis();
    let impulse = {
        let mut input = vec![0u8; 8];
        input[0] = 1;
        let coded = rsc_encode(&input, &t);
        let parity: Vec<u8> = coded.iter().skip(1).step_by(2).copied().collect();
        parity == vec![1, 1, 1, 0, 1, 1, 0, 1]
    };
    check("trellis impulse response", impulse, String::new());

    let il = make_interleaver(257, 7).unwrap();
    let x: Vec<u32> = (0..257).collect();
    check(
        "interleaver round trip",
        il.unpermute(&il.permute(&x)) == x,
        String::new(),
    );

    let p = levinson_durbin(&autocorrelation_sequence(0.9, 0.5, 8)).unwrap();
    let lev = (p.coeffs[6][0] + 0.9).abs() < 1e-12 && (p.sigma2_z(5) - 0.095).abs() < 1e-12;
    check("prediction filter AR(1)", lev, String::new());

    let cfg = sumimo::channel::ChannelConfig {
        n_t: 50,
        n_r: 974,
        n_rt: 2,
        sigma2_h: 0.5,
        sigma2_w: 0.0,
        correlation_rho: 0.9,
        p_av: 2.0,
    };
    let p50 = levinson_durbin(&autocorrelation_sequence(0.9, 0.5, 50)).unwrap();
    let db = to_db(sinr_precoded_ub(&cfg, &p50, 50).unwrap());
    check(
        "precoded SINR bound anchor",
        (db - 18.6).abs() < 0.1,
        format!(" ({db:.2} dB)"),
    );

    // noiseless encode/decode round trip for both schemes
    let a: Vec<u8> = (0..64).map(|i| ((i * 13) % 5 < 2) as u8).collect();
    let il_s = make_interleaver(128, 3).unwrap();
    let frame = sumimo::sctc::sctc_encode(&a, &il_s, &t).unwrap();
    let eq = sumimo::channel::EqualizedFrame {
        y: frame.s.clone(),
        f: vec![1.0; 128],
        sigma2_u: vec![0.01; 128],
    };
    let dec = sumimo::sctc::sctc_decode(&eq, &il_s, &t, 2, Default::default()).unwrap();
    check("serial codec round trip", dec.bits == a, String::new());

    let il_p = make_interleaver(64, 5).unwrap();
    let frame = sumimo::pctc::pctc_encode(&a, &il_p, &t).unwrap();
    let eq = sumimo::channel::EqualizedFrame {
        y: frame.s.clone(),
        f: vec![1.0; 128],
        sigma2_u: vec![0.01; 128],
    };
    let dec = sumimo::pctc::pctc_decode(&eq, &il_p, &t, 2, Default::default()).unwrap();
    check("parallel codec round trip", dec.bits == a, String::new());

    let llr = vec![4.0; 32];
    let bits = vec![0u8; 32];
    let (p_f, _) = sumimo::ber::semi_analytic_frame_ber(&llr, &bits).unwrap();
    check(
        "semi-analytic erfc anchor",
        (p_f - 0.078_649_6).abs() < 1e-6,
        format!(" (P_f = {p_f:.6})"),
    );

    let b = build_precoding_matrix(&levinson_durbin(&autocorrelation_sequence(0.9, 1.0, 3)).unwrap());
    let s = DVector::from_element(3, Complex64::new(1.0, 1.0));
    let det_is_unit = (b.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-12;
    check(
        "precoding matrix determinant",
        det_is_unit && (b * s).len() == 3,
        String::new(),
    );

    if ok {
        println!("selftest: all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("selftest: FAILURES present");
        ExitCode::FAILURE
    }
}
