//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with its runtime (`cargo test -p sumimo --test acceptance --
//! --nocapture` shows them). Tolerances are pinned in the assertions.

mod common;

use std::time::Instant;

use common::{max_pair_diff, oracle_channel_gammas, oracle_siso, pairs_of};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use sumimo::channel::{
    draw_channel, effective_noise_variance, effective_noise_variance_correlated,
    effective_noise_variance_precoded, ChannelConfig, EqualizedFrame,
};
use sumimo::codes::{build_trellis, make_interleaver};
use sumimo::config::SimulationConfig;
use sumimo::engine::{run_histogram, run_sweep};
use sumimo::pctc::{constituent_pass, pctc_decode, pctc_encode};
use sumimo::precoder::{autocorrelation_sequence, build_precoding_matrix, levinson_durbin};
use sumimo::rng::{substream, Purpose};
use sumimo::sctc::{bcjr_inner, bcjr_outer, sctc_encode, GammaForm, SoftSequence};
use sumimo::sinr::{sinr_correlated_combined_ub, sinr_correlated_ub, sinr_precoded_ub, to_db};

fn verdict(id: usize, name: &str, pass: bool, started: Instant, detail: &str) {
    println!(
        "acceptance {id} ({name}): {} [{:.2} s] {detail}",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn criterion_1_precoded_sinr_anchors() {
    let t0 = Instant::now();
    let mk = |n_t: usize| ChannelConfig {
        n_t,
        n_r: 1024 - n_t,
        n_rt: 2,
        sigma2_h: 0.5,
        sigma2_w: 0.0,
        correlation_rho: 0.9,
        p_av: 2.0,
    };
    let p50 = levinson_durbin(&autocorrelation_sequence(0.9, 0.5, 50)).unwrap();
    let p512 = levinson_durbin(&autocorrelation_sequence(0.9, 0.5, 512)).unwrap();
    let db50 = to_db(sinr_precoded_ub(&mk(50), &p50, 50).unwrap());
    let db512 = to_db(sinr_precoded_ub(&mk(512), &p512, 512).unwrap());
    let pass = (db50 - 18.6).abs() <= 0.1 && (db512 - 6.0).abs() <= 0.1;
    verdict(
        1,
        "precoded SINR anchors",
        pass,
        t0,
        &format!("N_t=i=50: {db50:.3} dB (want 18.6±0.1); N_t=i=512: {db512:.3} dB (want 6.0±0.1)"),
    );
}

#[test]
fn criterion_2_moment_oracle_equivalence() {
    let t0 = Instant::now();
    let n = 100_000u64;
    let cfg = ChannelConfig {
        n_t: 8,
        n_r: 16,
        n_rt: 2,
        sigma2_h: 0.5,
        sigma2_w: 0.7,
        correlation_rho: 0.9,
        p_av: 2.0,
    };
    let i = 3usize; // probe antenna, 1-based
    let j = 5usize;
    let predictor =
        levinson_durbin(&autocorrelation_sequence(cfg.correlation_rho, cfg.sigma2_h, cfg.n_t))
            .unwrap();
    let b = build_precoding_matrix(&predictor);

    // accumulators for complex powers / gains
    let mut f2 = 0.0; // F_{k,i,i}^2
    let mut f1 = 0.0; // F_{k,i,i}
    let mut fij = 0.0; // |F_{k,i,j}|^2
    let mut v2 = 0.0; // |V_{k,i}|^2
    let mut iv_before = 0.0; // |I + V|^2, single transmission
    let mut u_after = 0.0; // |U_i|^2 after combining
    let mut fc2 = 0.0; // combined gain squared
    let mut zf2 = 0.0;
    let mut zfij = 0.0;
    let mut zv2 = 0.0;
    let mut zu_after = 0.0;

    let seed = 1001u64;
    for r in 0..n {
        let mut sym_rng = substream(seed, Purpose::DataBits, r, 0, 0);
        let s = DVector::from_fn(cfg.n_t, |_, _| {
            Complex64::new(
                1.0 - 2.0 * f64::from(sym_rng.random::<bool>()),
                1.0 - 2.0 * f64::from(sym_rng.random::<bool>()),
            )
        });
        let mut y_comb = Complex64::new(0.0, 0.0);
        let mut f_comb = 0.0;
        let mut zy_comb = Complex64::new(0.0, 0.0);
        let mut zf_comb = 0.0;
        for k in 0..cfg.n_rt as u64 {
            let h = draw_channel(&cfg, &mut substream(seed, Purpose::Channel, r, 0, k));
            let mut w_rng = substream(seed, Purpose::Noise, r, 0, k);
            let w = DVector::from_fn(cfg.n_r, |_, _| {
                sumimo::channel::complex_gaussian(&mut w_rng, cfg.sigma2_w)
            });
            let rx = &h * &s + &w;
            let mf = h.ad_mul(&rx);
            let f_ii = h.column(i - 1).norm_squared();
            y_comb += mf[(i - 1, 0)];
            f_comb += f_ii;

            let z = &h * &b;
            let zrx = &z * &s + &w;
            let zmf = z.ad_mul(&zrx);
            let zf_ii = z.column(i - 1).norm_squared();
            zy_comb += zmf[(i - 1, 0)];
            zf_comb += zf_ii;

            if k == 0 {
                f2 += f_ii * f_ii;
                f1 += f_ii;
                let cross = h.column(i - 1).dotc(&h.column(j - 1));
                fij += cross.norm_sqr();
                let vi = h.column(i - 1).dotc(&w);
                v2 += vi.norm_sqr();
                iv_before += (mf[(i - 1, 0)] - f_ii * s[i - 1]).norm_sqr();

                zf2 += zf_ii * zf_ii;
                let zcross = z.column(i - 1).dotc(&z.column(j - 1));
                zfij += zcross.norm_sqr();
                let zvi = z.column(i - 1).dotc(&w);
                zv2 += zvi.norm_sqr();
            }
        }
        let n_rt = cfg.n_rt as f64;
        u_after += (y_comb / n_rt - f_comb / n_rt * s[i - 1]).norm_sqr();
        fc2 += (f_comb / n_rt) * (f_comb / n_rt);
        zu_after += (zy_comb / n_rt - zf_comb / n_rt * s[i - 1]).norm_sqr();
    }
    let nf = n as f64;
    let n_r = cfg.n_r as f64;
    let n_rt = cfg.n_rt as f64;
    let s2h = cfg.sigma2_h;
    let s4 = s2h * s2h;
    let r_ij = cfg.autocorrelation((j - i) as i64);

    let mut worst: f64 = 0.0;
    let mut fails = Vec::new();
    let mut check = |name: &str, sample: f64, expect: f64| {
        let rel = (sample / expect - 1.0).abs();
        worst = worst.max(rel);
        if rel > 0.02 {
            fails.push(format!("{name}: {sample:.5} vs {expect:.5} ({:.2}%)", rel * 100.0));
        }
    };
    check("E[F_ii^2]", f2 / nf, 4.0 * s4 * n_r * (n_r + 1.0));
    check("E[F_ii]", f1 / nf, 2.0 * n_r * s2h);
    check("E|F_ij|^2", fij / nf, 4.0 * n_r * (s4 + n_r * r_ij * r_ij));
    check("E|V_i|^2", v2 / nf, 4.0 * n_r * s2h * cfg.sigma2_w);
    check(
        "E|I+V|^2 before",
        iv_before / nf,
        2.0 * effective_noise_variance_correlated(&cfg, i, false).unwrap(),
    );
    check(
        "E|U_i|^2 after",
        u_after / nf,
        2.0 * effective_noise_variance_correlated(&cfg, i, true).unwrap(),
    );
    check(
        "E[F_i^2] combined",
        fc2 / nf,
        4.0 * n_r * s4 / n_rt * (1.0 + n_r * n_rt),
    );
    let sz = predictor.sigma2_z_all();
    check("precoded E[F_ii^2]", zf2 / nf, 4.0 * n_r * (n_r + 1.0) * sz[i - 1] * sz[i - 1]);
    check("precoded E|F_ij|^2", zfij / nf, 4.0 * n_r * sz[i - 1] * sz[j - 1]);
    check("precoded E|V_i|^2", zv2 / nf, 4.0 * n_r * sz[i - 1] * cfg.sigma2_w);
    check(
        "precoded E|U_i|^2 after",
        zu_after / nf,
        2.0 * effective_noise_variance_precoded(&cfg, sz, i, true).unwrap(),
    );

    // white-channel sigma2_U on its own configuration
    {
        let wcfg = ChannelConfig {
            n_t: 4,
            n_r: 8,
            n_rt: 2,
            sigma2_h: 0.5,
            sigma2_w: 1.0,
            correlation_rho: 0.0,
            p_av: 2.0,
        };
        let mut acc = 0.0;
        for r in 0..n {
            let mut sym_rng = substream(seed + 1, Purpose::DataBits, r, 0, 0);
            let s = DVector::from_fn(wcfg.n_t, |_, _| {
                Complex64::new(
                    1.0 - 2.0 * f64::from(sym_rng.random::<bool>()),
                    1.0 - 2.0 * f64::from(sym_rng.random::<bool>()),
                )
            });
            let mut y = Complex64::new(0.0, 0.0);
            let mut f = 0.0;
            for k in 0..wcfg.n_rt as u64 {
                let h = draw_channel(&wcfg, &mut substream(seed + 1, Purpose::Channel, r, 0, k));
                let mut w_rng = substream(seed + 1, Purpose::Noise, r, 0, k);
                let w = DVector::from_fn(wcfg.n_r, |_, _| {
                    sumimo::channel::complex_gaussian(&mut w_rng, wcfg.sigma2_w)
                });
                let rx = &h * &s + &w;
                y += h.ad_mul(&rx)[(1, 0)];
                f += h.column(1).norm_squared();
            }
            let n_rt = wcfg.n_rt as f64;
            acc += (y / n_rt - f / n_rt * s[1]).norm_sqr();
        }
        check(
            "white sigma2_U",
            acc / nf,
            2.0 * effective_noise_variance(&wcfg),
        );
    }

    let pass = fails.is_empty();
    verdict(
        2,
        "moment-oracle equivalence",
        pass,
        t0,
        &format!(
            "12 moments at 1e5 realizations, worst deviation {:.3}%{}",
            worst * 100.0,
            if fails.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", fails.join("; "))
            }
        ),
    );
}

#[test]
fn criterion_3_bcjr_exhaustive_equivalence() {
    let t0 = Instant::now();
    const L_D1: usize = 4;
    const L_D: usize = 8;
    let t = build_trellis();
    let il_s = make_interleaver(L_D, 211).unwrap();
    let il_p = make_interleaver(L_D1, 223).unwrap();
    let mut worst = 0.0f64;

    for r in 0..100u64 {
        let word: Vec<u8> = (0..L_D1).map(|b| ((r as usize % 16) >> b & 1) as u8).collect();
        let mut rng = substream(2001, Purpose::Noise, r, 0, 0);
        let mut observe = |s: &[Complex64]| -> EqualizedFrame {
            let len = s.len();
            let f: Vec<f64> = (0..len).map(|_| 0.5 + 1.5 * rng.random::<f64>()).collect();
            let v: Vec<f64> = (0..len).map(|_| 0.3 + 1.2 * rng.random::<f64>()).collect();
            let y = (0..len)
                .map(|i| {
                    let noise =
                        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                    f[i] * s[i] + 1.2 * noise
                })
                .collect();
            EqualizedFrame { y, f, sigma2_u: v }
        };

        // inner decoder
        let frame = sctc_encode(&word, &il_s, &t).unwrap();
        let eq = observe(&frame.s);
        let mut prior = SoftSequence::uniform(L_D);
        for k in 0..L_D {
            let p = 0.05 + 0.9 * ((r as usize * 7 + k * 13) % 17) as f64 / 17.0;
            prior.plus[k] = p;
            prior.minus[k] = 1.0 - p;
        }
        let ext = bcjr_inner(&eq, &prior, &t, GammaForm::GainScaled).unwrap();
        let (gs, gp) = oracle_channel_gammas(&eq.y, &eq.f, &eq.sigma2_u);
        let oracle = oracle_siso(&gs, &gp, &pairs_of(&prior));
        worst = worst.max(max_pair_diff(&pairs_of(&ext), &oracle.ext_sys_channel));

        // outer decoder fed by the inner extrinsics
        let (ext_b, app) = bcjr_outer(&ext, &il_s, &t).unwrap();
        let dp = il_s.unpermute(&ext.plus);
        let dm = il_s.unpermute(&ext.minus);
        let ogs: Vec<[f64; 2]> = (0..L_D1).map(|k| [dp[2 * k], dm[2 * k]]).collect();
        let ogp: Vec<[f64; 2]> = (0..L_D1).map(|k| [dp[2 * k + 1], dm[2 * k + 1]]).collect();
        let outer = oracle_siso(&ogs, &ogp, &[[0.5f64; 2]; L_D1]);
        let got_even: Vec<[f64; 2]> =
            (0..L_D1).map(|k| [ext_b.plus[2 * k], ext_b.minus[2 * k]]).collect();
        let got_odd: Vec<[f64; 2]> =
            (0..L_D1).map(|k| [ext_b.plus[2 * k + 1], ext_b.minus[2 * k + 1]]).collect();
        worst = worst.max(max_pair_diff(&got_even, &outer.ext_sys));
        worst = worst.max(max_pair_diff(&got_odd, &outer.ext_par));
        worst = worst.max(max_pair_diff(&pairs_of(&app), &outer.ext_sys_channel));

        // parallel scheme: both constituent passes and the one-iteration APP
        let frame = pctc_encode(&word, &il_p, &t).unwrap();
        let eq = observe(&frame.s);
        let (half1, half2) = eq.split_at(L_D1);
        let uniform = SoftSequence::uniform(L_D1);
        let o1 = constituent_pass(&half1, &uniform, &t, GammaForm::GainScaled).unwrap();
        let (gs1, gp1) = oracle_channel_gammas(&half1.y, &half1.f, &half1.sigma2_u);
        let or1 = oracle_siso(&gs1, &gp1, &pairs_of(&uniform));
        worst = worst.max(max_pair_diff(&pairs_of(&o1.ext), &or1.ext_sys));

        let prior2 = SoftSequence {
            plus: il_p.unpermute(&o1.ext.plus),
            minus: il_p.unpermute(&o1.ext.minus),
        };
        let o2 = constituent_pass(&half2, &prior2, &t, GammaForm::GainScaled).unwrap();
        let (gs2, gp2) = oracle_channel_gammas(&half2.y, &half2.f, &half2.sigma2_u);
        let oprior2: Vec<[f64; 2]> = (0..L_D1).map(|k| or1.ext_sys[il_p.pi(k)]).collect();
        let or2 = oracle_siso(&gs2, &gp2, &oprior2);
        worst = worst.max(max_pair_diff(&pairs_of(&o2.ext), &or2.ext_sys));

        let dec = pctc_decode(&eq, &il_p, &t, 1, GammaForm::GainScaled).unwrap();
        let norm = |p: [f64; 2]| [p[0] / (p[0] + p[1]), p[1] / (p[0] + p[1])];
        let oracle_app: Vec<[f64; 2]> = (0..L_D1)
            .map(|k| {
                let m = il_p.pi_inv(k);
                let a = norm(gs1[k]);
                let bmat = or1.ext_sys[k];
                let c = norm(gs2[m]);
                let d = or2.ext_sys[m];
                norm([
                    a[0] * bmat[0] * c[0] * d[0],
                    a[1] * bmat[1] * c[1] * d[1],
                ])
            })
            .collect();
        let dec_app: Vec<[f64; 2]> = dec
            .llr
            .iter()
            .map(|&l| {
                let e = (-l.abs()).exp();
                let big = 1.0 / (1.0 + e);
                if l >= 0.0 {
                    [big, 1.0 - big]
                } else {
                    [1.0 - big, big]
                }
            })
            .collect();
        worst = worst.max(max_pair_diff(&dec_app, &oracle_app));
    }
    verdict(
        3,
        "BCJR exhaustive MAP equivalence",
        worst < 1e-9,
        t0,
        &format!("100 realizations x 16 data words, max probability deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_4_levinson_exactness() {
    let t0 = Instant::now();
    let sigma2_h = 0.5;
    let mut pass = true;
    let mut detail = String::new();
    for n_t in [8usize, 512] {
        let p = levinson_durbin(&autocorrelation_sequence(0.9, sigma2_h, n_t)).unwrap();
        for (row_idx, row) in p.coeffs.iter().enumerate() {
            if (row[0] + 0.9).abs() > 1e-12 {
                pass = false;
                detail = format!("a[{},1] = {}", row_idx + 1, row[0]);
            }
            for &c in row.iter().skip(1) {
                if c.abs() > 1e-12 {
                    pass = false;
                    detail = format!("higher coefficient {c} in row {}", row_idx + 1);
                }
            }
        }
        if (p.sigma2_z(1) - sigma2_h).abs() > 1e-12 {
            pass = false;
        }
        for i in 2..=n_t {
            if (p.sigma2_z(i) - 0.19 * sigma2_h).abs() > 1e-12 {
                pass = false;
                detail = format!("sigma2_z[{i}] = {}", p.sigma2_z(i));
            }
        }
    }
    verdict(
        4,
        "Levinson exactness on AR(1)",
        pass,
        t0,
        &format!("orders up to 511; a1 = -0.9, higher = 0, error vars 0.19 sigma2_h {detail}"),
    );
}

#[test]
fn criterion_5_desk_scale_ber() {
    let t0 = Instant::now();

    // (a) N_tot = 2: retransmissions buy diversity at fixed SINR per bit.
    let mut bers = Vec::new();
    for n_rt in [1usize, 2, 4] {
        let cfg = SimulationConfig {
            n_tot: 2,
            n_t: 1,
            n_rt,
            l_d1: 512,
            frames: 2000,
            seed: 11,
            sinr_sweep_db: vec![5.0],
            ..SimulationConfig::default()
        };
        let report = run_sweep(&cfg, None).unwrap();
        assert!(!report.has_failures());
        bers.push(report.points[0].record.as_ref().unwrap().ber_empirical);
    }
    let part_a = bers[0] > bers[1] && bers[1] > bers[2];

    // (b) N_tot = 32 waterfall and the semi-analytic band.
    let n_r = 16.0f64;
    let n_t = 16.0f64;
    let ub_db = to_db(2.0 * 2.0 * (n_r + 1.0) / (n_t - 1.0)); // 6.56 dB
    let in_window_target = 4.0; // inside [UB - 3 dB, UB)
    assert!(in_window_target >= ub_db - 3.0 && in_window_target < ub_db);
    let cfg = SimulationConfig {
        n_tot: 32,
        n_t: 16,
        n_rt: 2,
        l_d1: 1024,
        frames: 2000,
        seed: 7,
        sinr_sweep_db: vec![0.5, 0.75, 1.0, 1.1, 1.25, in_window_target],
        ..SimulationConfig::default()
    };
    let report = run_sweep(&cfg, None).unwrap();
    assert!(!report.has_failures());
    let recs = report.records();
    let empirical: Vec<f64> = recs.iter().map(|r| r.ber_empirical).collect();
    let semi: Vec<f64> = recs.iter().map(|r| r.ber_semianalytic).collect();

    let waterfall_reached = *empirical.last().unwrap() <= 1e-3;
    let waterfall_spans = empirical[0] > 1e-2;
    let mut monotone = true;
    for w in 0..empirical.len() - 1 {
        let slack = 3.0 * (empirical[w].max(1e-9) * (1.0 - empirical[w])
            / recs[w].bits_counted as f64)
            .sqrt();
        if empirical[w + 1] > empirical[w] + slack {
            monotone = false;
        }
    }
    let mut band_points = 0;
    let mut band_ok = true;
    let mut worst_ratio = 1.0f64;
    for k in 0..empirical.len() {
        if empirical[k] >= 1e-4 && empirical[k] <= 1e-1 {
            band_points += 1;
            let ratio = semi[k] / empirical[k];
            worst_ratio = if (ratio - 1.0).abs() > (worst_ratio - 1.0).abs() {
                ratio
            } else {
                worst_ratio
            };
            if !(0.5..=2.0).contains(&ratio) {
                band_ok = false;
            }
        }
    }
    let part_b = waterfall_reached && waterfall_spans && monotone && band_ok && band_points >= 2;

    verdict(
        5,
        "desk-scale BER reproduction",
        part_a && part_b,
        t0,
        &format!(
            "(a) BER vs N_rt {{1,2,4}} at 5 dB: {:.3e} > {:.3e} > {:.3e}; \
             (b) waterfall at UB {ub_db:.2} dB window: BER({in_window_target} dB) = {:.1e} <= 1e-3, \
             {band_points} band points, worst semi/empirical ratio {worst_ratio:.2}",
            bers[0],
            bers[1],
            bers[2],
            empirical.last().unwrap()
        ),
    );
}

#[test]
fn criterion_6_correlated_regime_anchors() {
    let t0 = Instant::now();
    // After receiver combining, the correlated upper bound sits below 0 dB
    // at every antenna once N_t exceeds 5 (N_tot = 1024, N_rt = 2,
    // rho = 0.9). Before combining, the per-antenna minimum crosses zero
    // between N_t = 7 and 8; the combined surface is the one the decoder
    // operates on.
    let mut max_combined_db = f64::NEG_INFINITY;
    let mut combined_below_before = true;
    for n_t in 6..=512usize {
        let cfg = ChannelConfig {
            n_t,
            n_r: 1024 - n_t,
            n_rt: 2,
            sigma2_h: 0.5,
            sigma2_w: 0.0,
            correlation_rho: 0.9,
            p_av: 2.0,
        };
        for i in 1..=n_t {
            let after = sinr_correlated_combined_ub(&cfg, i).unwrap();
            max_combined_db = max_combined_db.max(to_db(after));
            let before = sinr_correlated_ub(&cfg, i).unwrap();
            if after > before * (1.0 + 1e-12) {
                combined_below_before = false;
            }
        }
    }
    let pass = max_combined_db < 0.0 && combined_below_before;
    verdict(
        6,
        "correlated-regime qualitative anchors",
        pass,
        t0,
        &format!(
            "max combined UB over N_t in 6..=512 and all antennas: {max_combined_db:.3} dB; \
             combined <= before antenna-wise: {combined_below_before}"
        ),
    );
}

#[test]
fn criterion_7_determinism_across_worker_counts() {
    let t0 = Instant::now();
    let base = SimulationConfig {
        n_tot: 8,
        n_t: 4,
        n_rt: 2,
        l_d1: 128,
        frames: 60,
        seed: 99,
        sinr_sweep_db: vec![2.0, 4.0],
        ..SimulationConfig::default()
    };
    let mut outputs = Vec::new();
    for workers in [1usize, 4, 8] {
        let cfg = SimulationConfig { workers, ..base.clone() };
        let dir = std::env::temp_dir().join(format!("sumimo_acceptance_det_{workers}"));
        run_sweep(&cfg, Some(&dir)).unwrap();
        outputs.push(std::fs::read(dir.join("ber.csv")).unwrap());
        std::fs::remove_dir_all(&dir).ok();
    }
    let pass = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    verdict(
        7,
        "byte-identical ber.csv at workers 1/4/8",
        pass,
        t0,
        &format!("{} bytes compared", outputs[0].len()),
    );
}

#[test]
fn criterion_8_gaussianity_diagnostics() {
    let t0 = Instant::now();
    let cfg = SimulationConfig {
        n_tot: 1024,
        n_t: 512,
        n_rt: 2,
        l_d1: 1024,
        frames: 128,
        seed: 12,
        workers: 2,
        ..SimulationConfig::default()
    };
    let dir = std::env::temp_dir().join("sumimo_acceptance_hist");
    let report = run_histogram(&cfg, 1.25, 60, Some(&dir)).unwrap();

    let enough_frames = report.frames.len() >= 100;
    let skew_ok = report.pooled.skewness.abs() < 0.5;
    // the fitted mean must move from frame to frame
    let means: Vec<f64> = report
        .frames
        .iter()
        .filter(|f| f.count >= 5)
        .map(|f| f.mean)
        .collect();
    let means_differ = means
        .iter()
        .any(|&m| (m - means[0]).abs() > 1e-6 * (1.0 + m.abs()));
    let csv = std::fs::read_to_string(dir.join("hist.csv")).unwrap();
    let pooled_rows = csv.lines().filter(|l| l.ends_with(",-1")).count();
    std::fs::remove_dir_all(&dir).ok();

    let pass = enough_frames && skew_ok && means_differ && pooled_rows == 60;
    verdict(
        8,
        "Gaussianity histogram diagnostics",
        pass,
        t0,
        &format!(
            "{} frames, pooled skewness {:.3} (|.| < 0.5), {} per-frame means, pooled bins {}",
            report.frames.len(),
            report.pooled.skewness,
            means.len(),
            pooled_rows
        ),
    );
}
