//! Deterministic result writers: CSV, JSON and gnuplot-style `.dat` files.
//!
//! Floats are written with Rust's shortest round-trip formatting and rows
//! follow frame/point order, so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::engine::{HistogramReport, SweepReport};
use crate::sinr::SurfaceRecord;
use crate::Result;

/// `ber.csv`: one row per successful sweep point.
pub fn write_ber_csv(path: &Path, report: &SweepReport) -> Result<()> {
    let mut out = String::from(
        "sinr_db,ber_empirical,ber_semianalytic,frames,bit_errors,bits_counted,mean_L_d2\n",
    );
    for p in &report.points {
        if let Some(r) = &p.record {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.sinr_db,
                r.ber_empirical,
                r.ber_semianalytic,
                r.frames,
                r.bit_errors,
                r.bits_counted,
                r.mean_l_d2
            )
            .expect("string write");
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Pretty-printed JSON for any serializable report.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serialize report");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Two-column `.dat` files per curve, gnuplot-compatible.
pub fn write_curves(dir: &Path, report: &SweepReport) -> Result<()> {
    let mut empirical = String::new();
    let mut semi = String::new();
    for p in &report.points {
        if let Some(r) = &p.record {
            writeln!(empirical, "{} {}", r.sinr_db, r.ber_empirical).expect("string write");
            writeln!(semi, "{} {}", r.sinr_db, r.ber_semianalytic).expect("string write");
        }
    }
    std::fs::write(dir.join("curve_empirical.dat"), empirical)?;
    std::fs::write(dir.join("curve_semianalytic.dat"), semi)?;
    Ok(())
}

/// SINR surface export.
pub fn write_surface_csv(path: &Path, records: &[SurfaceRecord]) -> Result<()> {
    let mut out = String::from("regime,N_tot,N_t,N_r,N_rt,rho,antenna_i,sinr_db,is_ub\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.regime.as_str(),
            r.n_tot,
            r.n_t,
            r.n_r,
            r.n_rt,
            r.rho,
            r.antenna_i,
            r.sinr_db,
            r.is_ub
        )
        .expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Histogram bins, one row per bin per frame; the pooled histogram uses
/// `frame_id = -1`.
pub fn write_histogram_csv(path: &Path, report: &HistogramReport) -> Result<()> {
    let mut out = String::from("bin_left,bin_right,density,frame_id\n");
    let emit = |h: &crate::ber::Histogram, id: i64, out: &mut String| {
        for i in 0..h.bin_left.len() {
            writeln!(out, "{},{},{},{}", h.bin_left[i], h.bin_right[i], h.density[i], id)
                .expect("string write");
        }
    };
    emit(&report.pooled, -1, &mut out);
    for f in &report.frames {
        if let Some(h) = &f.histogram {
            emit(h, f.frame as i64, &mut out);
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}
