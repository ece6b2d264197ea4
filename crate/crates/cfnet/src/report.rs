//! CSV and chart output of experiment rows.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiment::{ExperimentKind, ResultRow};
use crate::svg::{LineChart, Series};

pub const CSV_HEADER: &str = "kind,K,beta,M,rho_dB,precoder,solver,mean_rate,rel_error,time_s,unstable_flag,seed";

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

fn fmt_beta(b: f64) -> String {
    format!("beta={b}")
}

/// Groups rows into series keyed by label, x ascending within a series.
fn series_by<F, X, Y>(rows: &[ResultRow], keep: F, label: impl Fn(&ResultRow) -> String, x: X, y: Y) -> Vec<Series>
where
    F: Fn(&ResultRow) -> bool,
    X: Fn(&ResultRow) -> f64,
    Y: Fn(&ResultRow) -> Option<f64>,
{
    let mut groups: BTreeMap<(usize, String), Vec<(f64, f64)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for r in rows.iter().filter(|r| keep(r)) {
        let Some(yv) = y(r) else { continue };
        let l = label(r);
        let pos = match order.iter().position(|o| *o == l) {
            Some(p) => p,
            None => {
                order.push(l.clone());
                order.len() - 1
            }
        };
        groups.entry((pos, l)).or_default().push((x(r), yv));
    }
    groups
        .into_iter()
        .map(|((_, label), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label, points }
        })
        .collect()
}

/// Charts for one figure family as `(file stem suffix, chart)`.
pub fn charts(kind: ExperimentKind, rows: &[ResultRow]) -> Vec<(&'static str, LineChart)> {
    let multi_m = rows.iter().any(|r| r.m != rows[0].m);
    let tag = move |r: &ResultRow| {
        if multi_m {
            format!("{} M={}", fmt_beta(r.beta), r.m)
        } else {
            fmt_beta(r.beta)
        }
    };
    let k = |r: &ResultRow| r.k as f64;
    let rel = |r: &ResultRow| r.rel_error;
    let solver_label = |r: &ResultRow| -> String {
        match r.solver.as_str() {
            "mc" => "Monte Carlo",
            "svt" => "SERE (SVT)",
            "original" => "SERE (original)",
            other => other,
        }
        .to_string()
    };
    match kind {
        ExperimentKind::RateVsK => vec![(
            "",
            LineChart::new("Central-subnetwork rate vs K", "K", "rate [bit/s/Hz]").with_series(series_by(
                rows,
                |_| true,
                |r| format!("{} {}", solver_label(r), tag(r)),
                k,
                |r| Some(r.mean_rate),
            )),
        )],
        ExperimentKind::ErrorAndTiming => vec![
            (
                "",
                LineChart::new("Relative error vs K", "K", "relative error").with_series(series_by(
                    rows,
                    |r| r.solver == "svt",
                    tag,
                    k,
                    rel,
                )),
            ),
            (
                "_time",
                LineChart::new("Wall time vs K", "K", "time [s]")
                    .log_y()
                    .with_series(series_by(
                        rows,
                        |_| true,
                        |r| format!("{} {}", solver_label(r), tag(r)),
                        k,
                        |r| r.time_s.filter(|&t| t > 0.0),
                    )),
            ),
        ],
        ExperimentKind::SvtVsSnr => vec![(
            "",
            LineChart::new("Relative error vs SNR", "rho [dB]", "relative error")
                .log_y()
                .with_series(series_by(
                    rows,
                    |r| r.solver != "mc",
                    |r| format!("{} K={} {}", solver_label(r), r.k, tag(r)),
                    |r| r.rho_db.unwrap_or(f64::NAN),
                    |r| r.rel_error.filter(|&e| e > 0.0),
                )),
        )],
        ExperimentKind::ZfError => vec![(
            "",
            LineChart::new("ZF relative error vs K", "K", "relative error").with_series(series_by(
                rows,
                |r| r.solver == "svt",
                tag,
                k,
                rel,
            )),
        )],
    }
}

/// Writes `<figure>.csv` and one SVG per chart; returns the written paths.
pub fn write_outputs(kind: ExperimentKind, rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let stem = kind.figure();
    let csv_path = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv_path, csv_string(rows)?).map_err(|e| HarnessError::io(&csv_path, e))?;
    let mut written = vec![csv_path];
    if rows.is_empty() {
        return Ok(written);
    }
    for (suffix, chart) in charts(kind, rows) {
        let path = dir.join(format!("{stem}{suffix}.svg"));
        std::fs::write(&path, chart.render()).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
