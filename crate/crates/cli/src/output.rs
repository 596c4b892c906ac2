//! Tables and figure data.

use std::io::Write;

use num_complex::Complex64;
use resonax_core::potentials::{eval, Domain};
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::error::Result;
use crate::run::RunReport;

/// Samples of the figure grid.
pub const FIGURE_POINTS: usize = 400;

/// Header of the CSV table: `M`, each parameter as `_re`/`_im`, then the
/// state columns.
pub fn csv_header(params: &[String]) -> Vec<String> {
    let mut h = vec!["M".to_string()];
    for p in params {
        h.push(format!("{p}_re"));
        h.push(format!("{p}_im"));
    }
    h.extend(["n", "E", "Gamma", "converged_digits"].map(String::from));
    h
}

/// CSV: one row per (M, state), sectors one after another. JSON: the whole
/// report. Floats use the shortest decimal that reads back to the same bits.
pub fn emit_table<W: Write>(report: &RunReport, format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let params = report.sectors.first().map(|s| s.params.clone()).unwrap_or_default();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(csv_header(&params))?;
            for s in &report.sectors {
                for r in &s.resonances {
                    let mut rec = vec![r.m.to_string()];
                    for z in &r.params {
                        rec.push(z[0].to_string());
                        rec.push(z[1].to_string());
                    }
                    rec.push(r.index.to_string());
                    rec.push(r.e_text.clone().unwrap_or_else(|| r.e.to_string()));
                    rec.push(r.gamma_text.clone().unwrap_or_else(|| r.gamma.to_string()));
                    rec.push(r.converged_digits.map(|d| d.to_string()).unwrap_or_default());
                    w.write_record(&rec)?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub sectors: Vec<FigureSector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureSector {
    pub sector: String,
    /// `[x, V(x)]` on a uniform grid.
    pub samples: Vec<[f64; 2]>,
    pub segments: Vec<Segment>,
}

/// A resonance drawn as a horizontal line at `Re ε` between the turning
/// points of the well it sits in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub sector: String,
    pub n: usize,
    pub height: f64,
    pub x_left: f64,
    pub x_right: f64,
}

/// Potential samples per sector plus one segment per stabilized resonance
/// of the last rung. The grid is `[−X, X]` on the full line and `(0, X]` on
/// the half line, `X` from `output.figure_range` (default 10 and 20).
pub fn figure_data(cfg: &RunConfig, report: &RunReport) -> Result<FigureData> {
    let problems = cfg.problems::<f64>()?;
    let last = *cfg.ladder.m.last().expect("validated ladder");
    let n = FIGURE_POINTS;
    let mut sectors = Vec::new();
    for p in &problems {
        let half = p.potential.domain() == Domain::HalfLine;
        let range = cfg.output.figure_range.unwrap_or(if half { 20.0 } else { 10.0 });
        let xs: Vec<f64> = if half {
            (1..=n).map(|i| range * i as f64 / n as f64).collect()
        } else {
            (0..=n).map(|i| range * (2 * i) as f64 / n as f64 - range).collect()
        };
        let samples = xs
            .iter()
            .map(|&x| Ok([x, eval(&p.potential, Complex64::new(x, 0.0))?.re]))
            .collect::<Result<Vec<_>>>()?;
        let well = well_bottom(&samples, half);
        let segments = report
            .sector(&p.label)
            .map(|s| {
                s.resonances_at(last)
                    .map(|r| {
                        let (x_left, x_right) = turning_points(&samples, well, r.e);
                        Segment {
                            sector: p.label.clone(),
                            n: r.index,
                            height: r.e,
                            x_left,
                            x_right,
                        }
                    })
                    .collect()
            })
            .unwrap_or_default();
        sectors.push(FigureSector {
            sector: p.label.clone(),
            samples,
            segments,
        });
    }
    Ok(FigureData { sectors })
}

pub fn emit_figure_data<W: Write>(cfg: &RunConfig, report: &RunReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &figure_data(cfg, report)?)?;
    out.write_all(b"\n")?;
    Ok(())
}

// Sample index of the trapping well: the origin on the full line, the
// lowest point inside the barrier on the half line.
fn well_bottom(samples: &[[f64; 2]], half: bool) -> usize {
    if !half {
        return samples.len() / 2;
    }
    let peak = (0..samples.len())
        .max_by(|&a, &b| samples[a][1].total_cmp(&samples[b][1]))
        .unwrap_or(0);
    (0..=peak)
        .min_by(|&a, &b| samples[a][1].total_cmp(&samples[b][1]))
        .unwrap_or(0)
}

fn turning_points(samples: &[[f64; 2]], well: usize, e: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (well, well);
    while lo > 0 && samples[lo - 1][1] <= e {
        lo -= 1;
    }
    while hi + 1 < samples.len() && samples[hi + 1][1] <= e {
        hi += 1;
    }
    (samples[lo][0], samples[hi][0])
}
