//! Ladder runs and the reports they produce.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use resonax_core::basis::ParamPoint;
use resonax_core::matelem::{build_matrix, trace_fn};
use resonax_core::optimizer::{first_rung, optimize, polish, stationary_points, SearchOptions};
use resonax_core::oracle::{gate_error, gate_points, GATE_DIM, GATE_TOL};
use resonax_core::spectrum::{eigenvalues, resonances_with_window, EigenSet};
use resonax_core::{ComplexExt, QuadDouble, Real};
use serde::{Deserialize, Serialize};

use crate::config::{Precision, Problem, RunConfig};
use crate::error::{CliError, Result};

/// Wall-clock time of a run. Never serialized and equal to every other
/// `Timing`, so reports of identical configs compare and print identically.
#[derive(Clone, Copy, Debug, Default)]
pub struct Timing(pub Duration);

impl PartialEq for Timing {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub potential: String,
    pub basis: String,
    pub precision: String,
    pub sectors: Vec<SectorReport>,
    #[serde(skip)]
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub sector: String,
    /// Names of the active parameters, in column order.
    pub params: Vec<String>,
    pub rungs: Vec<RungRecord>,
    /// Stabilized eigenvalues, one block per rung after the first.
    pub resonances: Vec<ResonanceRow>,
}

/// Complex numbers are stored as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungRecord {
    #[serde(rename = "M")]
    pub m: usize,
    pub params: Vec<[f64; 2]>,
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRow {
    #[serde(rename = "M")]
    pub m: usize,
    pub params: Vec<[f64; 2]>,
    /// Position by ascending `E` among this rung's stabilized eigenvalues.
    pub index: usize,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    /// `None` for single-rung solves, where nothing is known about drift.
    pub converged_digits: Option<f64>,
    /// Full-precision decimals of extended-tier runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_text: Option<String>,
}

impl RunReport {
    pub fn sector(&self, name: &str) -> Option<&SectorReport> {
        self.sectors.iter().find(|s| s.sector == name)
    }
}

impl SectorReport {
    pub fn rung(&self, m: usize) -> Option<&RungRecord> {
        self.rungs.iter().find(|r| r.m == m)
    }

    /// Stabilized rows reported at rung `m`.
    pub fn resonances_at(&self, m: usize) -> impl Iterator<Item = &ResonanceRow> {
        self.resonances.iter().filter(move |r| r.m == m)
    }
}

impl RungRecord {
    pub fn eigenvalues_c64(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|z| Complex64::new(z[0], z[1])).collect()
    }

    pub fn param(&self, k: usize) -> Complex64 {
        Complex64::new(self.params[k][0], self.params[k][1])
    }
}

/// Runs every rung of `cfg.ladder.M` in every sector and stabilizes.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let opts = cfg.search_options();
    let sectors = match cfg.precision {
        Precision::Double => ladder_sectors::<f64>(cfg, &opts, None)?,
        Precision::Extended { digits } => ladder_sectors::<QuadDouble>(cfg, &opts, Some(digits as usize))?,
    };
    Ok(RunReport {
        potential: cfg.problem.potential.clone(),
        basis: cfg.basis.family.clone(),
        precision: cfg.precision.label(),
        sectors,
        timing: Timing(start.elapsed()),
    })
}

/// One diagonalization at dimension `m`. Every eigenvalue becomes a row;
/// none of them carries a convergence estimate.
pub fn solve(cfg: &RunConfig, m: usize) -> Result<RunReport> {
    let mut one = cfg.clone();
    one.ladder.m = vec![m];
    one.validate()?;
    let mut report = run(&one)?;
    for s in &mut report.sectors {
        let rung = &s.rungs[0];
        s.resonances = rung
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(index, z)| ResonanceRow {
                m,
                params: rung.params.clone(),
                index,
                e: z[0],
                gamma: 0.0 - 2.0 * z[1],
                converged_digits: None,
                e_text: None,
                gamma_text: None,
            })
            .collect();
    }
    Ok(report)
}

fn rung_err(p: &Problem<impl Real>, m: usize) -> impl Fn(resonax_core::Error) -> CliError + '_ {
    move |source| CliError::Rung {
        sector: p.label.clone(),
        m,
        source,
    }
}

/// Optimal double-precision parameters for each rung, following one branch.
pub fn continuation(p: &Problem<f64>, ms: &[usize], opts: &SearchOptions) -> Result<Vec<ParamPoint<f64>>> {
    let mut out: Vec<ParamPoint<f64>> = Vec::with_capacity(ms.len());
    for &m in ms {
        let point = match out.last() {
            None => first_rung(&p.basis, &p.potential, m, opts),
            Some(prev) => trace_fn(&p.basis, &p.potential, m).and_then(|tf| optimize(&tf, Some(prev), opts)),
        }
        .map_err(rung_err(p, m))?;
        out.push(point);
    }
    Ok(out)
}

/// Matrix and eigenvalues at one rung. With `digits`, the double-precision
/// point is first polished to a stationary point in `T`.
fn rung<T: Real>(
    p: &Problem<T>,
    m: usize,
    start: &ParamPoint<f64>,
    opts: &SearchOptions,
    digits: Option<usize>,
) -> Result<EigenSet<T>> {
    let err = rung_err(p, m);
    let mut point = ParamPoint::<T>::from_c64(start);
    if let Some(d) = digits {
        let tf = trace_fn(&p.basis, &p.potential, m).map_err(&err)?;
        let fine = SearchOptions {
            newton_tol: 10f64.powi(-(d as i32)),
            ..*opts
        };
        point = polish(&tf, &point, &fine).map_err(&err)?.params;
    }
    let matrix = build_matrix(&p.basis, &p.potential, &point, m).map_err(&err)?;
    eigenvalues(&matrix).map_err(err)
}

fn ladder_sectors<T: Real>(cfg: &RunConfig, opts: &SearchOptions, digits: Option<usize>) -> Result<Vec<SectorReport>> {
    let coarse = cfg.problems::<f64>()?;
    let work = cfg.problems::<T>()?;
    let ms = &cfg.ladder.m;
    let mut out = Vec::new();
    for (pd, pw) in coarse.iter().zip(&work) {
        let points = continuation(pd, ms, opts)?;
        let sets = ms
            .iter()
            .zip(&points)
            .map(|(&m, start)| rung(pw, m, start, opts, digits))
            .collect::<Result<Vec<_>>>()?;
        out.push(sector_report(pw, &sets, cfg.ladder.tol, cfg.ladder.window, digits));
    }
    Ok(out)
}

fn pair<T: Real>(z: resonax_core::Cx<T>) -> [f64; 2] {
    let c = z.to_c64();
    [c.re, c.im]
}

fn param_pairs<T: Real>(p: &Problem<T>, point: &ParamPoint<T>) -> Vec<[f64; 2]> {
    p.basis
        .params()
        .iter()
        .map(|n| pair(point.get(*n).expect("active parameter")))
        .collect()
}

fn sector_report<T: Real>(
    p: &Problem<T>,
    sets: &[EigenSet<T>],
    tol: f64,
    window: f64,
    digits: Option<usize>,
) -> SectorReport {
    let rungs = sets
        .iter()
        .map(|s| RungRecord {
            m: s.m,
            params: param_pairs(p, &s.params),
            eigenvalues: s.eigenvalues.iter().map(|z| pair(*z)).collect(),
        })
        .collect();
    let mut rows = Vec::new();
    for k in 1..sets.len() {
        let params = param_pairs(p, &sets[k].params);
        for r in resonances_with_window(&sets[..=k], tol, window) {
            rows.push(ResonanceRow {
                m: sets[k].m,
                params: params.clone(),
                index: r.index,
                e: r.e.to_f64(),
                gamma: r.gamma.to_f64(),
                converged_digits: Some(r.converged_digits),
                e_text: digits.map(|d| r.e.to_decimal_string(d)),
                gamma_text: digits.map(|d| r.gamma.to_decimal_string(d)),
            });
        }
    }
    SectorReport {
        sector: p.label.clone(),
        params: p.basis.params().iter().map(|n| n.label().to_string()).collect(),
        rungs,
        resonances: rows,
    }
}

/// One stationary point of the trace, for auditing root selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub sector: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub params: Vec<[f64; 2]>,
    pub residual: f64,
    pub valid: bool,
    /// Whether the ladder run uses this point.
    pub selected: bool,
}

/// Every stationary point found by the multi-start search at every rung,
/// plus the point the ladder follows if the search missed it.
pub fn trace_roots(cfg: &RunConfig) -> Result<Vec<RootRecord>> {
    let opts = cfg.search_options();
    let mut out = Vec::new();
    for p in cfg.problems::<f64>()? {
        let chosen = continuation(&p, &cfg.ladder.m, &opts)?;
        for (&m, pick) in cfg.ladder.m.iter().zip(&chosen) {
            let tf = trace_fn(&p.basis, &p.potential, m).map_err(rung_err(&p, m))?;
            let found = stationary_points(&tf, &opts).map_err(rung_err(&p, m))?;
            let size = param_pairs(&p, pick).iter().fold(1.0f64, |a, z| a.max(z[0].hypot(z[1])));
            let mut seen = false;
            for c in &found {
                let selected = c.params.distance(pick) < 1e-6 * size;
                seen |= selected;
                out.push(RootRecord {
                    sector: p.label.clone(),
                    m,
                    params: param_pairs(&p, &c.params),
                    residual: c.residual,
                    valid: c.valid,
                    selected,
                });
            }
            if !seen {
                let c = polish(&tf, pick, &opts).map_err(rung_err(&p, m))?;
                out.push(RootRecord {
                    sector: p.label.clone(),
                    m,
                    params: param_pairs(&p, &c.params),
                    residual: c.residual,
                    valid: c.valid,
                    selected: true,
                });
            }
        }
    }
    Ok(out)
}

/// Largest element mismatch between the closed-form matrix and the
/// quadrature oracle at one gate point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub sector: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub params: Vec<[f64; 2]>,
    pub max_error: f64,
    pub worst_element: [usize; 2],
    pub tolerance: f64,
    pub pass: bool,
}

/// Element-wise comparison on the leading `GATE_DIM` block at every gate
/// point of each sector's basis. The oracle itself loses digits on the real
/// axis at strongly complex parameters, so the points are fixed per family
/// rather than taken from the optimizer.
pub fn oracle_check(cfg: &RunConfig) -> Result<Vec<GateRecord>> {
    let mut out = Vec::new();
    for p in cfg.problems::<f64>()? {
        for point in gate_points(&p.basis) {
            let (worst, j, k) = gate_error(&p.basis, &p.potential, &point).map_err(rung_err(&p, GATE_DIM))?;
            out.push(GateRecord {
                sector: p.label.clone(),
                m: GATE_DIM,
                params: param_pairs(&p, &point),
                max_error: worst,
                worst_element: [j, k],
                tolerance: GATE_TOL,
                pass: worst <= GATE_TOL,
            });
        }
    }
    Ok(out)
}
