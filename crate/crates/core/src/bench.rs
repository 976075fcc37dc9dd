//! Evaluation harness: paired comparison of the static and the
//! teleportation-optimized compiler over seeded random circuits.
//!
//! Every sample compiles the same circuit from the same initial mapping with
//! both compilers. Aggregates report mean and sample standard deviation of
//! the routed depths, the relative layer overhead
//! `r = (d_opt - d_L) / (d_st - d_L)` and the saving `delta = d_st - d_opt`,
//! aggregated per sample.

use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use crate::circuit::LayeredCircuit;
use crate::error::{Error, Result};
use crate::graph::{build_layout, LayoutName};
use crate::optimizer::{compile_optimized, AnnealConfig};
use crate::router::route_static;
use crate::validate::validate_schedule;

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub layout: String,
    pub q: u32,
    pub g: u32,
    pub d_l: usize,
    pub seed: u64,
    pub d_st: usize,
    pub d_opt: usize,
    pub st_ms: f64,
    pub opt_ms: f64,
}

/// One aggregated table cell. `rtilde_*` is absent when no sample had
/// `d_st > d_L` (the ratio is undefined there).
#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub layout: String,
    pub q: u32,
    pub g: u32,
    pub d_l: usize,
    pub samples: usize,
    pub dst_mean: f64,
    pub dst_std: f64,
    pub dopt_mean: f64,
    pub dopt_std: f64,
    pub rtilde_mean: Option<f64>,
    pub rtilde_std: Option<f64>,
    pub delta_mean: f64,
    pub delta_std: f64,
    pub delta_over_dst_mean: f64,
}

pub const CSV_HEADER: &str = "layout,q,g,dL,samples,dst_mean,dst_std,dopt_mean,dopt_std,\
rtilde_mean,rtilde_std,delta_mean,delta_std,delta_over_dst_mean";

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.6}"),
        None => "na".to_string(),
    }
}

/// Fixed-header CSV, one row per aggregate cell.
pub fn write_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{},{},{:.6},{:.6},{:.6}\n",
            r.layout,
            r.q,
            r.g,
            r.d_l,
            r.samples,
            r.dst_mean,
            r.dst_std,
            r.dopt_mean,
            r.dopt_std,
            fmt_opt(r.rtilde_mean),
            fmt_opt(r.rtilde_std),
            r.delta_mean,
            r.delta_std,
            r.delta_over_dst_mean
        ));
    }
    out
}

pub fn records_json(records: &[RunRecord]) -> String {
    serde_json::to_string_pretty(records).expect("record serialization cannot fail")
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1); zero for a single sample.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Runs one paired sample: same circuit and mapping through both compilers.
pub fn run_sample(
    layout: LayoutName,
    q: u32,
    g: u32,
    d_l: usize,
    seed: u64,
    cfg: &AnnealConfig,
) -> Result<RunRecord> {
    let circuit = LayeredCircuit::random(q, g, d_l as u32, seed)?;
    let (graph, mapping) = build_layout(layout, q, seed)?;

    let t = Instant::now();
    let st = route_static(&graph, &mapping, &circuit)?;
    let st_ms = t.elapsed().as_secs_f64() * 1e3;

    let run_cfg = AnnealConfig { seed, ..*cfg };
    let t = Instant::now();
    let opt = compile_optimized(&graph, &mapping, &circuit, &run_cfg)?;
    let opt_ms = t.elapsed().as_secs_f64() * 1e3;

    for (name, schedule) in [("static", &st), ("optimized", &opt)] {
        let findings = validate_schedule(&graph, &mapping, &circuit, schedule);
        for f in findings {
            log::warn!("{layout} q={q} g={g} dL={d_l} seed={seed} {name}: {f}");
        }
    }

    Ok(RunRecord {
        layout: layout.to_string(),
        q,
        g,
        d_l,
        seed,
        d_st: st.depth,
        d_opt: opt.depth,
        st_ms,
        opt_ms,
    })
}

fn aggregate(layout: LayoutName, q: u32, g: u32, d_l: usize, records: &[RunRecord]) -> AggregateRow {
    let dst: Vec<f64> = records.iter().map(|r| r.d_st as f64).collect();
    let dopt: Vec<f64> = records.iter().map(|r| r.d_opt as f64).collect();
    let delta: Vec<f64> = records
        .iter()
        .map(|r| r.d_st as f64 - r.d_opt as f64)
        .collect();
    let rel: Vec<f64> = records
        .iter()
        .map(|r| (r.d_st as f64 - r.d_opt as f64) / r.d_st as f64)
        .collect();
    let rtilde: Vec<f64> = records
        .iter()
        .filter(|r| r.d_st > r.d_l)
        .map(|r| (r.d_opt as f64 - r.d_l as f64) / (r.d_st as f64 - r.d_l as f64))
        .collect();
    AggregateRow {
        layout: layout.to_string(),
        q,
        g,
        d_l,
        samples: records.len(),
        dst_mean: mean(&dst),
        dst_std: std_dev(&dst),
        dopt_mean: mean(&dopt),
        dopt_std: std_dev(&dopt),
        rtilde_mean: (!rtilde.is_empty()).then(|| mean(&rtilde)),
        rtilde_std: (!rtilde.is_empty()).then(|| std_dev(&rtilde)),
        delta_mean: mean(&delta),
        delta_std: std_dev(&delta),
        delta_over_dst_mean: mean(&rel),
    }
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub rows: Vec<AggregateRow>,
    pub records: Vec<RunRecord>,
}

fn run_cells(
    cells: Vec<(LayoutName, u32, u32, usize)>,
    samples: usize,
    cfg: &AnnealConfig,
    jobs: usize,
) -> Result<GridResult> {
    let master = cfg.seed;
    let tasks: Vec<(usize, LayoutName, u32, u32, usize, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, &(layout, q, g, d_l))| {
            (0..samples).map(move |i| (ci, layout, q, g, d_l, master + i as u64))
        })
        .collect();

    let run = |&(ci, layout, q, g, d_l, seed): &(usize, LayoutName, u32, u32, usize, u64)| {
        run_sample(layout, q, g, d_l, seed, cfg).map_err(|e| Error::BenchCell {
            cell: format!("{layout} q={q} g={g} dL={d_l} seed={seed}"),
            source: Box::new(e),
        })
        .map(|r| (ci, r))
    };

    let results: Vec<(usize, RunRecord)> = if jobs <= 1 {
        tasks.iter().map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect::<Result<_>>())?
    };

    // Deterministic reduce in cell-index order; samples stay seed-ordered.
    let mut per_cell: Vec<Vec<RunRecord>> = vec![Vec::new(); cells.len()];
    for (ci, record) in results {
        per_cell[ci].push(record);
    }
    for cell in &mut per_cell {
        cell.sort_by_key(|r| r.seed);
    }

    let rows = cells
        .iter()
        .zip(&per_cell)
        .map(|(&(layout, q, g, d_l), recs)| aggregate(layout, q, g, d_l, recs))
        .collect();
    Ok(GridResult {
        rows,
        records: per_cell.into_iter().flatten().collect(),
    })
}

/// Layout x depth grid; every cell runs `samples` paired seeded circuits.
pub fn run_grid(
    layouts: &[LayoutName],
    depths: &[usize],
    q: u32,
    g: u32,
    samples: usize,
    cfg: &AnnealConfig,
    jobs: usize,
) -> Result<GridResult> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be >= 1".into()));
    }
    let cells: Vec<(LayoutName, u32, u32, usize)> = layouts
        .iter()
        .flat_map(|&l| depths.iter().map(move |&d| (l, q, g, d)))
        .collect();
    run_cells(cells, samples, cfg, jobs)
}

/// Gates-per-layer sweep at a fixed total gate count. When `g` does not
/// divide `total_gates`, the depth is rounded up and the total adjusted.
pub fn run_density_sweep(
    g_values: &[u32],
    total_gates: u32,
    q: u32,
    layout: LayoutName,
    samples: usize,
    cfg: &AnnealConfig,
    jobs: usize,
) -> Result<GridResult> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be >= 1".into()));
    }
    let mut cells = Vec::new();
    for &g in g_values {
        let d_l = total_gates.div_ceil(g) as usize;
        if g * d_l as u32 != total_gates {
            log::info!(
                "sweep: g={g} does not divide G={total_gates}; using dL={d_l} (G={})",
                g * d_l as u32
            );
        }
        cells.push((layout, q, g, d_l));
    }
    run_cells(cells, samples, cfg, jobs)
}

/// Ordinary least squares fit `y = slope * x + intercept`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateFit);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok((slope, intercept))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_exact_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|x| (x as f64, 2.0 * x as f64 + 1.0)).collect();
        let (slope, intercept) = linear_fit(&pts).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_two_points_interpolates() {
        let (slope, intercept) = linear_fit(&[(1.0, 3.0), (3.0, 7.0)]).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_degenerate() {
        assert!(linear_fit(&[(1.0, 2.0)]).is_err());
        assert!(linear_fit(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn single_sample_row_matches_record() {
        let cfg = AnnealConfig {
            iterations: 20,
            seed: 5,
            ..AnnealConfig::default()
        };
        let grid = run_grid(&[LayoutName::Pair], &[3], 8, 2, 1, &cfg, 1).unwrap();
        assert_eq!(grid.records.len(), 1);
        let row = &grid.rows[0];
        let rec = &grid.records[0];
        assert_eq!(row.samples, 1);
        assert_eq!(row.dst_mean, rec.d_st as f64);
        assert_eq!(row.dopt_mean, rec.d_opt as f64);
        assert_eq!(row.dst_std, 0.0);
        assert_eq!(row.delta_std, 0.0);
    }

    #[test]
    fn rtilde_guard_when_dst_equals_dl() {
        // A single 1-layer 1-gate circuit routes at the logical depth, so
        // the relative overhead is undefined.
        let cfg = AnnealConfig {
            iterations: 0,
            seed: 2,
            ..AnnealConfig::default()
        };
        let grid = run_grid(&[LayoutName::Single], &[1], 2, 1, 1, &cfg, 1).unwrap();
        let row = &grid.rows[0];
        assert_eq!(row.dst_mean, 1.0);
        assert!(row.rtilde_mean.is_none());
        let csv = write_csv(&grid.rows);
        assert!(csv.contains(",na,na,"));
    }

    #[test]
    fn grid_is_deterministic_across_jobs() {
        let cfg = AnnealConfig {
            iterations: 10,
            seed: 9,
            ..AnnealConfig::default()
        };
        let a = run_grid(&[LayoutName::Pair], &[2, 3], 8, 2, 3, &cfg, 1).unwrap();
        let b = run_grid(&[LayoutName::Pair], &[2, 3], 8, 2, 3, &cfg, 2).unwrap();
        assert_eq!(write_csv(&a.rows), write_csv(&b.rows));
        // Wall times differ between runs; the measured depths may not.
        let depths = |g: &GridResult| -> Vec<(u64, usize, usize)> {
            g.records.iter().map(|r| (r.seed, r.d_st, r.d_opt)).collect()
        };
        assert_eq!(depths(&a), depths(&b));
    }

    #[test]
    fn csv_header_is_stable() {
        assert!(CSV_HEADER.starts_with("layout,q,g,dL,samples,"));
        assert!(CSV_HEADER.ends_with("delta_over_dst_mean"));
    }
}
