use std::fmt::Write as _;
use std::time::Instant;

use smw_core::grid::{build_grid_graph, GridOptions};
use smw_core::run_smw;
use smw_core::synth::synthetic_volume;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub side: usize,
    pub voxels: usize,
    pub edges: usize,
    pub repeat: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// One row per size with the median time; `repeat` is the repeat count.
    pub medians: Vec<BenchRow>,
    /// Least-squares slope of log(seconds) against log(edges) over the medians.
    pub slope: f64,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("side,voxels,edges,repeat,seconds\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{:.6}", r.side, r.voxels, r.edges, r.repeat, r.seconds);
        }
        for r in &self.medians {
            let _ = writeln!(out, "{},{},{},median,{:.6}", r.side, r.voxels, r.edges, r.seconds);
        }
        out
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Runs per timed repeat, so that short runs are measured over at least
/// `MIN_BATCH_SECONDS` instead of near the timer resolution.
const MIN_BATCH_SECONDS: f64 = 0.1;

fn batch_size(one_run: f64) -> usize {
    ((MIN_BATCH_SECONDS / one_run.max(1e-9)).ceil() as usize).clamp(1, 10_000)
}

/// Times graph sorting plus the greedy pass on seeded synthetic volumes.
/// Graph construction and one warm-up run per size are not timed; each
/// repeat reports the mean over a batch of runs.
pub fn run_bench(sizes: &[usize], repeats: usize, seed: u64) -> Result<BenchReport, CliError> {
    if sizes.len() < 2 || repeats == 0 || sizes.contains(&0) {
        return Err(CliError::Invalid("bench needs at least two non-zero sizes and one repeat".into()));
    }
    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for &side in sizes {
        let volume = synthetic_volume(side, seed);
        let g = build_grid_graph(&volume.affinities, &volume.pattern, Some(&volume.semantic), &GridOptions::default())?;
        drop(volume);
        // untimed warm-up: first-touch page faults and cold caches
        let start = Instant::now();
        std::hint::black_box(run_smw(&g));
        let batch = batch_size(start.elapsed().as_secs_f64());
        let mut times = Vec::with_capacity(repeats);
        for repeat in 0..repeats {
            let start = Instant::now();
            for _ in 0..batch {
                std::hint::black_box(run_smw(&g));
            }
            let seconds = start.elapsed().as_secs_f64() / batch as f64;
            log::info!("side {side}: {seconds:.4}s per run, batch of {batch}");
            times.push(seconds);
            rows.push(BenchRow { side, voxels: g.num_nodes(), edges: g.num_edges(), repeat, seconds });
        }
        medians.push(BenchRow {
            side,
            voxels: g.num_nodes(),
            edges: g.num_edges(),
            repeat: repeats,
            seconds: median(&mut times),
        });
    }
    let points: Vec<(f64, f64)> = medians.iter().map(|r| (r.edges as f64, r.seconds)).collect();
    Ok(BenchReport { rows, medians, slope: loglog_slope(&points) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn batches() {
        assert_eq!(batch_size(1.0), 1);
        assert_eq!(batch_size(0.01), 10);
        assert_eq!(batch_size(0.0), 10_000);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
