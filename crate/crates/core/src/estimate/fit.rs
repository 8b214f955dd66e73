use std::collections::BTreeMap;

use serde::Serialize;

use super::tickets::TicketRecord;
use super::SECONDS_PER_HOUR;
use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 30;

/// How inter-arrival samples are formed from tickets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Network-wide arrival times sorted and differenced; the rate is
    /// `1 / mean gap`. Treats the network as one Poisson stream.
    #[default]
    PooledGaps,
    /// Per cell, the time from one repair's end to the next anomaly. These are
    /// the up periods themselves. The per-cell rate is completed gaps over
    /// total up exposure, counting each cell's open up period at the end of
    /// the data as right-censored; the network rate is `n_cells` times that.
    UpTimeGaps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub method: FitMethod,
    /// Network-wide anomaly rate (per hour).
    pub lambda_hat: f64,
    pub n_samples: usize,
    pub mean_gap_hours: f64,
    /// One-sample Kolmogorov-Smirnov distance to the fitted exponential.
    pub ks_statistic: f64,
    pub ks_threshold_05: f64,
    pub ks_pass: bool,
    pub n_cells: usize,
    /// `lambda_hat / n_cells`.
    pub per_cell_lambda: f64,
}

/// Successive differences (hours) of all arrival times, pooled over cells.
pub fn pooled_gaps(records: &[TicketRecord]) -> Vec<f64> {
    let mut starts: Vec<i64> = records.iter().map(|r| r.start).collect();
    starts.sort_unstable();
    starts
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 / SECONDS_PER_HOUR)
        .collect()
}

/// Per cell, `start_{k+1} - end_k` (hours) for consecutive tickets with a
/// resolved first ticket.
pub fn up_time_gaps(records: &[TicketRecord]) -> Vec<f64> {
    let mut by_cell: BTreeMap<&str, Vec<&TicketRecord>> = BTreeMap::new();
    for r in records {
        by_cell.entry(&r.cell_id).or_default().push(r);
    }
    let mut gaps = Vec::new();
    for (_, mut tickets) in by_cell {
        tickets.sort_by_key(|t| t.start);
        for w in tickets.windows(2) {
            if let Some(end) = w[0].end {
                if w[1].start >= end {
                    gaps.push((w[1].start - end) as f64 / SECONDS_PER_HOUR);
                }
            }
        }
    }
    gaps
}

/// Hours from each cell's last repair end to the end of the data (the
/// latest timestamp in `records`), for cells whose last ticket is resolved.
pub fn censored_up_times(records: &[TicketRecord]) -> Vec<f64> {
    let Some(horizon) = records
        .iter()
        .map(|r| r.end.unwrap_or(r.start).max(r.start))
        .max()
    else {
        return Vec::new();
    };
    let mut last: BTreeMap<&str, &TicketRecord> = BTreeMap::new();
    for r in records {
        let e = last.entry(&r.cell_id).or_insert(r);
        if r.start > e.start {
            *e = r;
        }
    }
    last.values()
        .filter_map(|r| r.end)
        .map(|e| (horizon - e) as f64 / SECONDS_PER_HOUR)
        .collect()
}

/// `sup_x |F_n(x) - (1 - e^{-rate x})|`.
pub fn ks_exponential(samples: &[f64], rate: f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = -(-rate * x).exp_m1();
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Exponential fit of the anomaly inter-arrival time.
pub fn fit_interarrival(
    records: &[TicketRecord],
    n_cells: usize,
    method: FitMethod,
) -> Result<FitReport> {
    if n_cells == 0 {
        return Err(Error::param("n_cells", "need at least one cell"));
    }
    let gaps = match method {
        FitMethod::PooledGaps => pooled_gaps(records),
        FitMethod::UpTimeGaps => up_time_gaps(records),
    };
    if gaps.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} inter-arrival samples, need at least {MIN_FIT_SAMPLES}",
            gaps.len()
        )));
    }
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    if mean.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InsufficientData(
            "all inter-arrival gaps are zero".into(),
        ));
    }
    let fitted_rate = match method {
        FitMethod::PooledGaps => 1.0 / mean,
        FitMethod::UpTimeGaps => n / (mean * n + censored_up_times(records).iter().sum::<f64>()),
    };
    let lambda_hat = match method {
        FitMethod::PooledGaps => fitted_rate,
        FitMethod::UpTimeGaps => fitted_rate * n_cells as f64,
    };
    // the completed gaps alone are biased short, so test them against their own mean
    let ks_statistic = ks_exponential(&gaps, 1.0 / mean);
    let ks_threshold_05 = 1.358 / n.sqrt();
    Ok(FitReport {
        method,
        lambda_hat,
        n_samples: gaps.len(),
        mean_gap_hours: 1.0 / fitted_rate,
        ks_statistic,
        ks_threshold_05,
        ks_pass: ks_statistic < ks_threshold_05,
        n_cells,
        per_cell_lambda: lambda_hat / n_cells as f64,
    })
}
