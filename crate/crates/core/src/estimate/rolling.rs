use std::collections::BTreeMap;

use serde::Serialize;

use super::tickets::TicketRecord;
use super::SECONDS_PER_HOUR;
use crate::error::{positive, Error, Result};

/// Windows must hold at least this many repairs on average.
pub const MIN_CYCLES_PER_WINDOW: f64 = 30.0;
const BAND_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaPoint {
    /// Window `[start, end)` in UTC seconds.
    pub start: i64,
    pub end: i64,
    pub n_up: usize,
    pub n_down: usize,
    pub mean_x: Option<f64>,
    pub mean_y: Option<f64>,
    pub delta: Option<f64>,
    /// Delta-method standard error of `delta`.
    pub sigma: Option<f64>,
    /// `|delta - global| > 3 sigma`.
    pub outside_band: bool,
    pub flag: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingDelta {
    pub global_delta: f64,
    pub points: Vec<DeltaPoint>,
}

fn mean_var(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        f64::NAN
    };
    Some((m, v))
}

/// `Delta = E[Y] / (E[X] + E[Y])` on sliding windows.
///
/// Up periods are the gaps between a repair's end and the next anomaly on the
/// same cell and belong to the window containing that anomaly; repairs
/// belong to the window containing their start.
pub fn rolling_delta(
    records: &[TicketRecord],
    window_hours: f64,
    step_hours: f64,
) -> Result<RollingDelta> {
    positive("window", window_hours)?;
    positive("step", step_hours)?;
    let mut ups: Vec<(i64, f64)> = Vec::new();
    let mut downs: Vec<(i64, f64)> = Vec::new();
    let mut by_cell: BTreeMap<&str, Vec<&TicketRecord>> = BTreeMap::new();
    for r in records {
        by_cell.entry(&r.cell_id).or_default().push(r);
    }
    for (_, mut tickets) in by_cell {
        tickets.sort_by_key(|t| t.start);
        for (k, t) in tickets.iter().enumerate() {
            if let Some(y) = t.duration_hours() {
                downs.push((t.start, y));
                if let Some(next) = tickets.get(k + 1) {
                    let end = t.end.unwrap();
                    if next.start >= end {
                        ups.push((next.start, (next.start - end) as f64 / SECONDS_PER_HOUR));
                    }
                }
            }
        }
    }
    if downs.is_empty() || ups.is_empty() {
        return Err(Error::InsufficientData(
            "need resolved tickets with successors".into(),
        ));
    }
    let first = records.iter().map(|r| r.start).min().unwrap();
    let last = records.iter().map(|r| r.start).max().unwrap();
    let span = (last - first) as f64 / SECONDS_PER_HOUR;
    let window = (window_hours * SECONDS_PER_HOUR).round() as i64;
    let step = (step_hours * SECONDS_PER_HOUR).round() as i64;
    let bounds: Vec<(i64, i64)> = if window_hours >= span {
        vec![(first, last + 1)]
    } else {
        (0..)
            .map(|k| first + k * step)
            .take_while(|s| s + window <= last + 1)
            .map(|s| (s, s + window))
            .collect()
    };
    let per_window = downs.len() as f64 * (window_hours / span.max(window_hours)).min(1.0);
    if per_window < MIN_CYCLES_PER_WINDOW {
        return Err(Error::InsufficientData(format!(
            "windows hold {per_window:.1} repairs on average, need {MIN_CYCLES_PER_WINDOW}"
        )));
    }

    let xs: Vec<f64> = ups.iter().map(|u| u.1).collect();
    let ys: Vec<f64> = downs.iter().map(|d| d.1).collect();
    let (gx, _) = mean_var(&xs).unwrap();
    let (gy, _) = mean_var(&ys).unwrap();
    let global_delta = gy / (gx + gy);

    let points = bounds
        .into_iter()
        .map(|(start, end)| {
            let within = |v: &[(i64, f64)]| -> Vec<f64> {
                v.iter()
                    .filter(|(t, _)| (start..end).contains(t))
                    .map(|p| p.1)
                    .collect()
            };
            let (wx, wy) = (within(&ups), within(&downs));
            let (sx, sy) = (mean_var(&wx), mean_var(&wy));
            let mut p = DeltaPoint {
                start,
                end,
                n_up: wx.len(),
                n_down: wy.len(),
                mean_x: sx.map(|s| s.0),
                mean_y: sy.map(|s| s.0),
                delta: None,
                sigma: None,
                outside_band: false,
                flag: None,
            };
            let (Some((mx, vx)), Some((my, vy))) = (sx, sy) else {
                p.flag = Some("empty");
                return p;
            };
            let total = mx + my;
            let d = my / total;
            // d(Delta)/d(mx) = -my / total^2, d(Delta)/d(my) = mx / total^2
            let var =
                (my * my * vx / wx.len() as f64 + mx * mx * vy / wy.len() as f64) / total.powi(4);
            p.delta = Some(d);
            if var.is_finite() {
                let sigma = var.sqrt();
                p.sigma = Some(sigma);
                p.outside_band = (d - global_delta).abs() > BAND_SIGMAS * sigma;
            } else {
                p.flag = Some("single sample");
            }
            p
        })
        .collect();
    Ok(RollingDelta {
        global_delta,
        points,
    })
}
