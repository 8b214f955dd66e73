//! Synthetic tickets and KPI traces with known parameters, for round-trip
//! checks and example data.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use super::kpi::KpiRecord;
use super::tickets::TicketRecord;
use super::SECONDS_PER_HOUR;
use crate::engine::{simulate_cell, CellTrace, StopRule};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rng::{Role, StreamKey};
use crate::stochastic::DurationSampler;

/// 2024-01-01T00:00:00Z, a Monday.
pub const FIXTURE_EPOCH: i64 = 1_704_067_200;

fn to_seconds(hours: f64) -> i64 {
    FIXTURE_EPOCH + (hours * SECONDS_PER_HOUR).round() as i64
}

pub fn cell_name(cell: usize) -> String {
    format!("cell{cell:04}")
}

/// One ticket per anomaly. A repair still running at the horizon gives an
/// unresolved ticket; an up period cut by the horizon gives none.
pub fn tickets_from_traces(traces: &[CellTrace]) -> Vec<TicketRecord> {
    let mut out = Vec::new();
    for (i, trace) in traces.iter().enumerate() {
        let n = trace.len();
        for (k, c) in trace.cycles().iter().enumerate() {
            let cut = trace.truncated() && k + 1 == n;
            if cut && c.down == 0.0 {
                continue;
            }
            let (a, b) = c.outage();
            out.push(TicketRecord {
                anomaly_id: format!("{}-{k}", cell_name(i)),
                cell_id: cell_name(i),
                start: to_seconds(a),
                end: (!cut).then(|| to_seconds(b)),
            });
        }
    }
    out
}

/// Tickets from `n_cells` simulated cells over `[0, horizon]` hours, cell `c`
/// drawing from stream `(seed, Fixture, replication, c)`.
pub fn engine_tickets<X, Y>(
    seed: u64,
    n_cells: usize,
    up: &X,
    down: &Y,
    horizon: f64,
    replication: u32,
    exec: Exec,
) -> Result<Vec<TicketRecord>>
where
    X: DurationSampler + Sync,
    Y: DurationSampler + Sync,
{
    let traces = exec
        .map(n_cells, |c| {
            let mut rng = StreamKey::new(seed, Role::Fixture, replication, c as u32).rng();
            simulate_cell(up, down, StopRule::Horizon(horizon), &mut rng)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(tickets_from_traces(&traces))
}

/// `n` arrivals of a Poisson stream of rate `rate` per hour, spread
/// uniformly over `n_cells` cells, with no resolution times.
pub fn pooled_arrivals(seed: u64, rate: f64, n: usize, n_cells: usize) -> Vec<TicketRecord> {
    let mut rng = StreamKey::new(seed, Role::Fixture, 0, u32::MAX).rng();
    let mut t = 0.0;
    (0..n)
        .map(|i| {
            let u: f64 = rng.random();
            t += -(1.0 - u).ln() / rate;
            let cell = rng.random_range(0..n_cells.max(1));
            TicketRecord {
                anomaly_id: format!("p{i}"),
                cell_id: cell_name(cell),
                start: to_seconds(t),
                end: None,
            }
        })
        .collect()
}

/// Weekly traffic shape with mean exactly 1: a daily cycle peaking in the
/// evening, damped at night and on weekends.
pub fn weekly_shape() -> Vec<f64> {
    let raw: Vec<f64> = (0..168)
        .map(|h| {
            let hour = (h % 24) as f64;
            let weekend = if h / 24 >= 5 { 0.8 } else { 1.0 };
            let daily = 1.0 + 0.7 * (2.0 * std::f64::consts::PI * (hour - 14.0) / 24.0).cos();
            weekend * daily.max(0.05)
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    raw.into_iter().map(|v| v / mean).collect()
}

/// Hourly traffic for `n_cells` cells over `weeks` weeks from
/// [`FIXTURE_EPOCH`], with network mean `u_bar`. Cells differ by a load
/// factor (mean 1 across cells); samples carry 5% multiplicative noise and
/// about 1% of hours are missing.
pub fn kpi_fixture(seed: u64, n_cells: usize, weeks: usize, u_bar: f64) -> Vec<KpiRecord> {
    let shape = weekly_shape();
    let mut rng = StreamKey::new(seed, Role::Fixture, 1, u32::MAX).rng();
    let raw: Vec<f64> = (0..n_cells).map(|_| rng.random_range(0.5..1.5)).collect();
    let mean = raw.iter().sum::<f64>() / raw.len().max(1) as f64;
    let mut out = Vec::new();
    for (c, load) in raw.iter().map(|r| r / mean).enumerate() {
        let mut rng = StreamKey::new(seed, Role::Fixture, 2, c as u32).rng();
        for h in 0..weeks * 168 {
            let noise: f64 = rng.sample(StandardNormal);
            let keep: f64 = rng.random();
            if keep < 0.01 && h > 0 && h + 1 < weeks * 168 {
                continue;
            }
            out.push(KpiRecord {
                cell_id: cell_name(c),
                timestamp: FIXTURE_EPOCH + h as i64 * 3600,
                traffic: (u_bar * load * shape[h % 168] * (1.0 + 0.05 * noise)).max(0.0),
            });
        }
    }
    out
}

fn create(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_tickets(path: &Path, records: &[TicketRecord]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(super::tickets::TICKET_HEADER)?;
    for r in records {
        let end = r.end.map(|e| e.to_string()).unwrap_or_default();
        w.write_record([
            r.anomaly_id.as_str(),
            &r.cell_id,
            &r.start.to_string(),
            &end,
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_kpi(path: &Path, records: &[KpiRecord]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(super::kpi::KPI_HEADER)?;
    for r in records {
        let ts = chrono::DateTime::from_timestamp(r.timestamp, 0)
            .ok_or_else(|| Error::param("timestamp", format!("{} out of range", r.timestamp)))?
            .format("%Y-%m-%dT%H:%M:%SZ")
            .to_string();
        w.write_record([r.cell_id.as_str(), &ts, &format!("{:.6}", r.traffic)])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Cycle;
    use crate::stochastic::MaintenanceModel;

    #[test]
    fn mixture_is_calibrated() {
        let m = MaintenanceModel::paper_mixture();
        assert!((m.mean() - 2.1333).abs() < 1e-3);
        let mut rng = StreamKey::new(1, Role::Test, 0, 0).rng();
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((mean / m.mean() - 1.0).abs() < 0.01, "{mean}");
        assert!((m2 / m.second_moment() - 1.0).abs() < 0.05, "{m2}");
        assert!(xs.iter().filter(|x| **x < 5.0 / 60.0).count() as f64 / n as f64 > 0.245);
    }

    #[test]
    fn weekly_shape_has_unit_mean() {
        let s = weekly_shape();
        assert_eq!(s.len(), 168);
        assert!((s.iter().sum::<f64>() / 168.0 - 1.0).abs() < 1e-12);
        assert!(s.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn traces_become_tickets() {
        let trace = CellTrace::from_cycles(
            vec![
                Cycle {
                    up: 1.0,
                    down: 0.5,
                    end: 1.5,
                },
                Cycle {
                    up: 2.0,
                    down: 0.25,
                    end: 3.75,
                },
            ],
            3.75,
            true,
        )
        .unwrap();
        let t = tickets_from_traces(&[trace]);
        assert_eq!(t.len(), 2);
        assert_eq!(
            (t[0].start, t[0].end),
            (FIXTURE_EPOCH + 3600, Some(FIXTURE_EPOCH + 5400))
        );
        assert_eq!(t[1].end, None);
    }
}
