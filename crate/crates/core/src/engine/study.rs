use serde::Serialize;

use super::loss::{cumulative_loss, loss_series_by_cycle, LossSeries, NetworkRun};
use super::trace::{simulate_cell, StopRule};
use crate::error::{positive, Error, Result};
use crate::par::Exec;
use crate::rng::{Role, StreamKey};
use crate::stochastic::{InterArrivalModel, MaintenanceModel};
use crate::utility::{sample_noise_path, NoiseModel, PeriodicProfile};

pub const DEFAULT_THRESHOLD: f64 = 0.10;

/// First index `s` such that `|v - limit| / v < threshold` at `s` and at
/// every later point of the series. `None` if the last point violates.
pub fn convergence_stage(values: &[f64], limit: f64, threshold: f64) -> Result<Option<usize>> {
    positive("limit", limit)?;
    positive("threshold", threshold)?;
    if values.is_empty() {
        return Err(Error::InsufficientData("empty series".into()));
    }
    let within = |v: f64| v > 0.0 && (v - limit).abs() / v < threshold;
    match values.iter().rposition(|v| !within(*v)) {
        None => Ok(Some(0)),
        Some(i) if i + 1 < values.len() => Ok(Some(i + 1)),
        Some(_) => Ok(None),
    }
}

/// Linear-interpolation quantile of sorted data. Infinite entries are allowed.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        a
    } else {
        a + (b - a) * (h - lo as f64)
    }
}

/// Result of one replication: the stage (cycle count `n*` or time `T*`) and
/// where the series ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageOutcome {
    pub stage: Option<f64>,
    pub final_value: f64,
    pub final_relative_error: f64,
}

impl StageOutcome {
    fn new(stage: Option<f64>, final_value: f64, limit: f64) -> Self {
        Self {
            stage,
            final_value,
            final_relative_error: (final_value - limit).abs() / final_value,
        }
    }
}

/// Quantiles of the stage across replications. Replications that never
/// converge count as `+inf` in the quantiles and are left out of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub replications: usize,
    pub unreached: usize,
    pub median: f64,
    pub mean: f64,
    pub q10: f64,
    pub q90: f64,
}

impl ReplicationSummary {
    pub fn from_stages(stages: &[Option<f64>]) -> Self {
        let mut sorted: Vec<f64> = stages.iter().map(|s| s.unwrap_or(f64::INFINITY)).collect();
        sorted.sort_by(f64::total_cmp);
        let reached: Vec<f64> = stages.iter().flatten().copied().collect();
        let mean = if reached.is_empty() {
            f64::NAN
        } else {
            reached.iter().sum::<f64>() / reached.len() as f64
        };
        Self {
            replications: stages.len(),
            unreached: stages.len() - reached.len(),
            median: quantile(&sorted, 0.5),
            mean,
            q10: quantile(&sorted, 0.1),
            q90: quantile(&sorted, 0.9),
        }
    }

    pub fn from_outcomes(outcomes: &[StageOutcome]) -> Self {
        Self::from_stages(&outcomes.iter().map(|o| o.stage).collect::<Vec<_>>())
    }
}

fn per_cell_limit(x: &InterArrivalModel, y: &MaintenanceModel, profile: &PeriodicProfile) -> f64 {
    y.mean() * profile.mean() / (x.mean() + y.mean())
}

/// One cell followed for a fixed number of cycles; the stage is `n*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStudy {
    pub interarrival: InterArrivalModel,
    pub maintenance: MaintenanceModel,
    pub profile: PeriodicProfile,
    pub noise: NoiseModel,
    pub cycles: usize,
    pub threshold: f64,
}

impl CellStudy {
    pub fn limit(&self) -> f64 {
        per_cell_limit(&self.interarrival, &self.maintenance, &self.profile)
    }

    /// Replication `rep` draws anomalies from stream `(seed, Anomalies, rep, 0)`
    /// and noise from `(seed, Noise, rep, 0)`.
    pub fn run(&self, seed: u64, rep: u32) -> Result<(LossSeries, StageOutcome)> {
        let mut rng = StreamKey::new(seed, Role::Anomalies, rep, 0).rng();
        let trace = simulate_cell(
            &self.interarrival,
            &self.maintenance,
            StopRule::Cycles(self.cycles),
            &mut rng,
        )?;
        let path = if self.noise.is_none() {
            None
        } else {
            Some(sample_noise_path(
                &self.noise,
                trace.horizon(),
                StreamKey::new(seed, Role::Noise, rep, 0),
            )?)
        };
        let series = loss_series_by_cycle(&trace, &self.profile, path.as_ref())?;
        let limit = self.limit();
        let stage =
            convergence_stage(&series.running, limit, self.threshold)?.map(|i| (i + 1) as f64);
        let last = *series.running.last().expect("nonempty");
        Ok((series, StageOutcome::new(stage, last, limit)))
    }

    pub fn outcomes(&self, seed: u64, reps: usize, exec: Exec) -> Result<Vec<StageOutcome>> {
        exec.map(reps, |r| self.run(seed, r as u32).map(|(_, o)| o))
            .into_iter()
            .collect()
    }
}

/// `n_cells` independent cells observed on `[0, horizon]`; the stage is `T*`
/// in hours, read on a grid of step `grid_step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkStudy {
    pub interarrival: InterArrivalModel,
    pub maintenance: MaintenanceModel,
    pub profile: PeriodicProfile,
    pub noise: NoiseModel,
    pub n_cells: usize,
    pub horizon: f64,
    pub grid_step: f64,
    pub threshold: f64,
}

impl NetworkStudy {
    /// Per-cell limit; the network loss is averaged over cells.
    pub fn limit(&self) -> f64 {
        per_cell_limit(&self.interarrival, &self.maintenance, &self.profile)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        positive("grid_step", self.grid_step)?;
        positive("horizon", self.horizon)?;
        let n = (self.horizon / self.grid_step + 1e-9).floor() as usize;
        if n == 0 {
            return Err(Error::param("grid_step", "longer than the horizon"));
        }
        Ok((1..=n).map(|k| k as f64 * self.grid_step).collect())
    }

    /// Cell `c` of replication `rep` uses streams `(seed, Anomalies, rep, c)` and
    /// `(seed, Noise, rep, c)`, so runs that differ only in noise share their
    /// anomaly traces.
    pub fn run(&self, seed: u64, rep: u32, exec: Exec) -> Result<(NetworkRun, StageOutcome)> {
        if self.n_cells == 0 {
            return Err(Error::param("n_cells", "need at least one cell"));
        }
        let grid = self.grid()?;
        let per_cell = exec
            .map(self.n_cells, |c| {
                let mut rng = StreamKey::new(seed, Role::Anomalies, rep, c as u32).rng();
                let trace = simulate_cell(
                    &self.interarrival,
                    &self.maintenance,
                    StopRule::Horizon(self.horizon),
                    &mut rng,
                )?;
                let path = if self.noise.is_none() {
                    None
                } else {
                    let key = StreamKey::new(seed, Role::Noise, rep, c as u32);
                    Some(sample_noise_path(&self.noise, self.horizon, key)?)
                };
                cumulative_loss(&trace, &self.profile, path.as_ref(), &grid)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let run = NetworkRun::from_cumulative(grid, per_cell)?;
        let limit = self.limit();
        let stage = convergence_stage(&run.aggregate, limit, self.threshold)?.map(|i| run.grid[i]);
        let last = *run.aggregate.last().expect("nonempty grid");
        Ok((run, StageOutcome::new(stage, last, limit)))
    }

    /// Replications run one after another; cells within each run use `exec`.
    pub fn outcomes(&self, seed: u64, reps: usize, exec: Exec) -> Result<Vec<StageOutcome>> {
        (0..reps)
            .map(|r| self.run(seed, r as u32, exec).map(|(_, o)| o))
            .collect()
    }
}
