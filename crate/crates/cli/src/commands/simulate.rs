use std::path::Path;

use periodic_loss::engine::{CellStudy, NetworkStudy, ReplicationSummary, StageOutcome};
use periodic_loss::par::Exec;
use periodic_loss::utility::NoiseModel;
use serde::Serialize;

use crate::output::{num, opt};
use crate::{write_csv, write_json, CliError, Mode, Report, StudyConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub summary: ReplicationSummary,
    /// `|median - clean median| / clean median`.
    pub median_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub mode: Mode,
    /// `cycles` for a single cell, `hours` for a network.
    pub stage_unit: &'static str,
    /// Per-cell limit the running loss is compared with.
    pub limit: f64,
    pub network_limit: f64,
    pub threshold: f64,
    pub summary: ReplicationSummary,
    /// Share of replications whose last point is within the threshold.
    pub final_within_threshold: f64,
    /// The same study without noise, on the same anomaly traces.
    pub clean: Option<Comparison>,
    pub outcomes: Vec<StageOutcome>,
}

fn share_within(outcomes: &[StageOutcome], threshold: f64) -> f64 {
    outcomes
        .iter()
        .filter(|o| o.final_relative_error < threshold)
        .count() as f64
        / outcomes.len() as f64
}

fn compare(noisy: &ReplicationSummary, clean: &[StageOutcome]) -> Comparison {
    let summary = ReplicationSummary::from_outcomes(clean);
    Comparison {
        median_change: (noisy.median - summary.median).abs() / summary.median,
        summary,
    }
}

pub fn cmd_simulate(
    config: &StudyConfig,
    out: &Path,
    exec: Exec,
) -> Result<SimulateReport, CliError> {
    if config.work() > config.max_work {
        return Err(CliError::Budget(format!(
            "study needs {:.3e} units of work, max_work is {:.3e}",
            config.work(),
            config.max_work
        )));
    }
    let interarrival = config.interarrival_model()?;
    let maintenance = config.maintenance_model()?;
    let profile = config.profile_model()?;
    let noise = config.noise_model()?;
    let seed = config.seed;
    let reps = config.replications;
    let noisy = !noise.is_none();

    let (limit, unit, outcomes, clean, series_header, series_rows) = match config.mode {
        Mode::Cell => {
            let study = CellStudy {
                interarrival,
                maintenance,
                profile,
                noise,
                cycles: config.cycles,
                threshold: config.threshold,
            };
            let outcomes = study.outcomes(seed, reps, exec)?;
            let (series, _) = study.run(seed, 0)?;
            let clean_study = CellStudy {
                noise: NoiseModel::NONE,
                ..study.clone()
            };
            let (clean, clean_series) = if noisy {
                (
                    Some(clean_study.outcomes(seed, reps, exec)?),
                    Some(clean_study.run(seed, 0)?.0),
                )
            } else {
                (None, None)
            };
            let mut header = vec!["n", "end_hours", "loss_integral", "running_loss"];
            if noisy {
                header.push("running_loss_clean");
            }
            let rows: Vec<Vec<String>> = (0..series.len())
                .map(|i| {
                    let mut row = vec![
                        (i + 1).to_string(),
                        num(series.ends[i]),
                        num(series.integrals[i]),
                        num(series.running[i]),
                    ];
                    if let Some(c) = &clean_series {
                        row.push(num(c.running[i]));
                    }
                    row
                })
                .collect();
            (study.limit(), "cycles", outcomes, clean, header, rows)
        }
        Mode::Network => {
            let study = NetworkStudy {
                interarrival,
                maintenance,
                profile,
                noise,
                n_cells: config.n_cells,
                horizon: config.horizon,
                grid_step: config.grid_step,
                threshold: config.threshold,
            };
            let outcomes = study.outcomes(seed, reps, exec)?;
            let (run, _) = study.run(seed, 0, exec)?;
            let clean_study = NetworkStudy {
                noise: NoiseModel::NONE,
                ..study.clone()
            };
            let (clean, clean_run) = if noisy {
                (
                    Some(clean_study.outcomes(seed, reps, exec)?),
                    Some(clean_study.run(seed, 0, exec)?.0),
                )
            } else {
                (None, None)
            };
            let mut header = vec!["t_hours", "loss"];
            if noisy {
                header.push("loss_clean");
            }
            let rows: Vec<Vec<String>> = (0..run.grid.len())
                .map(|i| {
                    let mut row = vec![num(run.grid[i]), num(run.aggregate[i])];
                    if let Some(c) = &clean_run {
                        row.push(num(c.aggregate[i]));
                    }
                    row
                })
                .collect();
            (study.limit(), "hours", outcomes, clean, header, rows)
        }
    };

    write_csv(&out.join("series.csv"), &series_header, series_rows)?;
    let mut stage_header = vec![
        "replication",
        "stage",
        "final_value",
        "final_relative_error",
    ];
    if clean.is_some() {
        stage_header.push("clean_stage");
    }
    write_csv(
        &out.join("stages.csv"),
        &stage_header,
        outcomes.iter().enumerate().map(|(r, o)| {
            let mut row = vec![
                r.to_string(),
                opt(o.stage),
                num(o.final_value),
                num(o.final_relative_error),
            ];
            if let Some(c) = &clean {
                row.push(opt(c[r].stage));
            }
            row
        }),
    )?;

    let summary = ReplicationSummary::from_outcomes(&outcomes);
    let report = SimulateReport {
        mode: config.mode,
        stage_unit: unit,
        limit,
        network_limit: limit * config.n_cells as f64,
        threshold: config.threshold,
        final_within_threshold: share_within(&outcomes, config.threshold),
        clean: clean.as_deref().map(|c| compare(&summary, c)),
        summary,
        outcomes,
    };
    write_json(
        &out.join("summary.json"),
        &Report::new("simulate", config, &report),
    )?;
    Ok(report)
}
