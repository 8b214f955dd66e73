use std::path::Path;

use periodic_loss::theory::{availability, delta, expected_loss_limit, i_bar, LimitInputs};
use serde::Serialize;

use crate::{write_json, CliError, Report, StudyConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub inputs: LimitInputs,
    /// `N E[Y] U_bar / (E[X] + E[Y])`, utility units per hour.
    pub limit: f64,
    pub per_cell_limit: f64,
    pub availability: f64,
    pub delta: f64,
    /// Share of the demand lost in the long run, `limit / (N U_bar)`.
    pub loss_fraction: f64,
    pub i_bar: f64,
}

pub fn cmd_limit(config: &StudyConfig, out: &Path) -> Result<LimitReport, CliError> {
    let x = config.interarrival_model()?;
    let y = config.maintenance_model()?;
    let profile = config.profile_model()?;
    let inputs = LimitInputs {
        mean_x: x.mean(),
        mean_y: y.mean(),
        u_bar: profile.mean(),
        n_cells: config.n_cells,
    };
    let limit = expected_loss_limit(&inputs)?;
    let report = LimitReport {
        inputs,
        limit,
        per_cell_limit: limit / config.n_cells as f64,
        availability: availability(inputs.mean_x, inputs.mean_y)?,
        delta: delta(inputs.mean_x, inputs.mean_y)?,
        loss_fraction: delta(inputs.mean_x, inputs.mean_y)?,
        i_bar: i_bar(inputs.mean_y, inputs.u_bar)?,
    };
    write_json(
        &out.join("limit.json"),
        &Report::new("limit", config, &report),
    )?;
    Ok(report)
}
