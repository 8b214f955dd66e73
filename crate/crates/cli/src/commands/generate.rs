use std::path::Path;

use periodic_loss::estimate::synthetic::{engine_tickets, kpi_fixture, write_kpi, write_tickets};
use periodic_loss::par::Exec;
use serde::Serialize;

use crate::{write_json, CliError, Report, StudyConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateArgs {
    pub weeks: usize,
    pub u_bar: f64,
}

impl Default for GenerateArgs {
    fn default() -> Self {
        Self {
            weeks: 2,
            u_bar: 1.55,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerateReport {
    pub tickets: usize,
    pub unresolved: usize,
    pub kpi_rows: usize,
    pub n_cells: usize,
    pub horizon: f64,
}

/// Writes `tickets.csv` from simulated cells over `[0, horizon]` and
/// `kpi.csv` from the calibrated weekly traffic fixture.
pub fn cmd_generate(
    config: &StudyConfig,
    args: &GenerateArgs,
    out: &Path,
    exec: Exec,
) -> Result<GenerateReport, CliError> {
    if args.weeks < 2 {
        return Err(CliError::Config("`weeks` must be at least 2".into()));
    }
    let x = config.interarrival_model()?;
    let y = config.maintenance_model()?;
    let tickets = engine_tickets(config.seed, config.n_cells, &x, &y, config.horizon, 0, exec)?;
    let kpi = kpi_fixture(config.seed, config.n_cells, args.weeks, args.u_bar);
    write_tickets(&out.join("tickets.csv"), &tickets)?;
    write_kpi(&out.join("kpi.csv"), &kpi)?;
    let report = GenerateReport {
        tickets: tickets.len(),
        unresolved: tickets.iter().filter(|t| t.end.is_none()).count(),
        kpi_rows: kpi.len(),
        n_cells: config.n_cells,
        horizon: config.horizon,
    };
    write_json(
        &out.join("generate.json"),
        &Report::new("generate", config, &report),
    )?;
    Ok(report)
}
