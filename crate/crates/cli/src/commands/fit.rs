use std::path::{Path, PathBuf};

use periodic_loss::estimate::{
    fit_interarrival, ingest_kpi, ingest_tickets, maintenance_stats, rolling_delta, weekly_profile,
    FitMethod, FitReport, Fold, MaintenanceStats, ProfileEstimate, RollingDelta,
};
use periodic_loss::theory::{delta, expected_loss_limit, LimitInputs};
use serde::Serialize;

use crate::output::{num, opt};
use crate::{write_csv, write_json, CliError, Report, StudyConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct FitArgs {
    pub tickets: PathBuf,
    pub kpi: Option<PathBuf>,
    pub n_cells: usize,
    /// Method whose rate feeds the limit.
    pub method: FitMethod,
    pub fold: Fold,
    /// Rolling window and step (hours) for the repair-share series.
    pub window: Option<f64>,
    pub step: f64,
    pub bin_width: f64,
}

impl FitArgs {
    pub fn new(tickets: PathBuf, n_cells: usize) -> Self {
        Self {
            tickets,
            kpi: None,
            n_cells,
            method: FitMethod::UpTimeGaps,
            fold: Fold::Weekly,
            window: None,
            step: 24.0,
            bin_width: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestSummary {
    pub rows_read: usize,
    pub valid: usize,
    pub malformed: usize,
    pub merged: usize,
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSummary {
    pub fold: Fold,
    pub u_bar: f64,
    pub imputed_slots: Vec<usize>,
    pub missing_hours: usize,
    pub kpi_malformed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedLimit {
    pub method: FitMethod,
    pub mean_x: f64,
    pub mean_y: f64,
    pub delta: f64,
    /// Present only when a KPI file gives `U_bar`.
    pub limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitCommandReport {
    pub tickets: IngestSummary,
    pub pooled: FitReport,
    pub up_time: FitReport,
    pub maintenance: MaintenanceStats,
    pub profile: Option<ProfileSummary>,
    pub fitted: FittedLimit,
    pub rolling: Option<RollingDelta>,
}

pub fn cmd_fit(
    config: &StudyConfig,
    args: &FitArgs,
    out: &Path,
) -> Result<FitCommandReport, CliError> {
    if args.n_cells == 0 {
        return Err(CliError::Config("`cells` must be positive".into()));
    }
    let ingest = ingest_tickets(&args.tickets)?;
    let records = &ingest.records;
    let pooled = fit_interarrival(records, args.n_cells, FitMethod::PooledGaps)?;
    let up_time = fit_interarrival(records, args.n_cells, FitMethod::UpTimeGaps)?;
    let maintenance = maintenance_stats(records, args.bin_width)?;

    let profile: Option<(ProfileEstimate, usize)> = match &args.kpi {
        Some(path) => {
            let kpi = ingest_kpi(path)?;
            Some((
                weekly_profile(&kpi.records, args.fold)?,
                kpi.malformed.len(),
            ))
        }
        None => None,
    };

    let chosen = match args.method {
        FitMethod::PooledGaps => &pooled,
        FitMethod::UpTimeGaps => &up_time,
    };
    let mean_x = 1.0 / chosen.per_cell_lambda;
    let limit = match &profile {
        Some((p, _)) => Some(expected_loss_limit(&LimitInputs {
            mean_x,
            mean_y: maintenance.mean_y,
            u_bar: p.u_bar,
            n_cells: args.n_cells,
        })?),
        None => None,
    };
    let fitted = FittedLimit {
        method: args.method,
        mean_x,
        mean_y: maintenance.mean_y,
        delta: delta(mean_x, maintenance.mean_y)?,
        limit,
    };
    let rolling = match args.window {
        Some(w) => Some(rolling_delta(records, w, args.step)?),
        None => None,
    };

    let h = &maintenance.histogram;
    write_csv(
        &out.join("maintenance_histogram.csv"),
        &["bin_start_hours", "bin_end_hours", "count"],
        h.counts.iter().enumerate().map(|(i, c)| {
            vec![
                num(i as f64 * h.bin_width),
                num((i + 1) as f64 * h.bin_width),
                c.to_string(),
            ]
        }),
    )?;
    if let Some((p, _)) = &profile {
        write_csv(
            &out.join("profile.csv"),
            &["slot", "utility", "samples", "imputed"],
            (0..args.fold.hours()).map(|s| {
                vec![
                    s.to_string(),
                    num(p.profile.value_at(s as f64)),
                    p.samples_per_slot[s].to_string(),
                    p.imputed_slots.contains(&s).to_string(),
                ]
            }),
        )?;
    }
    if let Some(r) = &rolling {
        write_csv(
            &out.join("rolling_delta.csv"),
            &[
                "start",
                "end",
                "n_up",
                "n_down",
                "mean_x",
                "mean_y",
                "delta",
                "sigma",
                "outside_band",
                "flag",
            ],
            r.points.iter().map(|p| {
                vec![
                    p.start.to_string(),
                    p.end.to_string(),
                    p.n_up.to_string(),
                    p.n_down.to_string(),
                    opt(p.mean_x),
                    opt(p.mean_y),
                    opt(p.delta),
                    opt(p.sigma),
                    p.outside_band.to_string(),
                    p.flag.unwrap_or("").to_string(),
                ]
            }),
        )?;
    }

    let report = FitCommandReport {
        tickets: IngestSummary {
            rows_read: ingest.rows_read,
            valid: records.len(),
            malformed: ingest.malformed.len(),
            merged: ingest.merged,
            unresolved: ingest.unresolved,
        },
        pooled,
        up_time,
        maintenance,
        profile: profile.map(|(p, bad)| ProfileSummary {
            fold: p.fold,
            u_bar: p.u_bar,
            imputed_slots: p.imputed_slots,
            missing_hours: p.missing_hours,
            kpi_malformed: bad,
        }),
        fitted,
        rolling,
    };
    write_json(&out.join("fit.json"), &Report::new("fit", config, &report))?;
    Ok(report)
}
