use std::path::Path;

use periodic_loss::stochastic::{
    convolve_mod_p, sup_distance_to_uniform, wrap_density, Gaussian, GeneralDensity, WrappedDensity,
};
use serde::Serialize;

use crate::output::num;
use crate::{write_csv, write_json, CliError, Report, StudyConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingArgs {
    pub period: f64,
    pub bins: usize,
    pub rate: f64,
    pub gaussians: Vec<usize>,
}

impl Default for SmoothingArgs {
    fn default() -> Self {
        Self {
            period: 1.0,
            bins: periodic_loss::stochastic::DEFAULT_BINS,
            rate: 10.0,
            gaussians: vec![0, 1, 10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingRow {
    pub gaussians: usize,
    pub sup_distance: f64,
    /// `|distance(bins) - distance(2 bins)|`.
    pub grid_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingReport {
    pub period: f64,
    pub bins: usize,
    pub rate: f64,
    pub rows: Vec<SmoothingRow>,
}

/// `X mod p` for `X ~ Exp(rate)` plus `n` standard Gaussians, for each `n`.
fn densities(args: &SmoothingArgs, bins: usize) -> Result<Vec<WrappedDensity>, CliError> {
    let base = wrap_density(
        &GeneralDensity::Exponential { rate: args.rate },
        args.period,
        bins,
    )?;
    let gauss = wrap_density(&Gaussian::STANDARD, args.period, bins)?;
    let max = args.gaussians.iter().copied().max().unwrap_or(0);
    let mut steps = vec![base];
    for i in 0..max {
        let next = convolve_mod_p(&steps[i], &gauss)?;
        steps.push(next);
    }
    Ok(args.gaussians.iter().map(|&n| steps[n].clone()).collect())
}

pub fn cmd_smoothing(
    config: &StudyConfig,
    args: &SmoothingArgs,
    out: &Path,
) -> Result<SmoothingReport, CliError> {
    if args.gaussians.is_empty() {
        return Err(CliError::Config(
            "`gaussians` needs at least one count".into(),
        ));
    }
    let coarse = densities(args, args.bins)?;
    let fine = densities(args, 2 * args.bins)?;
    let rows = args
        .gaussians
        .iter()
        .zip(coarse.iter().zip(&fine))
        .map(|(&n, (c, f))| {
            let d = sup_distance_to_uniform(c);
            SmoothingRow {
                gaussians: n,
                sup_distance: d,
                grid_error: (d - sup_distance_to_uniform(f)).abs(),
            }
        })
        .collect();
    let mut header = vec!["x".to_string()];
    header.extend(args.gaussians.iter().map(|n| format!("density_{n}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let edges: Vec<f64> = coarse[0].edges().collect();
    let h = coarse[0].bin_width();
    write_csv(
        &out.join("smoothing.csv"),
        &header_refs,
        edges.iter().enumerate().map(|(i, x)| {
            let mut row = vec![num(x + 0.5 * h)];
            row.extend(coarse.iter().map(|d| num(d.values()[i])));
            row
        }),
    )?;
    let report = SmoothingReport {
        period: args.period,
        bins: args.bins,
        rate: args.rate,
        rows,
    };
    write_json(
        &out.join("smoothing.json"),
        &Report::new("smoothing", config, &report),
    )?;
    Ok(report)
}
