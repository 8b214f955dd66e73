use std::path::Path;

use periodic_loss::stochastic::{
    fourier_bound_exponential, fourier_bound_general, wrap_density, FourierBound, GeneralDensity,
    InterArrivalModel, DEFAULT_BINS,
};
use periodic_loss::theory::{
    covariance_report, i_bar, theorem1_bound, variance_upper_bound, BoundInputs, CovarianceReport,
};
use serde::Serialize;

use crate::output::num;
use crate::{write_csv, write_json, CliError, Report, StudyConfig};

const GRID_LAMBDAS: usize = 40;
const GRID_LAMBDA_RANGE: (f64, f64) = (0.01, 20.0);
const GRID_PERIODS: std::ops::RangeInclusive<u32> = 1..=48;
const COVARIANCE_LAGS: [usize; 6] = [1, 2, 5, 10, 20, 50];
const VARIANCE_SIZES: [usize; 4] = [10, 100, 1000, 10_000];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub alpha_closed: f64,
    pub alpha_general: f64,
    pub c_closed: f64,
    pub c_general: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    pub n: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub period: f64,
    pub fourier: FourierBound,
    /// `C alpha^j / p` for `j = 1..=30`.
    pub theorem1: Vec<f64>,
    pub inputs: BoundInputs,
    pub covariance: Vec<CovarianceReport>,
    pub variance: Vec<VarianceRow>,
    /// Closed-form and numerical paths on the configured exponential law.
    pub exponential_cross_check: Option<CrossCheck>,
    /// Uniform law on `[0, p)`: no Fourier modes, so `alpha = 0`.
    pub uniform_alpha: f64,
}

fn lambda_grid() -> Vec<f64> {
    let (lo, hi) = GRID_LAMBDA_RANGE;
    (0..GRID_LAMBDAS)
        .map(|i| lo * (hi / lo).powf(i as f64 / (GRID_LAMBDAS - 1) as f64))
        .collect()
}

pub fn cmd_bounds(config: &StudyConfig, out: &Path) -> Result<BoundsReport, CliError> {
    let x = config.interarrival_model()?;
    let y = config.maintenance_model()?;
    let profile = config.profile_model()?;
    let p = profile.period();
    let terms = config.fourier_terms;
    let ibar = i_bar(y.mean(), profile.mean())?;

    let (fourier, sup_wrapped, cross) = match &x {
        InterArrivalModel::Exponential { rate } => {
            let closed = fourier_bound_exponential(*rate, p, terms)?;
            let general =
                fourier_bound_general(&GeneralDensity::Exponential { rate: *rate }, p, terms)?;
            let m = rate / -(-rate * p).exp_m1();
            let cross = CrossCheck {
                alpha_closed: closed.alpha,
                alpha_general: general.alpha,
                c_closed: closed.c,
                c_general: general.c,
            };
            (closed, m, Some(cross))
        }
        InterArrivalModel::General { density, .. } => {
            let fb = fourier_bound_general(density, p, terms)?;
            let wrapped = wrap_density(density, p, DEFAULT_BINS)?;
            let m = wrapped.values().iter().copied().fold(0.0, f64::max);
            (fb, m, None)
        }
    };
    let inputs = BoundInputs::new(
        &fourier,
        sup_wrapped,
        p,
        ibar,
        profile.bound(),
        y.second_moment(),
    )?;
    let theorem1 = (1..=30)
        .map(|j| theorem1_bound(j, &fourier, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut covariance = Vec::new();
    for &j in &COVARIANCE_LAGS {
        for &k in &COVARIANCE_LAGS {
            covariance.push(covariance_report(j, k, &inputs)?);
        }
    }
    let variance = VARIANCE_SIZES
        .iter()
        .map(|&n| {
            Ok(VarianceRow {
                n,
                bound: variance_upper_bound(n, &inputs)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let uniform = fourier_bound_general(&GeneralDensity::Uniform { low: 0.0, high: p }, p, 100)?;

    let lambdas = lambda_grid();
    let mut grid_rows = Vec::new();
    for &lambda in &lambdas {
        for period in GRID_PERIODS {
            let a = fourier_bound_exponential(lambda, period as f64, 100)?.alpha;
            grid_rows.push(vec![num(lambda), period.to_string(), num(a)]);
        }
    }
    write_csv(
        &out.join("alpha_grid.csv"),
        &["lambda", "p", "alpha"],
        grid_rows,
    )?;

    let report = BoundsReport {
        period: p,
        fourier,
        theorem1,
        inputs,
        covariance,
        variance,
        exponential_cross_check: cross,
        uniform_alpha: uniform.alpha,
    };
    write_json(
        &out.join("bounds.json"),
        &Report::new("bounds", config, &report),
    )?;
    Ok(report)
}
