use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{non_negative, positive, Error, Result};

/// Anything that produces nonnegative durations (hours).
pub trait DurationSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
    fn mean(&self) -> f64;
}

/// A degenerate law that always returns the same duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fixed(pub f64);

impl DurationSampler for Fixed {
    fn sample<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        self.0
    }
    fn mean(&self) -> f64 {
        self.0
    }
}

fn exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln() / rate
}

/// Piecewise-constant density on `[0, step * heights.len())`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramDensity {
    step: f64,
    heights: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl HistogramDensity {
    /// Heights must be nonnegative and integrate to 1 within 1e-9.
    pub fn new(step: f64, heights: Vec<f64>) -> Result<Self> {
        positive("step", step)?;
        if heights.is_empty() {
            return Err(Error::param("heights", "empty histogram"));
        }
        if let Some(h) = heights.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(Error::param(
                "heights",
                format!("negative or non-finite height {h}"),
            ));
        }
        let mut cumulative = Vec::with_capacity(heights.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for h in &heights {
            acc += h * step;
            cumulative.push(acc);
        }
        if (acc - 1.0).abs() > 1e-9 {
            return Err(Error::param(
                "heights",
                format!("histogram integrates to {acc}, expected 1 within 1e-9"),
            ));
        }
        Ok(Self {
            step,
            heights,
            cumulative,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn upper(&self) -> f64 {
        self.step * self.heights.len() as f64
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let i = (x / self.step) as usize;
        self.heights.get(i).copied().unwrap_or(0.0)
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let i = (x / self.step) as usize;
        if i >= self.heights.len() {
            return 1.0;
        }
        (self.cumulative[i] + (x - i as f64 * self.step) * self.heights[i]).min(1.0)
    }

    fn quantile(&self, u: f64) -> f64 {
        let total = *self.cumulative.last().unwrap();
        let target = u * total;
        // first edge strictly above the target
        let i = self
            .cumulative
            .partition_point(|c| *c <= target)
            .saturating_sub(1);
        let i = i.min(self.heights.len() - 1);
        let h = self.heights[i];
        if h == 0.0 {
            return i as f64 * self.step;
        }
        i as f64 * self.step + (target - self.cumulative[i]) / h
    }

    fn mean(&self) -> f64 {
        self.heights
            .iter()
            .enumerate()
            .map(|(i, h)| h * self.step * (i as f64 + 0.5) * self.step)
            .sum()
    }
}

/// A bounded density on `[0, inf)` used for general inter-arrival laws.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneralDensity {
    Exponential { rate: f64 },
    Uniform { low: f64, high: f64 },
    Histogram(HistogramDensity),
}

impl GeneralDensity {
    fn validate(&self) -> Result<()> {
        match self {
            GeneralDensity::Exponential { rate } => positive("rate", *rate).map(drop),
            GeneralDensity::Uniform { low, high } => {
                non_negative("low", *low)?;
                if !(high.is_finite() && high > low) {
                    return Err(Error::param(
                        "high",
                        format!("need low < high, got [{low}, {high}]"),
                    ));
                }
                Ok(())
            }
            GeneralDensity::Histogram(_) => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            GeneralDensity::Exponential { rate } => 1.0 / rate,
            GeneralDensity::Uniform { low, high } => 0.5 * (low + high),
            GeneralDensity::Histogram(h) => h.mean(),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            GeneralDensity::Exponential { rate } => exponential(*rate, rng),
            GeneralDensity::Uniform { low, high } => {
                let u: f64 = rng.sample(Open01);
                low + u * (high - low)
            }
            GeneralDensity::Histogram(h) => h.quantile(rng.sample(Open01)),
        }
    }
}

/// Law of the up-time `X_j` between a repair and the next anomaly.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterArrivalModel {
    Exponential { rate: f64 },
    General { density: GeneralDensity, bound: f64 },
}

impl InterArrivalModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        positive("interarrival rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    /// Wraps a bounded density; the bound `M` is the density's supremum.
    pub fn general(density: GeneralDensity) -> Result<Self> {
        use super::Density;
        density.validate()?;
        let bound = density.sup();
        positive("density bound", bound)?;
        Ok(Self::General { density, bound })
    }

    pub fn mean(&self) -> f64 {
        match self {
            InterArrivalModel::Exponential { rate } => 1.0 / rate,
            InterArrivalModel::General { density, .. } => density.mean(),
        }
    }

    /// Upper bound `M` on the inter-arrival density.
    pub fn bound(&self) -> f64 {
        match self {
            InterArrivalModel::Exponential { rate } => *rate,
            InterArrivalModel::General { bound, .. } => *bound,
        }
    }

    pub fn density(&self) -> GeneralDensity {
        match self {
            InterArrivalModel::Exponential { rate } => GeneralDensity::Exponential { rate: *rate },
            InterArrivalModel::General { density, .. } => density.clone(),
        }
    }
}

impl DurationSampler for InterArrivalModel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            InterArrivalModel::Exponential { rate } => exponential(*rate, rng),
            InterArrivalModel::General { density, .. } => density.sample(rng),
        }
    }

    fn mean(&self) -> f64 {
        InterArrivalModel::mean(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaintenanceKind {
    Exponential {
        rate: f64,
    },
    Empirical {
        samples: Vec<f64>,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    /// With probability `quick_share` uniform on `[0, quick_max]`, otherwise
    /// log-normal.
    Mixture {
        quick_share: f64,
        quick_max: f64,
        mu: f64,
        sigma: f64,
    },
}

/// Law of the repair duration `Y_j`, with its first two moments cached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaintenanceModel {
    kind: MaintenanceKind,
    mean: f64,
    second_moment: f64,
}

impl MaintenanceModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        positive("maintenance rate", rate)?;
        Ok(Self {
            kind: MaintenanceKind::Exponential { rate },
            mean: 1.0 / rate,
            second_moment: 2.0 / (rate * rate),
        })
    }

    /// Resamples uniformly from observed durations. Moments are the sample
    /// moments. An all-zero list is accepted and models instant repair.
    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("maintenance samples", "empty sample list"));
        }
        for s in &samples {
            non_negative("maintenance sample", *s)?;
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let second_moment = samples.iter().map(|s| s * s).sum::<f64>() / n;
        Ok(Self {
            kind: MaintenanceKind::Empirical { samples },
            mean,
            second_moment,
        })
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::param("mu", "must be finite"));
        }
        non_negative("sigma", sigma)?;
        let mean = (mu + 0.5 * sigma * sigma).exp();
        let second_moment = (2.0 * mu + 2.0 * sigma * sigma).exp();
        if !second_moment.is_finite() {
            return Err(Error::param("sigma", "second moment overflows"));
        }
        Ok(Self {
            kind: MaintenanceKind::LogNormal { mu, sigma },
            mean,
            second_moment,
        })
    }

    pub fn mixture(quick_share: f64, quick_max: f64, mu: f64, sigma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&quick_share) {
            return Err(Error::param(
                "quick_share",
                format!("must lie in [0, 1], got {quick_share}"),
            ));
        }
        non_negative("quick_max", quick_max)?;
        let slow = Self::lognormal(mu, sigma)?;
        Ok(Self {
            kind: MaintenanceKind::Mixture {
                quick_share,
                quick_max,
                mu,
                sigma,
            },
            mean: quick_share * quick_max / 2.0 + (1.0 - quick_share) * slow.mean,
            second_moment: quick_share * quick_max * quick_max / 3.0
                + (1.0 - quick_share) * slow.second_moment,
        })
    }

    /// Mean 2 h 8 min: a quarter of tickets closed within 5 minutes, the rest
    /// log-normal with `sigma = 0.8`.
    pub fn paper_mixture() -> Self {
        let (share, quick_max, sigma) = (0.25, 5.0 / 60.0, 0.8);
        let target = 2.0 + 8.0 / 60.0;
        let slow_mean: f64 = (target - share * quick_max / 2.0) / (1.0 - share);
        Self::mixture(
            share,
            quick_max,
            slow_mean.ln() - sigma * sigma / 2.0,
            sigma,
        )
        .expect("valid constants")
    }

    pub fn kind(&self) -> &MaintenanceKind {
        &self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `E[Y^2]`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }
}

impl DurationSampler for MaintenanceModel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            MaintenanceKind::Exponential { rate } => exponential(*rate, rng),
            MaintenanceKind::Empirical { samples } => samples[rng.random_range(0..samples.len())],
            MaintenanceKind::LogNormal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + sigma * z).exp()
            }
            MaintenanceKind::Mixture {
                quick_share,
                quick_max,
                mu,
                sigma,
            } => {
                let u: f64 = rng.random();
                if u < *quick_share {
                    rng.random::<f64>() * quick_max
                } else {
                    let z: f64 = rng.sample(StandardNormal);
                    (mu + sigma * z).exp()
                }
            }
        }
    }

    fn mean(&self) -> f64 {
        self.mean
    }
}
