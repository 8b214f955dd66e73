use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::PeriodicProfile;
use crate::error::{non_negative, positive, Error, Result};
use crate::rng::StreamKey;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    /// Independent `N(0, sigma^2)` draws at every grid point.
    White {
        sigma: f64,
    },
    /// `dB = -theta B dt + sigma dW`, started from its stationary law.
    Ou {
        theta: f64,
        sigma: f64,
    },
}

/// Zero-mean additive noise `B(t)` sampled on a grid of step `dt` hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub dt: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        kind: NoiseKind::None,
        dt: 1.0,
    };

    pub fn white(sigma: f64, dt: f64) -> Result<Self> {
        non_negative("sigma", sigma)?;
        positive("dt", dt)?;
        Ok(Self {
            kind: NoiseKind::White { sigma },
            dt,
        })
    }

    pub fn ou(theta: f64, sigma: f64, dt: f64) -> Result<Self> {
        positive("theta", theta)?;
        non_negative("sigma", sigma)?;
        positive("dt", dt)?;
        Ok(Self {
            kind: NoiseKind::Ou { theta, sigma },
            dt,
        })
    }

    pub fn is_none(&self) -> bool {
        matches!(self.kind, NoiseKind::None)
    }

    /// `Var[B(t)]`: `sigma^2 / (2 theta)` for OU, `sigma^2` for white noise.
    pub fn stationary_variance(&self) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::White { sigma } => sigma * sigma,
            NoiseKind::Ou { theta, sigma } => sigma * sigma / (2.0 * theta),
        }
    }
}

/// A realised noise path on `start + k dt`, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisePath {
    start: f64,
    dt: f64,
    values: Vec<f64>,
    key: Option<StreamKey>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl NoisePath {
    pub fn new(start: f64, dt: f64, values: Vec<f64>, key: Option<StreamKey>) -> Result<Self> {
        positive("dt", dt)?;
        if !start.is_finite() {
            return Err(Error::param("start", "must be finite"));
        }
        if values.is_empty() {
            return Err(Error::param(
                "values",
                "noise path needs at least one point",
            ));
        }
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * dt * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Ok(Self {
            start,
            dt,
            values,
            key,
            cumulative,
        })
    }

    pub fn constant(value: f64, start: f64, end: f64, dt: f64) -> Result<Self> {
        let n = ((end - start) / dt).ceil().max(0.0) as usize + 1;
        Self::new(start, dt, vec![value; n], None)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + (self.values.len() - 1) as f64 * self.dt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn key(&self) -> Option<StreamKey> {
        self.key
    }

    fn check(&self, t: f64) -> Result<()> {
        // allow for rounding in `end`
        let slack = 1e-9 * self.dt;
        if t < self.start - slack || t > self.end() + slack {
            return Err(Error::OutOfRange {
                t,
                start: self.start,
                end: self.end(),
            });
        }
        Ok(())
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let s = ((t - self.start) / self.dt).max(0.0);
        let last = self.values.len() - 1;
        let i = (s.floor() as usize).min(last.saturating_sub(1));
        (i, (s - i as f64).min(1.0))
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        if self.values.len() == 1 {
            return Ok(self.values[0]);
        }
        let (i, f) = self.locate(t);
        Ok(self.values[i] + (self.values[i + 1] - self.values[i]) * f)
    }

    fn antiderivative(&self, t: f64) -> f64 {
        if self.values.len() == 1 {
            return self.values[0] * (t - self.start);
        }
        let (i, f) = self.locate(t);
        let v0 = self.values[i];
        let vt = v0 + (self.values[i + 1] - v0) * f;
        self.cumulative[i] + 0.5 * f * self.dt * (v0 + vt)
    }

    /// Exact integral of the interpolated path over `[a, b]` (trapezoid rule
    /// on the `dt` grid with partial end cells).
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if b < a {
            return Err(Error::BadInterval { t0: a, t1: b });
        }
        self.check(a)?;
        self.check(b)?;
        Ok(self.antiderivative(b) - self.antiderivative(a))
    }
}

/// Samples `B` on `[0, horizon]`.
///
/// OU paths use the exact Gauss-Markov transition
/// `B_{k+1} = B_k e^{-theta dt} + N(0, sigma^2 (1 - e^{-2 theta dt}) / (2 theta))`
/// and start from the stationary law, so their statistics do not depend on
/// `dt`.
pub fn sample_noise_path(model: &NoiseModel, horizon: f64, key: StreamKey) -> Result<NoisePath> {
    positive("horizon", horizon)?;
    let n = (horizon / model.dt).ceil() as usize + 1;
    let mut rng = key.rng();
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let values = match model.kind {
        NoiseKind::None => vec![0.0; n],
        NoiseKind::White { sigma } => (0..n).map(|_| sigma * normal()).collect(),
        NoiseKind::Ou { theta, sigma } => {
            let decay = (-theta * model.dt).exp();
            let step_sd = sigma * ((1.0 - decay * decay) / (2.0 * theta)).sqrt();
            let mut b = sigma / (2.0 * theta).sqrt() * normal();
            let mut out = Vec::with_capacity(n);
            out.push(b);
            for _ in 1..n {
                b = b * decay + step_sd * normal();
                out.push(b);
            }
            out
        }
    };
    NoisePath::new(0.0, model.dt, values, Some(key))
}

/// `U'(t) + B(t)`. Not clipped at zero: the loss is linear in `B`.
pub fn corrupted_utility(profile: &PeriodicProfile, path: &NoisePath, t: f64) -> Result<f64> {
    Ok(profile.value_at(t) + path.value_at(t)?)
}
