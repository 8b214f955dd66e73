use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{non_negative, positive, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileForm {
    /// `amplitude * sin(2 pi t / p) + offset`
    Sinusoid { amplitude: f64, offset: f64 },
    /// Hourly points, linearly interpolated and wrapped at the period end.
    Sampled { values: Vec<f64> },
}

/// A nonnegative, bounded utility with period `p` hours.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicProfile {
    period: f64,
    form: ProfileForm,
    bound: f64,
}

impl PeriodicProfile {
    /// Requires `offset >= amplitude >= 0` so the profile never goes negative.
    pub fn sinusoid(amplitude: f64, offset: f64, period: f64) -> Result<Self> {
        non_negative("amplitude", amplitude)?;
        positive("period", period)?;
        if !(offset.is_finite() && offset >= amplitude) {
            return Err(Error::param(
                "offset",
                format!("must be >= amplitude {amplitude}, got {offset}"),
            ));
        }
        Ok(Self {
            period,
            form: ProfileForm::Sinusoid { amplitude, offset },
            bound: offset + amplitude,
        })
    }

    pub fn constant(value: f64, period: f64) -> Result<Self> {
        Self::sinusoid(0.0, value, period)
    }

    /// One value per hour; the period is `values.len()` hours.
    pub fn sampled(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::param("values", "need at least two hourly points"));
        }
        for v in &values {
            non_negative("profile value", *v)?;
        }
        let bound = values.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            period: values.len() as f64,
            form: ProfileForm::Sampled { values },
            bound,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn form(&self) -> &ProfileForm {
        &self.form
    }

    /// The constant `K` with `0 <= U(t) <= K`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `U(t)`, defined for every real `t` by periodic extension.
    pub fn value_at(&self, t: f64) -> f64 {
        match &self.form {
            ProfileForm::Sinusoid { amplitude, offset } => {
                let phase = t.rem_euclid(self.period) / self.period;
                amplitude * (2.0 * PI * phase).sin() + offset
            }
            ProfileForm::Sampled { values } => {
                let s = t.rem_euclid(self.period);
                let i = (s.floor() as usize).min(values.len() - 1);
                let frac = s - i as f64;
                let next = values[(i + 1) % values.len()];
                values[i] + (next - values[i]) * frac
            }
        }
    }

    /// `U_bar = (1/p) int_0^p U(t) dt`.
    pub fn mean(&self) -> f64 {
        match &self.form {
            ProfileForm::Sinusoid { offset, .. } => *offset,
            // periodic composite trapezoid over the hourly knots
            ProfileForm::Sampled { values } => values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    /// Points inside `(a, b)` where `U` is not smooth. Quadrature splits there.
    pub fn kinks_between(&self, a: f64, b: f64) -> Vec<f64> {
        match &self.form {
            ProfileForm::Sinusoid { .. } => Vec::new(),
            ProfileForm::Sampled { .. } => {
                let first = a.floor() + 1.0;
                let mut out = Vec::new();
                let mut k = first;
                while k < b {
                    out.push(k);
                    k += 1.0;
                }
                out
            }
        }
    }

    /// Averages a sampled profile over consecutive blocks of `hours` hours,
    /// e.g. a 168-hour weekly profile into a 24-hour daily one.
    pub fn fold(&self, hours: usize) -> Result<Self> {
        let ProfileForm::Sampled { values } = &self.form else {
            return Err(Error::param("fold", "only sampled profiles can be folded"));
        };
        if hours < 2 || values.len() % hours != 0 {
            return Err(Error::param(
                "fold",
                format!("{hours} does not divide the period {}", values.len()),
            ));
        }
        let blocks = values.len() / hours;
        let folded = (0..hours)
            .map(|h| (0..blocks).map(|b| values[b * hours + h]).sum::<f64>() / blocks as f64)
            .collect();
        Self::sampled(folded)
    }

    /// Offset and amplitude of the first harmonic, from hourly samples over
    /// one period. A sinusoid returns its own parameters.
    pub fn fundamental(&self) -> (f64, f64) {
        match &self.form {
            ProfileForm::Sinusoid { amplitude, offset } => (*offset, *amplitude),
            ProfileForm::Sampled { values } => {
                let n = values.len() as f64;
                let (mut re, mut im) = (0.0, 0.0);
                for (k, v) in values.iter().enumerate() {
                    let w = 2.0 * PI * k as f64 / n;
                    re += v * w.cos();
                    im += v * w.sin();
                }
                (self.mean(), 2.0 * (re * re + im * im).sqrt() / n)
            }
        }
    }
}
