//! Closed-form limit of the running loss and the bound evaluators used to
//! validate Monte Carlo output.

use serde::Serialize;

use crate::error::{non_negative, positive, Error, Result};
use crate::stochastic::{fourier_bound_exponential, FourierBound};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitInputs {
    pub mean_x: f64,
    pub mean_y: f64,
    pub u_bar: f64,
    pub n_cells: usize,
}

impl LimitInputs {
    pub fn validate(&self) -> Result<()> {
        positive("mean_x", self.mean_x)?;
        non_negative("mean_y", self.mean_y)?;
        non_negative("u_bar", self.u_bar)?;
        if self.n_cells == 0 {
            return Err(Error::param("n_cells", "need at least one cell"));
        }
        Ok(())
    }
}

/// `N E[Y] U_bar / (E[X] + E[Y])`.
pub fn expected_loss_limit(inputs: &LimitInputs) -> Result<f64> {
    inputs.validate()?;
    Ok(inputs.n_cells as f64 * inputs.mean_y * inputs.u_bar / (inputs.mean_x + inputs.mean_y))
}

/// `MTBF / (MTBF + MTTR)`.
pub fn availability(mtbf: f64, mttr: f64) -> Result<f64> {
    positive("mtbf", mtbf)?;
    non_negative("mttr", mttr)?;
    Ok(mtbf / (mtbf + mttr))
}

/// Long-run downtime fraction `E[Y] / (E[X] + E[Y])`.
pub fn delta(mean_x: f64, mean_y: f64) -> Result<f64> {
    positive("mean_x", mean_x)?;
    non_negative("mean_y", mean_y)?;
    Ok(mean_y / (mean_x + mean_y))
}

/// Stationary mean loss per repair, `E[Y] U_bar`.
pub fn i_bar(mean_y: f64, u_bar: f64) -> Result<f64> {
    non_negative("mean_y", mean_y)?;
    non_negative("u_bar", u_bar)?;
    Ok(mean_y * u_bar)
}

/// Constants entering the covariance and variance bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub alpha: f64,
    pub c: f64,
    /// `M + 1/p` with `M` a bound on the wrapped inter-arrival density.
    pub c_prime: f64,
    pub period: f64,
    pub i_bar: f64,
    pub k: f64,
    pub e_y2: f64,
}

impl BoundInputs {
    /// `sup_wrapped` is `M`, the supremum of the wrapped inter-arrival density.
    pub fn new(
        fb: &FourierBound,
        sup_wrapped: f64,
        period: f64,
        i_bar: f64,
        k: f64,
        e_y2: f64,
    ) -> Result<Self> {
        positive("period", period)?;
        non_negative("sup_wrapped", sup_wrapped)?;
        non_negative("i_bar", i_bar)?;
        non_negative("k", k)?;
        non_negative("e_y2", e_y2)?;
        let b = Self {
            alpha: fb.alpha,
            c: fb.c,
            c_prime: sup_wrapped + 1.0 / period,
            period,
            i_bar,
            k,
            e_y2,
        };
        b.check_alpha()?;
        Ok(b)
    }

    /// Exponential inter-arrivals of rate `rate`: the wrapped density peaks at
    /// 0 with `M = rate / (1 - e^{-rate p})`.
    pub fn exponential(
        rate: f64,
        period: f64,
        i_bar: f64,
        k: f64,
        e_y2: f64,
        terms: usize,
    ) -> Result<Self> {
        let fb = fourier_bound_exponential(rate, period, terms)?;
        let m = rate / -(-rate * period).exp_m1();
        Self::new(&fb, m, period, i_bar, k, e_y2)
    }

    fn check_alpha(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::NonContracting { alpha: self.alpha });
        }
        Ok(())
    }
}

/// `I_bar^2 (1 + p C' C (a^j + a^k) - (1 - C a^{j-1} / p)(1 - C a^{j+k-1} / p))`.
pub fn covariance_upper_bound(j: usize, k: usize, b: &BoundInputs) -> Result<f64> {
    if j == 0 || k == 0 {
        return Err(Error::param("j, k", "both must be at least 1"));
    }
    let a = b.alpha;
    let p = b.period;
    let pw = |e: usize| a.powi(e as i32);
    let cross = p * b.c_prime * b.c * (pw(j) + pw(k));
    let first = 1.0 - b.c * pw(j - 1) / p;
    let second = 1.0 - b.c * pw(j + k - 1) / p;
    Ok(b.i_bar * b.i_bar * (1.0 + cross - first * second))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveBound {
    Paper,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceReport {
    pub j: usize,
    pub k: usize,
    pub paper: f64,
    /// `K^2 E[Y^2]`, which bounds `E[I_j I_{j+k}]` outright.
    pub trivial: f64,
    pub value: f64,
    pub active: ActiveBound,
}

pub fn covariance_report(j: usize, k: usize, b: &BoundInputs) -> Result<CovarianceReport> {
    let paper = covariance_upper_bound(j, k, b)?;
    let trivial = b.k * b.k * b.e_y2;
    let (value, active) = if paper <= trivial {
        (paper, ActiveBound::Paper)
    } else {
        (trivial, ActiveBound::Trivial)
    };
    Ok(CovarianceReport {
        j,
        k,
        paper,
        trivial,
        value,
        active,
    })
}

/// Upper bound on `Var[(1/n) sum_{j<=n} I_j]`.
pub fn variance_upper_bound(n: usize, b: &BoundInputs) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    b.check_alpha()?;
    let n_f = n as f64;
    let (a, c, cp, p) = (b.alpha, b.c, b.c_prime, b.period);
    let i2 = b.i_bar * b.i_bar;
    let lead = (b.k * b.k * b.e_y2 - i2 * (1.0 - c / p).powi(2)) / n_f;
    let bracket = n_f * cp * p / (1.0 - a)
        + a * a * cp * p / (1.0 - a).powi(2)
        + n_f / (p * (1.0 - a))
        + a * a / (p * (1.0 - a) * (1.0 - a * a));
    Ok(lead + 2.0 * i2 * c / (n_f * n_f) * bracket)
}

/// `C alpha^j / p`.
pub fn theorem1_bound(j: usize, fb: &FourierBound, period: f64) -> Result<f64> {
    if j == 0 {
        return Err(Error::param("j", "must be at least 1"));
    }
    positive("period", period)?;
    Ok(fb.sup_bound(j, period))
}
