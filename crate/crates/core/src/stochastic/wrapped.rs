use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use super::Density;
use crate::error::{positive, Error, Result};

pub const DEFAULT_BINS: usize = 4096;
/// Probability mass allowed to fall outside the wrapped periods.
pub const WRAP_TAIL_MASS: f64 = 1e-9;
pub const MAX_WRAP_PERIODS: usize = 10_000;
/// Grids up to this size are convolved by the direct product.
pub const DIRECT_CONVOLUTION_MAX_BINS: usize = 64;

const MIN_BINS: usize = 16;
const MASS_TOLERANCE: f64 = 1e-6;

/// A density on `[0, p)` stored as bin averages over `m` equal bins.
///
/// Bin `i` covers `[i p / m, (i + 1) p / m)`, and `values[i]` is the
/// probability of that bin divided by its width (units: 1/hour).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WrappedDensity {
    period: f64,
    values: Vec<f64>,
}

impl WrappedDensity {
    pub fn new(period: f64, values: Vec<f64>) -> Result<Self> {
        positive("period", period)?;
        if values.len() < MIN_BINS {
            return Err(Error::param(
                "bins",
                format!("need at least {MIN_BINS} bins, got {}", values.len()),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::param(
                "values",
                format!("negative or non-finite height {v}"),
            ));
        }
        let w = Self { period, values };
        let mass = w.mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::param(
                "values",
                format!("wrapped density has mass {mass}, expected 1 within {MASS_TOLERANCE}"),
            ));
        }
        Ok(w)
    }

    pub fn uniform(period: f64, bins: usize) -> Result<Self> {
        positive("period", period)?;
        Self::new(period, vec![1.0 / period; bins])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn bins(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bin_width(&self) -> f64 {
        self.period / self.values.len() as f64
    }

    pub fn mass(&self) -> f64 {
        self.bin_width() * self.values.iter().sum::<f64>()
    }

    /// Left edge of each bin.
    pub fn edges(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.bin_width();
        (0..self.bins()).map(move |i| i as f64 * h)
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.bins() != other.bins() || self.period != other.period {
            return Err(Error::GridMismatch(format!(
                "(p = {}, m = {}) vs (p = {}, m = {})",
                self.period,
                self.bins(),
                other.period,
                other.bins()
            )));
        }
        Ok(())
    }
}

/// Probability of each of `bins` equal bins of `[0, p)` under the law of
/// `X mod p`, computed from exact interval masses of the translates
/// `[k p + i h, k p + (i + 1) h)`.
///
/// Periods are added until the remaining tail mass is below
/// [`WRAP_TAIL_MASS`]; densities needing more than [`MAX_WRAP_PERIODS`]
/// periods are rejected.
pub fn wrapped_masses<D: Density + ?Sized>(
    density: &D,
    period: f64,
    bins: usize,
) -> Result<Vec<f64>> {
    positive("period", period)?;
    if bins == 0 {
        return Err(Error::param("bins", "must be positive"));
    }
    let (low, high) = density.support();
    let half_tail = 0.5 * WRAP_TAIL_MASS;
    let too_heavy = |periods: usize, tail: f64| Error::HeavyTail { periods, tail };

    let first = if low.is_finite() {
        (low / period).floor() as i64
    } else {
        let mut k = 0i64;
        while density.cdf(k as f64 * period) > half_tail {
            k -= 1;
            if (-k) as usize > MAX_WRAP_PERIODS {
                return Err(too_heavy(MAX_WRAP_PERIODS, density.cdf(k as f64 * period)));
            }
        }
        k
    };
    let end = if high.is_finite() {
        (high / period).ceil() as i64
    } else {
        let mut k = first + 1;
        while density.survival(k as f64 * period) > half_tail {
            k += 1;
            if (k - first) as usize > MAX_WRAP_PERIODS {
                return Err(too_heavy(
                    MAX_WRAP_PERIODS,
                    density.survival(k as f64 * period),
                ));
            }
        }
        k
    };
    let periods = (end - first).max(1) as usize;
    if periods > MAX_WRAP_PERIODS {
        return Err(too_heavy(periods, f64::NAN));
    }

    let m = bins as i64;
    let edge = |k: i64, i: i64| (k * m + i) as f64 * period / bins as f64;
    let mut masses = vec![0.0; bins];
    for k in first..first + periods as i64 {
        // Difference on whichever side of the median keeps relative precision.
        let upper_tail = density.survival(edge(k, 0)) < 0.5;
        let f = |x: f64| {
            if upper_tail {
                -density.survival(x)
            } else {
                density.cdf(x)
            }
        };
        let mut prev = f(edge(k, 0));
        for (i, mass) in masses.iter_mut().enumerate() {
            let next = f(edge(k, i as i64 + 1));
            *mass += next - prev;
            prev = next;
        }
    }
    for mass in &mut masses {
        *mass = mass.max(0.0);
    }
    Ok(masses)
}

/// Folds a density onto `[0, p)`: the law of `X mod p` as bin averages.
pub fn wrap_density<D: Density + ?Sized>(
    density: &D,
    period: f64,
    bins: usize,
) -> Result<WrappedDensity> {
    let masses = wrapped_masses(density, period, bins)?;
    let scale = bins as f64 / period;
    WrappedDensity::new(period, masses.into_iter().map(|q| q * scale).collect())
}

/// `max_i |values[i] - 1/p|`.
pub fn sup_distance_to_uniform(w: &WrappedDensity) -> f64 {
    let u = 1.0 / w.period;
    w.values.iter().map(|v| (v - u).abs()).fold(0.0, f64::max)
}

/// Density of `(A + B) mod p` for independent `A`, `B` on a shared grid.
///
/// Uses the direct product up to [`DIRECT_CONVOLUTION_MAX_BINS`] bins and a
/// transform-based cyclic convolution above.
pub fn convolve_mod_p(a: &WrappedDensity, b: &WrappedDensity) -> Result<WrappedDensity> {
    if a.bins() <= DIRECT_CONVOLUTION_MAX_BINS {
        convolve_direct(a, b)
    } else {
        convolve_fft(a, b)
    }
}

/// Bin masses of `A + B` when `A` and `B` are uniform within each bin: the
/// sum of bins `i` and `l` spreads as a triangle over bins `i + l` and
/// `i + l + 1`, so `c[k] = (h / 2) (s[k] + s[k - 1])` with
/// `s[k] = sum_i a[i] b[(k - i) mod m]`. O(m^2).
pub fn convolve_direct(a: &WrappedDensity, b: &WrappedDensity) -> Result<WrappedDensity> {
    a.same_grid(b)?;
    let m = a.bins();
    let h = a.bin_width();
    let s: Vec<f64> = (0..m)
        .map(|k| {
            let mut acc = 0.0;
            for (i, ai) in a.values.iter().enumerate() {
                acc += ai * b.values[(k + m - i) % m];
            }
            acc
        })
        .collect();
    let values = (0..m)
        .map(|k| 0.5 * h * (s[k] + s[(k + m - 1) % m]))
        .collect();
    Ok(WrappedDensity {
        period: a.period,
        values,
    })
}

pub fn convolve_fft(a: &WrappedDensity, b: &WrappedDensity) -> Result<WrappedDensity> {
    a.same_grid(b)?;
    let m = a.bins();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);
    let mut fa = to_complex(&a.values);
    let mut fb = to_complex(&b.values);
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (k, (x, y)) in fa.iter_mut().zip(&fb).enumerate() {
        *x *= y * half_bin_spread(k, m);
    }
    inverse.process(&mut fa);
    let scale = a.bin_width() / m as f64;
    Ok(WrappedDensity {
        period: a.period,
        values: fa.into_iter().map(|z| (z.re * scale).max(0.0)).collect(),
    })
}

/// Density of the `j`-term wrapped sum of i.i.d. copies of `w`.
pub fn self_convolve(w: &WrappedDensity, j: usize) -> Result<WrappedDensity> {
    if j == 0 {
        return Err(Error::param("j", "must be at least 1"));
    }
    if j == 1 {
        return Ok(w.clone());
    }
    let m = w.bins();
    let h = w.bin_width();
    let mut planner = FftPlanner::new();
    let mut spectrum = to_complex(&w.values);
    planner.plan_fft_forward(m).process(&mut spectrum);
    // Same as j - 1 pairwise convolutions: each contributes a factor h and
    // one half-bin spread.
    for (k, z) in spectrum.iter_mut().enumerate() {
        *z = (*z * h).powu(j as u32) / h * half_bin_spread(k, m).powu(j as u32 - 1);
    }
    planner.plan_fft_inverse(m).process(&mut spectrum);
    Ok(WrappedDensity {
        period: w.period,
        values: spectrum
            .into_iter()
            .map(|z| (z.re / m as f64).max(0.0))
            .collect(),
    })
}

/// Transform of `(delta[k] + delta[k - 1]) / 2`.
fn half_bin_spread(k: usize, m: usize) -> Complex<f64> {
    let theta = -2.0 * std::f64::consts::PI * k as f64 / m as f64;
    (Complex::new(1.0, 0.0) + Complex::from_polar(1.0, theta)) * 0.5
}

fn to_complex(values: &[f64]) -> Vec<Complex<f64>> {
    values.iter().map(|v| Complex::new(*v, 0.0)).collect()
}
