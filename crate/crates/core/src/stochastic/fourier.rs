//! Geometric bounds on the distance between a wrapped `j`-term sum and the
//! uniform law on `[0, p)`.
//!
//! Both constructors return a [`FourierBound`] `(alpha, C)` with
//! `sup |f_j - 1/p| <= C alpha^j / p`, where `alpha = sup_n |g(n)|` is the
//! largest nonzero Fourier coefficient of the inter-arrival density at
//! frequencies `n / p` and `C = sum_n |g(n)|^2 / alpha^2`. The infinite series
//! is truncated after `N` terms and an analytic tail bound is added, so the
//! reported `C` never under-estimates the series.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{wrapped_masses, Density};
use crate::error::{positive, Error, Result};

pub const DEFAULT_TERMS: usize = 10_000;
const MIN_TERMS: usize = 100;
/// Coefficients this small are treated as exactly zero.
const ZERO_ALPHA: f64 = 1e-12;
const CONTRACTION_MARGIN: f64 = 1e-9;
const MIN_FINE_BINS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierBound {
    pub alpha: f64,
    /// Partial sum plus tail bound.
    pub c: f64,
    pub terms: usize,
    /// The tail bound included in `c`.
    pub tail: f64,
}

impl FourierBound {
    /// `C alpha^j / p`.
    pub fn sup_bound(&self, j: usize, period: f64) -> f64 {
        self.c * self.alpha.powi(j as i32) / period
    }
}

fn check_terms(terms: usize) -> Result<()> {
    if terms < MIN_TERMS {
        return Err(Error::param(
            "terms",
            format!("need at least {MIN_TERMS}, got {terms}"),
        ));
    }
    Ok(())
}

/// Closed form for exponential inter-arrivals of rate `rate`:
/// `alpha = rate p / sqrt(rate^2 p^2 + 4 pi^2)` and
/// `C = sum_n (rate^2 p^2 + 4 pi^2) / (rate^2 p^2 + 4 pi^2 n^2)`.
pub fn fourier_bound_exponential(rate: f64, period: f64, terms: usize) -> Result<FourierBound> {
    positive("rate", rate)?;
    positive("period", period)?;
    check_terms(terms)?;
    let lp2 = (rate * period).powi(2);
    let four_pi2 = 4.0 * PI * PI;
    let num = lp2 + four_pi2;
    let alpha = (rate * period) / num.sqrt();
    // smallest terms first
    let partial: f64 = (1..=terms)
        .rev()
        .map(|n| num / (lp2 + four_pi2 * (n * n) as f64))
        .sum();
    // sum_{n > N} 1/n^2 < 1/N
    let tail = num / four_pi2 / terms as f64;
    Ok(FourierBound {
        alpha,
        c: partial + tail,
        terms,
        tail,
    })
}

/// Fourier coefficients `g(n) = int f(x) e^{-2 pi i n x / p} dx` for
/// `n = 1..=terms`.
///
/// The density is first folded onto a fine grid of `[0, p)` using exact bin
/// masses; the transform of the resulting step function is then evaluated in
/// closed form for every `n` at once:
/// `g(n) = Q(n) (1 - e^{-i theta}) / (i theta)` with `theta = 2 pi n / m` and
/// `Q` the discrete Fourier transform of the bin masses.
pub fn fourier_coefficients<D: Density + ?Sized>(
    density: &D,
    period: f64,
    terms: usize,
) -> Result<Vec<Complex<f64>>> {
    let bins = MIN_FINE_BINS.max((64 * terms).next_power_of_two());
    let masses = wrapped_masses(density, period, bins)?;
    let mut spectrum: Vec<Complex<f64>> =
        masses.into_iter().map(|q| Complex::new(q, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(bins)
        .process(&mut spectrum);
    Ok((1..=terms)
        .map(|n| {
            let theta = 2.0 * PI * n as f64 / bins as f64;
            let i_theta = Complex::new(0.0, theta);
            let box_transform = (Complex::new(1.0, 0.0) - (-i_theta).exp()) / i_theta;
            spectrum[n] * box_transform
        })
        .collect())
}

/// Numerical bound for any bounded density, with `alpha = max_n |g(n)|` over
/// `n = 1..=terms`.
///
/// The tail `sum_{n > N} |g(n)|^2` is estimated as `max n^2 |g(n)|^2 / N` over
/// the upper half of the computed range, which is exact in the limit for
/// densities whose coefficients decay like `1/n`. A density that is
/// numerically uniform (`alpha < 1e-12`) yields `alpha = C = 0`.
pub fn fourier_bound_general<D: Density + ?Sized>(
    density: &D,
    period: f64,
    terms: usize,
) -> Result<FourierBound> {
    positive("period", period)?;
    check_terms(terms)?;
    let coefficients = fourier_coefficients(density, period, terms)?;
    let alpha = coefficients.iter().map(|g| g.norm()).fold(0.0, f64::max);
    if alpha >= 1.0 - CONTRACTION_MARGIN {
        return Err(Error::NonContracting { alpha });
    }
    if alpha < ZERO_ALPHA {
        return Ok(FourierBound {
            alpha: 0.0,
            c: 0.0,
            terms,
            tail: 0.0,
        });
    }
    let partial: f64 = coefficients.iter().rev().map(|g| g.norm_sqr()).sum();
    let tail_scale = coefficients
        .iter()
        .enumerate()
        .skip(terms / 2)
        .map(|(i, g)| ((i + 1) as f64).powi(2) * g.norm_sqr())
        .fold(0.0, f64::max);
    let tail = tail_scale / terms as f64 / (alpha * alpha);
    Ok(FourierBound {
        alpha,
        c: partial / (alpha * alpha) + tail,
        terms,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::GeneralDensity;

    #[test]
    fn exponential_alpha_values() {
        // rate p = 0.456: 0.456 / sqrt(0.456^2 + 4 pi^2)
        let b = fourier_bound_exponential(0.019, 24.0, DEFAULT_TERMS).unwrap();
        let expect = 0.456 / (0.456f64.powi(2) + 4.0 * PI * PI).sqrt();
        assert!((b.alpha - expect).abs() < 1e-15);
        assert!((b.alpha - 0.0724).abs() < 5e-5);
        // rate p = 10: 10 / 11.811
        let b = fourier_bound_exponential(10.0, 1.0, DEFAULT_TERMS).unwrap();
        assert!((b.alpha - 0.8467).abs() < 5e-5, "{}", b.alpha);
        let tiny = fourier_bound_exponential(1e-9, 5.0, 100).unwrap();
        assert!(tiny.alpha < 1e-9);
    }

    #[test]
    fn exponential_c_is_converged() {
        let b1 = fourier_bound_exponential(10.0, 1.0, DEFAULT_TERMS).unwrap();
        let b2 = fourier_bound_exponential(10.0, 1.0, 2 * DEFAULT_TERMS).unwrap();
        assert!(b2.c <= b1.c, "tail bound must over-estimate");
        assert!((b1.c - b2.c).abs() < 1e-6 * b1.c);
        // brute-force partial sum to 10^7 terms plus 1/N tail as an oracle
        let num = 100.0 + 4.0 * PI * PI;
        let brute: f64 = (1..=10_000_000u64)
            .rev()
            .map(|n| num / (100.0 + 4.0 * PI * PI * (n * n) as f64))
            .sum();
        assert!(b1.c >= brute && b1.c - brute < 1e-6 * brute);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fourier_bound_exponential(0.0, 1.0, 1000).is_err());
        assert!(fourier_bound_exponential(1.0, -1.0, 1000).is_err());
        assert!(fourier_bound_exponential(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn alpha_grows_with_rate_times_period() {
        let mut prev = 0.0;
        for lp in [0.01, 0.1, 1.0, 5.0, 20.0, 200.0] {
            let a = fourier_bound_exponential(lp, 1.0, 100).unwrap().alpha;
            assert!(a > prev && a < 1.0);
            prev = a;
        }
    }

    #[test]
    fn general_path_matches_closed_form() {
        let d = GeneralDensity::Exponential { rate: 10.0 };
        let g = fourier_bound_general(&d, 1.0, DEFAULT_TERMS).unwrap();
        let e = fourier_bound_exponential(10.0, 1.0, DEFAULT_TERMS).unwrap();
        assert!(
            (g.alpha - e.alpha).abs() < 1e-6,
            "{} vs {}",
            g.alpha,
            e.alpha
        );
        assert!((g.c - e.c).abs() < 1e-6, "{} vs {}", g.c, e.c);
    }

    #[test]
    fn general_coefficients_of_exponential() {
        // g(n) = rate p / (rate p + 2 pi i n)
        let d = GeneralDensity::Exponential { rate: 0.5 };
        let p = 3.0;
        let gs = fourier_coefficients(&d, p, 200).unwrap();
        for (i, g) in gs.iter().enumerate() {
            let n = (i + 1) as f64;
            let expect = Complex::new(1.5, 0.0) / Complex::new(1.5, 2.0 * PI * n);
            assert!((g - expect).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn uniform_over_period_has_no_modes() {
        let d = GeneralDensity::Uniform {
            low: 0.0,
            high: 2.0,
        };
        let b = fourier_bound_general(&d, 2.0, 1000).unwrap();
        assert_eq!(b.alpha, 0.0);
        assert_eq!(b.c, 0.0);
    }

    #[test]
    fn half_period_uniform() {
        // |g(n)| = |sinc| profile with |g(1)| = 2/pi
        let p = 4.0;
        let d = GeneralDensity::Uniform {
            low: 0.0,
            high: p / 2.0,
        };
        let b = fourier_bound_general(&d, p, 1000).unwrap();
        assert!((b.alpha - 2.0 / PI).abs() < 1e-9, "{}", b.alpha);
        // odd modes only: |g(n)| = 2/(pi n); sum |g|^2 / alpha^2 = sum_{odd} 1/n^2 = pi^2/8
        assert!((b.c - PI * PI / 8.0).abs() < 1e-3, "{}", b.c);
        assert!(b.c >= PI * PI / 8.0 - 1e-9);
    }

    #[test]
    fn atomic_density_is_rejected() {
        // all mass in one fine bin behaves like a lattice law
        let d = GeneralDensity::Uniform {
            low: 1.0,
            high: 1.0 + 1e-13,
        };
        assert!(matches!(
            fourier_bound_general(&d, 1.0, 100),
            Err(Error::NonContracting { .. })
        ));
    }
}
