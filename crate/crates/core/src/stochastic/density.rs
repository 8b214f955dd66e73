use super::models::GeneralDensity;

/// A probability density with an accurate distribution function.
///
/// `cdf` and `survival` are both required so that interval masses far in
/// either tail keep full relative precision.
pub trait Density {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
    /// Closed support `(low, high)`; either end may be infinite.
    fn support(&self) -> (f64, f64);
    /// An upper bound on the density.
    fn sup(&self) -> f64;
}

impl<D: Density + ?Sized> Density for &D {
    fn pdf(&self, x: f64) -> f64 {
        (**self).pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn survival(&self, x: f64) -> f64 {
        (**self).survival(x)
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn sup(&self) -> f64 {
        (**self).sup()
    }
}

impl Density for GeneralDensity {
    fn pdf(&self, x: f64) -> f64 {
        match self {
            GeneralDensity::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            GeneralDensity::Uniform { low, high } => {
                if x < *low || x >= *high {
                    0.0
                } else {
                    1.0 / (high - low)
                }
            }
            GeneralDensity::Histogram(h) => h.pdf(x),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            GeneralDensity::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            GeneralDensity::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            GeneralDensity::Histogram(h) => h.cdf(x),
        }
    }

    fn survival(&self, x: f64) -> f64 {
        match self {
            GeneralDensity::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            GeneralDensity::Uniform { low, high } => ((high - x) / (high - low)).clamp(0.0, 1.0),
            GeneralDensity::Histogram(h) => 1.0 - h.cdf(x),
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            GeneralDensity::Exponential { .. } => (0.0, f64::INFINITY),
            GeneralDensity::Uniform { low, high } => (*low, *high),
            GeneralDensity::Histogram(h) => (0.0, h.upper()),
        }
    }

    fn sup(&self) -> f64 {
        match self {
            GeneralDensity::Exponential { rate } => *rate,
            GeneralDensity::Uniform { low, high } => 1.0 / (high - low),
            GeneralDensity::Histogram(h) => h.heights().iter().cloned().fold(0.0, f64::max),
        }
    }
}

/// Normal density. Only used as a smoothing summand; it is not a valid
/// inter-arrival law because its support is the whole line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub mean: f64,
    pub sd: f64,
}

impl Gaussian {
    pub const STANDARD: Gaussian = Gaussian { mean: 0.0, sd: 1.0 };
}

impl Density for Gaussian {
    fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sd;
        (-0.5 * z * z).exp() / (self.sd * (2.0 * std::f64::consts::PI).sqrt())
    }

    fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sd;
        0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
    }

    fn survival(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sd;
        0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn sup(&self) -> f64 {
        self.pdf(self.mean)
    }
}
