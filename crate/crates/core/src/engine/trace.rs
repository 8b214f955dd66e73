use rand::Rng;
use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::stochastic::DurationSampler;

/// One anomaly/repair cycle: `up` hours of service, then `down` hours of
/// repair ending at the cumulative clock `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cycle {
    pub up: f64,
    pub down: f64,
    pub end: f64,
}

impl Cycle {
    /// The repair interval `[end - down, end]`, where `W(t) = 1`.
    pub fn outage(&self) -> (f64, f64) {
        (self.end - self.down, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    Cycles(usize),
    /// Stop at time `T`; the cycle running at `T` is cut there.
    Horizon(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellTrace {
    cycles: Vec<Cycle>,
    horizon: f64,
    truncated: bool,
}

impl CellTrace {
    pub fn from_cycles(cycles: Vec<Cycle>, horizon: f64, truncated: bool) -> Result<Self> {
        let mut prev = 0.0;
        for (j, c) in cycles.iter().enumerate() {
            let last = j + 1 == cycles.len();
            let up_ok = c.up > 0.0 || (last && truncated);
            if !(up_ok && c.down >= 0.0 && c.end > prev)
                || (c.end - prev - c.up - c.down).abs() > 1e-9 * c.end.max(1.0)
            {
                return Err(Error::param(
                    "cycles",
                    format!("cycle {} is inconsistent: {c:?}", j + 1),
                ));
            }
            prev = c.end;
        }
        if horizon < prev {
            return Err(Error::param(
                "horizon",
                format!("{horizon} ends before the last cycle {prev}"),
            ));
        }
        Ok(Self {
            cycles,
            horizon,
            truncated,
        })
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// End of observation: `T` for a horizon stop, `d_n` otherwise.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// True when the last cycle was cut by the horizon.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn total_down(&self) -> f64 {
        self.cycles.iter().map(|c| c.down).sum()
    }

    pub fn downtime_fraction(&self) -> f64 {
        if self.horizon > 0.0 {
            self.total_down() / self.horizon
        } else {
            0.0
        }
    }
}

/// Draws alternating up and repair periods. Anomalies cannot occur while a
/// repair is in progress.
pub fn simulate_cell<X, Y, R>(up: &X, down: &Y, stop: StopRule, rng: &mut R) -> Result<CellTrace>
where
    X: DurationSampler + ?Sized,
    Y: DurationSampler + ?Sized,
    R: Rng + ?Sized,
{
    match stop {
        StopRule::Cycles(n) => {
            if n == 0 {
                return Err(Error::param("stop", "need at least one cycle"));
            }
            let mut cycles = Vec::with_capacity(n);
            let mut clock = 0.0;
            for _ in 0..n {
                let x = up.sample(rng);
                let y = down.sample(rng);
                clock += x + y;
                cycles.push(Cycle {
                    up: x,
                    down: y,
                    end: clock,
                });
            }
            Ok(CellTrace {
                cycles,
                horizon: clock,
                truncated: false,
            })
        }
        StopRule::Horizon(t) => {
            positive("horizon", t)?;
            let mut cycles = Vec::new();
            let mut clock = 0.0;
            let mut truncated = false;
            while clock < t {
                let x = up.sample(rng);
                let y = down.sample(rng);
                if clock + x >= t {
                    cycles.push(Cycle {
                        up: t - clock,
                        down: 0.0,
                        end: t,
                    });
                    truncated = true;
                    break;
                }
                if clock + x + y > t {
                    cycles.push(Cycle {
                        up: x,
                        down: t - clock - x,
                        end: t,
                    });
                    truncated = true;
                    break;
                }
                clock += x + y;
                cycles.push(Cycle {
                    up: x,
                    down: y,
                    end: clock,
                });
            }
            Ok(CellTrace {
                cycles,
                horizon: t,
                truncated,
            })
        }
    }
}
