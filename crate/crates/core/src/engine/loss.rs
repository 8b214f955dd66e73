use std::iter::once;

use serde::Serialize;

use super::CellTrace;
use crate::error::{Error, Result};
use crate::utility::{NoisePath, PeriodicProfile};

const MAX_STEP: f64 = 0.05;
const MIN_PANELS: usize = 16;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let width = b - a;
    if width <= 0.0 {
        return 0.0;
    }
    let mut n = ((width / MAX_STEP).ceil() as usize).max(MIN_PANELS);
    n += n % 2;
    let h = width / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    (f(a) + f(b) + 4.0 * odd + 2.0 * even) * h / 3.0
}

/// `int_{t0}^{t1} (U(t) + B(t)) dt`.
///
/// The profile is integrated by composite Simpson with step at most
/// `min(0.05 h, (t1 - t0) / 16)`, split at the knots of sampled profiles so
/// each piece is smooth; the noise path is integrated exactly.
pub fn loss_integral(
    profile: &PeriodicProfile,
    noise: Option<&NoisePath>,
    t0: f64,
    t1: f64,
) -> Result<f64> {
    if !(t0 >= 0.0 && t1 >= t0 && t1.is_finite()) {
        return Err(Error::BadInterval { t0, t1 });
    }
    let mut total = 0.0;
    let mut a = t0;
    for b in profile.kinks_between(t0, t1).into_iter().chain(once(t1)) {
        total += simpson(|t| profile.value_at(t), a, b);
        a = b;
    }
    if let Some(path) = noise {
        total += path.integral(t0, t1)?;
    }
    Ok(total)
}

/// The same integral written on the folded clock: `U` over
/// `[(end mod p) - down, end mod p]`. Equal to the unwrapped integral by
/// periodicity; kept as a cross-check.
pub fn wrapped_loss_integral(profile: &PeriodicProfile, end: f64, down: f64) -> Result<f64> {
    if !(down >= 0.0 && end >= down) {
        return Err(Error::BadInterval {
            t0: end - down,
            t1: end,
        });
    }
    let p = profile.period();
    let folded = end.rem_euclid(p);
    // lift by whole periods so the window starts at or after 0
    let lift = p * ((down - folded) / p).ceil().max(0.0);
    loss_integral(profile, None, folded + lift - down, folded + lift)
}

/// Per-cycle losses `I_j` and the running loss `L_n = sum_{j<=n} I_j / d_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossSeries {
    pub integrals: Vec<f64>,
    pub ends: Vec<f64>,
    pub running: Vec<f64>,
}

impl LossSeries {
    pub fn len(&self) -> usize {
        self.integrals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.integrals.is_empty()
    }
}

pub fn loss_series_by_cycle(
    trace: &CellTrace,
    profile: &PeriodicProfile,
    noise: Option<&NoisePath>,
) -> Result<LossSeries> {
    if trace.is_empty() {
        return Err(Error::InsufficientData("trace has no cycles".into()));
    }
    let n = trace.len();
    let mut integrals = Vec::with_capacity(n);
    let mut ends = Vec::with_capacity(n);
    let mut running = Vec::with_capacity(n);
    let mut acc = 0.0;
    for c in trace.cycles() {
        let (a, b) = c.outage();
        let i = loss_integral(profile, noise, a, b)?;
        acc += i;
        integrals.push(i);
        ends.push(c.end);
        running.push(acc / c.end);
    }
    Ok(LossSeries {
        integrals,
        ends,
        running,
    })
}

/// `int_0^t U W` for every `t` on an increasing grid.
pub fn cumulative_loss(
    trace: &CellTrace,
    profile: &PeriodicProfile,
    noise: Option<&NoisePath>,
    grid: &[f64],
) -> Result<Vec<f64>> {
    check_grid(grid)?;
    let last = *grid.last().unwrap_or(&0.0);
    if last > trace.horizon() * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            t: last,
            start: 0.0,
            end: trace.horizon(),
        });
    }
    let cycles = trace.cycles();
    let mut out = Vec::with_capacity(grid.len());
    let mut done = 0.0;
    let mut j = 0;
    for &t in grid {
        while j < cycles.len() && cycles[j].end <= t {
            let (a, b) = cycles[j].outage();
            done += loss_integral(profile, noise, a, b)?;
            j += 1;
        }
        let partial = match cycles.get(j) {
            Some(c) if c.outage().0 < t => loss_integral(profile, noise, c.outage().0, t)?,
            _ => 0.0,
        };
        out.push(done + partial);
    }
    Ok(out)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param("grid", "empty"));
    }
    if grid[0].partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        || grid
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::param(
            "grid",
            "must be positive and strictly increasing",
        ));
    }
    Ok(())
}

/// Network loss `L_T = (1 / (N T)) sum_i int_0^T U^i W^i` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkRun {
    pub grid: Vec<f64>,
    pub aggregate: Vec<f64>,
    /// `int_0^t U^i W^i` for each cell at each grid point.
    #[serde(skip)]
    pub per_cell: Vec<Vec<f64>>,
}

impl NetworkRun {
    pub fn from_cumulative(grid: Vec<f64>, per_cell: Vec<Vec<f64>>) -> Result<Self> {
        check_grid(&grid)?;
        if per_cell.is_empty() {
            return Err(Error::param("cells", "need at least one cell"));
        }
        if let Some(bad) = per_cell.iter().position(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch(format!(
                "cell {bad} has {} points, grid has {}",
                per_cell[bad].len(),
                grid.len()
            )));
        }
        let n = per_cell.len() as f64;
        let aggregate = grid
            .iter()
            .enumerate()
            .map(|(g, t)| per_cell.iter().map(|c| c[g]).sum::<f64>() / (n * t))
            .collect();
        Ok(Self {
            grid,
            aggregate,
            per_cell,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.per_cell.len()
    }
}

/// Aggregates cells on a shared grid. `profiles` holds one profile per cell or
/// a single profile shared by all; `noises`, when given, one path per cell.
pub fn loss_series_by_time(
    traces: &[CellTrace],
    profiles: &[PeriodicProfile],
    noises: Option<&[NoisePath]>,
    grid: &[f64],
) -> Result<NetworkRun> {
    if profiles.len() != 1 && profiles.len() != traces.len() {
        return Err(Error::param("profiles", "need one profile or one per cell"));
    }
    if let Some(n) = noises {
        if n.len() != traces.len() {
            return Err(Error::param("noises", "need one noise path per cell"));
        }
    }
    let per_cell = traces
        .iter()
        .enumerate()
        .map(|(i, tr)| {
            let profile = &profiles[i.min(profiles.len() - 1)];
            cumulative_loss(tr, profile, noises.map(|n| &n[i]), grid)
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkRun::from_cumulative(grid.to_vec(), per_cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate_cell, Cycle, StopRule};
    use crate::rng::{Role, StreamKey};
    use crate::stochastic::{Fixed, InterArrivalModel, MaintenanceModel};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn paper_profile() -> PeriodicProfile {
        PeriodicProfile::sinusoid(1.75, 3.0, 24.0).unwrap()
    }

    /// Antiderivative of `A sin(2 pi t / p) + c`.
    fn sinusoid_integral(a: f64, c: f64, p: f64, t0: f64, t1: f64) -> f64 {
        let w = 2.0 * PI / p;
        c * (t1 - t0) + a / w * ((w * t0).cos() - (w * t1).cos())
    }

    fn paper_trace(cycles: usize, seed: u64) -> CellTrace {
        let x = InterArrivalModel::exponential(0.019).unwrap();
        let y = MaintenanceModel::exponential(0.47).unwrap();
        simulate_cell(
            &x,
            &y,
            StopRule::Cycles(cycles),
            &mut StreamKey::new(seed, Role::Test, 0, 0).rng(),
        )
        .unwrap()
    }

    #[test]
    fn constant_utility_is_length_times_level() {
        let k = PeriodicProfile::constant(2.5, 24.0).unwrap();
        assert!((loss_integral(&k, None, 3.0, 5.5).unwrap() - 6.25).abs() < 1e-13);
        let trace = paper_trace(200, 1);
        let s = loss_series_by_cycle(&trace, &k, None).unwrap();
        let mut down = 0.0;
        for (n, c) in trace.cycles().iter().enumerate() {
            down += c.down;
            assert!((s.running[n] - 2.5 * down / c.end).abs() < 1e-12);
        }
    }

    #[test]
    fn sinusoid_window_matches_antiderivative() {
        let u = paper_profile();
        let v = loss_integral(&u, None, 6.0, 12.0).unwrap();
        let exact = 18.0 + 1.75 * 24.0 / (2.0 * PI);
        assert!((v - exact).abs() < 1e-8 * exact);
        assert!((v - 24.6845).abs() < 1e-4);
        for (a, b) in [(0.0, 0.3), (1.7, 9.2), (30.0, 31.0), (100.0, 173.3)] {
            let exact = sinusoid_integral(1.75, 3.0, 24.0, a, b);
            let v = loss_integral(&u, None, a, b).unwrap();
            assert!((v - exact).abs() < 1e-8 * exact, "[{a}, {b}]");
        }
    }

    #[test]
    fn full_period_is_phase_free() {
        let u = paper_profile();
        for start in [0.0, 1.3, 7.0, 100.25] {
            let v = loss_integral(&u, None, start, start + 24.0).unwrap();
            assert!((v - 72.0).abs() < 1e-9);
        }
        let s = PeriodicProfile::sampled(vec![1.0, 4.0, 2.0, 0.0, 3.0]).unwrap();
        for start in [0.0, 0.4, 2.5, 11.9] {
            let v = loss_integral(&s, None, start, start + 5.0).unwrap();
            assert!((v - 5.0 * s.mean()).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_profile_is_integrated_exactly() {
        let s = PeriodicProfile::sampled(vec![0.0, 2.0, 2.0, 6.0]).unwrap();
        // pieces: [0.5,1] avg 1.5 -> 0.75, [1,2] 2, [2,2.25] avg 2.5 -> 0.625
        assert!((loss_integral(&s, None, 0.5, 2.25).unwrap() - 3.375).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_windows() {
        let u = paper_profile();
        assert!(matches!(
            loss_integral(&u, None, 2.0, 1.0),
            Err(Error::BadInterval { .. })
        ));
        assert!(matches!(
            loss_integral(&u, None, -1.0, 1.0),
            Err(Error::BadInterval { .. })
        ));
        assert_eq!(loss_integral(&u, None, 4.0, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn noise_adds_its_integral() {
        let u = paper_profile();
        let b = NoisePath::constant(0.1, 0.0, 50.0, 0.05).unwrap();
        let clean = loss_integral(&u, None, 10.0, 12.5).unwrap();
        let noisy = loss_integral(&u, Some(&b), 10.0, 12.5).unwrap();
        assert!((noisy - clean - 0.25).abs() < 1e-12);
        assert!(loss_integral(&u, Some(&b), 10.0, 60.0).is_err());
    }

    #[test]
    fn single_cycle_by_hand() {
        let trace = CellTrace::from_cycles(
            vec![Cycle {
                up: 10.0,
                down: 2.0,
                end: 12.0,
            }],
            12.0,
            false,
        )
        .unwrap();
        let s = loss_series_by_cycle(&trace, &paper_profile(), None).unwrap();
        let exact = sinusoid_integral(1.75, 3.0, 24.0, 10.0, 12.0);
        assert!((s.integrals[0] - exact).abs() < 1e-9);
        assert!((s.running[0] - exact / 12.0).abs() < 1e-10);
    }

    #[test]
    fn wrapped_and_unwrapped_agree() {
        let u = paper_profile();
        let trace = paper_trace(500, 2);
        let s = loss_series_by_cycle(&trace, &u, None).unwrap();
        for (c, i) in trace.cycles().iter().zip(&s.integrals) {
            let w = wrapped_loss_integral(&u, c.end, c.down).unwrap();
            assert!((w - i).abs() < 1e-8 * i.max(1.0), "{w} vs {i}");
        }
        let sampled =
            PeriodicProfile::sampled((0..24).map(|h| 1.0 + (h % 5) as f64).collect()).unwrap();
        let s = loss_series_by_cycle(&trace, &sampled, None).unwrap();
        for (c, i) in trace.cycles().iter().zip(&s.integrals) {
            let w = wrapped_loss_integral(&sampled, c.end, c.down).unwrap();
            assert!((w - i).abs() < 1e-8 * i.max(1.0));
        }
    }

    #[test]
    fn network_of_one_is_the_cell() {
        let u = paper_profile();
        let trace = simulate_cell(
            &InterArrivalModel::exponential(0.1).unwrap(),
            &MaintenanceModel::exponential(0.47).unwrap(),
            StopRule::Horizon(300.0),
            &mut StreamKey::new(5, Role::Test, 0, 0).rng(),
        )
        .unwrap();
        let grid: Vec<f64> = (1..=300).map(f64::from).collect();
        let run = loss_series_by_time(
            std::slice::from_ref(&trace),
            std::slice::from_ref(&u),
            None,
            &grid,
        )
        .unwrap();
        assert_eq!(run.n_cells(), 1);
        // direct: clip every outage to [0, t]
        for (g, &t) in grid.iter().enumerate().step_by(37) {
            let direct: f64 = trace
                .cycles()
                .iter()
                .map(|c| {
                    let (a, b) = c.outage();
                    if a >= t {
                        0.0
                    } else {
                        sinusoid_integral(1.75, 3.0, 24.0, a, b.min(t))
                    }
                })
                .sum();
            assert!((run.aggregate[g] - direct / t).abs() < 1e-9);
        }
        let copies = vec![trace.clone(); 4];
        let four = loss_series_by_time(&copies, std::slice::from_ref(&u), None, &grid).unwrap();
        for (a, b) in four.aggregate.iter().zip(&run.aggregate) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_utility_network_is_downtime() {
        let k = PeriodicProfile::constant(2.0, 24.0).unwrap();
        let trace = CellTrace::from_cycles(
            vec![
                Cycle {
                    up: 3.0,
                    down: 1.0,
                    end: 4.0,
                },
                Cycle {
                    up: 2.0,
                    down: 2.0,
                    end: 8.0,
                },
                Cycle {
                    up: 1.0,
                    down: 0.5,
                    end: 9.5,
                },
            ],
            10.0,
            false,
        )
        .unwrap();
        let run = loss_series_by_time(&[trace], &[k], None, &[3.5, 4.0, 7.0, 10.0]).unwrap();
        let expect = [
            2.0 * 0.5 / 3.5,
            2.0 * 1.0 / 4.0,
            2.0 * 2.0 / 7.0,
            2.0 * 3.5 / 10.0,
        ];
        for (a, b) in run.aggregate.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_past_horizon_rejected() {
        let trace = simulate_cell(
            &Fixed(1.0),
            &Fixed(1.0),
            StopRule::Horizon(10.0),
            &mut StreamKey::new(0, Role::Test, 0, 0).rng(),
        )
        .unwrap();
        let u = paper_profile();
        assert!(loss_series_by_time(
            std::slice::from_ref(&trace),
            std::slice::from_ref(&u),
            None,
            &[5.0, 11.0]
        )
        .is_err());
        assert!(loss_series_by_time(
            std::slice::from_ref(&trace),
            std::slice::from_ref(&u),
            None,
            &[5.0, 4.0]
        )
        .is_err());
        assert!(loss_series_by_time(&[trace], &[u.clone(), u], None, &[5.0]).is_err());
    }

    #[test]
    fn network_limit_approached() {
        let (x, y) = (
            InterArrivalModel::exponential(0.019).unwrap(),
            MaintenanceModel::exponential(0.47).unwrap(),
        );
        let grid: Vec<f64> = (1..=200).map(f64::from).collect();
        let traces: Vec<CellTrace> = (0..660)
            .map(|c| {
                simulate_cell(
                    &x,
                    &y,
                    StopRule::Horizon(200.0),
                    &mut StreamKey::new(11, Role::Test, 0, c).rng(),
                )
                .unwrap()
            })
            .collect();
        let run = loss_series_by_time(&traces, &[paper_profile()], None, &grid).unwrap();
        let limit = (1.0 / 0.47) * 3.0 / (1.0 / 0.019 + 1.0 / 0.47);
        let last = *run.aggregate.last().unwrap();
        assert!((last - limit).abs() / last < 0.1, "{last} vs {limit}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn running_loss_within_zero_and_bound(seed in 0u64..1000, a in 0.0f64..3.0) {
            let u = PeriodicProfile::sinusoid(a, 3.0, 24.0).unwrap();
            let s = loss_series_by_cycle(&paper_trace(300, seed), &u, None).unwrap();
            prop_assert!(s.integrals.iter().all(|i| *i >= 0.0));
            prop_assert!(s.running.iter().all(|l| *l >= 0.0 && *l <= u.bound()));
        }
    }
}
