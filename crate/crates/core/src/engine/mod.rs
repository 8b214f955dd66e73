//! Alternating-renewal simulation and the running utility loss.

mod loss;
mod study;
mod trace;

pub use loss::{
    cumulative_loss, loss_integral, loss_series_by_cycle, loss_series_by_time,
    wrapped_loss_integral, LossSeries, NetworkRun,
};
pub use study::{
    convergence_stage, quantile, CellStudy, NetworkStudy, ReplicationSummary, StageOutcome,
    DEFAULT_THRESHOLD,
};
pub use trace::{simulate_cell, CellTrace, Cycle, StopRule};
