//! Trouble-ticket and KPI ingestion, parameter fitting and the rolling
//! downtime-fraction diagnostic.

mod fit;
mod kpi;
mod rolling;
mod rows;
pub mod synthetic;
mod tickets;

pub use fit::{
    censored_up_times, fit_interarrival, ks_exponential, pooled_gaps, up_time_gaps, FitMethod,
    FitReport, MIN_FIT_SAMPLES,
};
pub use kpi::{ingest_kpi, parse_kpi, weekly_profile, Fold, KpiIngest, KpiRecord, ProfileEstimate};
pub use rolling::{rolling_delta, DeltaPoint, RollingDelta, MIN_CYCLES_PER_WINDOW};
pub use rows::{Malformed, MAX_MALFORMED_FRACTION};
pub use tickets::{
    ingest_tickets, maintenance_stats, merge_overlaps, parse_tickets, repair_durations, Histogram,
    MaintenanceStats, TicketIngest, TicketRecord,
};

pub(crate) const SECONDS_PER_HOUR: f64 = 3600.0;
