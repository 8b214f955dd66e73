use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::rows::{open, parse_timestamp, read_rows, Malformed};
use crate::error::{Error, Result};
use crate::utility::PeriodicProfile;

pub const KPI_HEADER: [&str; 3] = ["cell_id", "timestamp", "traffic_gb"];
const SECONDS_PER_HOUR: i64 = 3600;
/// 1970-01-01 was a Thursday; shifting by 72 h puts Monday 00:00 in slot 0.
const EPOCH_WEEKDAY_SHIFT: i64 = 72;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpiRecord {
    pub cell_id: String,
    /// UTC seconds, on the hour.
    pub timestamp: i64,
    pub traffic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpiIngest {
    pub records: Vec<KpiRecord>,
    pub malformed: Vec<Malformed>,
}

fn parse_row(r: &csv::StringRecord) -> std::result::Result<KpiRecord, String> {
    let cell_id = r[0].trim();
    if cell_id.is_empty() {
        return Err("empty cell_id".into());
    }
    let timestamp = parse_timestamp(&r[1])?;
    if timestamp.rem_euclid(SECONDS_PER_HOUR) != 0 {
        return Err(format!("timestamp `{}` is not on the hour", r[1].trim()));
    }
    let traffic: f64 = r[2]
        .trim()
        .parse()
        .map_err(|_| format!("unreadable traffic `{}`", r[2].trim()))?;
    if !(traffic.is_finite() && traffic >= 0.0) {
        return Err(format!("traffic {traffic} is negative or not finite"));
    }
    Ok(KpiRecord {
        cell_id: cell_id.to_owned(),
        timestamp,
        traffic,
    })
}

pub fn parse_kpi<R: Read>(reader: R, source: &Path) -> Result<KpiIngest> {
    let (records, malformed) = read_rows(reader, source, &KPI_HEADER, parse_row)?;
    Ok(KpiIngest { records, malformed })
}

/// Reads `cell_id,timestamp,traffic_gb` with hourly ISO-8601 timestamps.
pub fn ingest_kpi(path: &Path) -> Result<KpiIngest> {
    parse_kpi(open(path)?, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fold {
    /// 168 hourly slots starting Monday 00:00 UTC.
    Weekly,
    /// 24 hourly slots starting 00:00 UTC.
    Daily,
}

impl Fold {
    pub fn hours(self) -> usize {
        match self {
            Fold::Weekly => 168,
            Fold::Daily => 24,
        }
    }

    fn slot(self, timestamp: i64) -> usize {
        let hour = timestamp.div_euclid(SECONDS_PER_HOUR);
        match self {
            Fold::Weekly => (hour + EPOCH_WEEKDAY_SHIFT).rem_euclid(168) as usize,
            Fold::Daily => hour.rem_euclid(24) as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileEstimate {
    pub fold: Fold,
    pub profile: PeriodicProfile,
    pub u_bar: f64,
    pub samples_per_slot: Vec<usize>,
    /// Slots with no data, filled by interpolating their observed neighbours.
    pub imputed_slots: Vec<usize>,
    /// Hours missing inside each cell's observed span, summed over cells.
    pub missing_hours: usize,
    pub n_cells: usize,
}

/// Per-slot mean traffic over all cells and periods; `U_bar` is the mean of
/// the slot means.
pub fn weekly_profile(kpi: &[KpiRecord], fold: Fold) -> Result<ProfileEstimate> {
    let period = fold.hours();
    let mut spans: BTreeMap<&str, (i64, i64, usize)> = BTreeMap::new();
    for r in kpi {
        let e = spans
            .entry(&r.cell_id)
            .or_insert((r.timestamp, r.timestamp, 0));
        e.0 = e.0.min(r.timestamp);
        e.1 = e.1.max(r.timestamp);
        e.2 += 1;
    }
    if spans.is_empty() {
        return Err(Error::InsufficientData("no KPI records".into()));
    }
    let mut missing_hours = 0;
    for (cell, (first, last, count)) in &spans {
        let hours = ((last - first) / SECONDS_PER_HOUR + 1) as usize;
        if hours < 2 * period {
            return Err(Error::InsufficientData(format!(
                "cell {cell} covers {hours} h, need two full periods ({} h)",
                2 * period
            )));
        }
        missing_hours += hours.saturating_sub(*count);
    }

    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for r in kpi {
        let s = fold.slot(r.timestamp);
        sums[s] += r.traffic;
        counts[s] += 1;
    }
    let observed: Vec<usize> = (0..period).filter(|&s| counts[s] > 0).collect();
    let mut values: Vec<f64> = (0..period)
        .map(|s| {
            if counts[s] > 0 {
                sums[s] / counts[s] as f64
            } else {
                0.0
            }
        })
        .collect();
    let imputed_slots: Vec<usize> = (0..period).filter(|&s| counts[s] == 0).collect();
    for &s in &imputed_slots {
        // nearest observed slots on either side, cyclically
        let next = observed
            .iter()
            .copied()
            .find(|&o| o > s)
            .map_or(observed[0] + period, |o| o);
        let prev = observed
            .iter()
            .copied()
            .rev()
            .find(|&o| o < s)
            .map_or(observed[observed.len() - 1] as i64 - period as i64, |o| {
                o as i64
            });
        let (v0, v1) = (
            values[prev.rem_euclid(period as i64) as usize],
            values[next % period],
        );
        let w = (s as i64 - prev) as f64 / (next as i64 - prev) as f64;
        values[s] = v0 + (v1 - v0) * w;
    }
    let profile = PeriodicProfile::sampled(values)?;
    Ok(ProfileEstimate {
        fold,
        u_bar: profile.mean(),
        profile,
        samples_per_slot: counts,
        imputed_slots,
        missing_hours,
        n_cells: spans.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::synthetic::{kpi_fixture, FIXTURE_EPOCH};
    use std::f64::consts::PI;
    use std::io::Cursor;

    fn hourly(cell: &str, hours: usize, f: impl Fn(usize) -> f64) -> Vec<KpiRecord> {
        (0..hours)
            .map(|h| KpiRecord {
                cell_id: cell.into(),
                timestamp: FIXTURE_EPOCH + h as i64 * 3600,
                traffic: f(h),
            })
            .collect()
    }

    #[test]
    fn fixture_epoch_is_monday() {
        assert_eq!(Fold::Weekly.slot(FIXTURE_EPOCH), 0);
        assert_eq!(Fold::Weekly.slot(0), 72);
        assert_eq!(Fold::Daily.slot(FIXTURE_EPOCH + 5 * 3600), 5);
    }

    #[test]
    fn constant_traffic_is_flat() {
        let est = weekly_profile(&hourly("a", 2 * 168, |_| 2.5), Fold::Weekly).unwrap();
        assert_eq!(est.u_bar, 2.5);
        assert!(est.imputed_slots.is_empty());
        assert_eq!(est.profile.bound(), 2.5);
    }

    #[test]
    fn sinusoid_round_trip() {
        let kpi = hourly("a", 14 * 24, |h| {
            3.0 + 1.75 * (2.0 * PI * h as f64 / 24.0).sin()
        });
        let est = weekly_profile(&kpi, Fold::Daily).unwrap();
        let (offset, amplitude) = est.profile.fundamental();
        assert!((offset / 3.0 - 1.0).abs() < 0.01);
        assert!((amplitude / 1.75 - 1.0).abs() < 0.01);
        let weekly = weekly_profile(&kpi, Fold::Weekly).unwrap();
        let folded = weekly.profile.fold(24).unwrap();
        assert!((folded.mean() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaps_are_interpolated_and_flagged() {
        let kpi: Vec<KpiRecord> = hourly("a", 72, |h| (h % 24) as f64)
            .into_iter()
            .filter(|r| Fold::Daily.slot(r.timestamp) != 5)
            .collect();
        let est = weekly_profile(&kpi, Fold::Daily).unwrap();
        assert_eq!(est.imputed_slots, vec![5]);
        assert_eq!(est.missing_hours, 3);
        assert_eq!(est.profile.value_at(5.0), 5.0);
        let kpi: Vec<KpiRecord> = hourly("a", 72, |h| (h % 24) as f64)
            .into_iter()
            .filter(|r| Fold::Daily.slot(r.timestamp) != 0)
            .collect();
        let est = weekly_profile(&kpi, Fold::Daily).unwrap();
        // between slot 23 (23) and slot 1 (1)
        assert_eq!(est.profile.value_at(0.0), 12.0);
    }

    #[test]
    fn insufficient_coverage() {
        let mut kpi = hourly("a", 400, |_| 1.0);
        kpi.extend(hourly("b", 100, |_| 1.0));
        assert!(matches!(
            weekly_profile(&kpi, Fold::Weekly),
            Err(Error::InsufficientData(_))
        ));
        assert!(weekly_profile(&kpi, Fold::Daily).is_ok());
    }

    #[test]
    fn calibrated_fixture() {
        let kpi = kpi_fixture(3, 20, 4, 1.55);
        let est = weekly_profile(&kpi, Fold::Weekly).unwrap();
        assert!((est.u_bar - 1.55).abs() < 0.01 * 1.55, "{}", est.u_bar);
        let max = kpi.iter().map(|r| r.traffic).fold(0.0, f64::max);
        assert!(est.profile.bound() <= max);
    }

    #[test]
    fn parses_rows() {
        let text = "cell_id,timestamp,traffic_gb\nc1,2024-01-01T00:00:00Z,1.5\nc1,2024-01-01T01:00:00,2\nc1,2024-01-01T01:30:00Z,2\nc2,1704067200,-1\n";
        let mut many = String::from(text);
        for h in 2..40 {
            many.push_str(&format!("c1,{},1\n", 1_704_067_200 + h * 3600));
        }
        let k = parse_kpi(Cursor::new(many), Path::new("kpi.csv")).unwrap();
        assert_eq!(k.records.len(), 40);
        assert_eq!(
            k.malformed.iter().map(|m| m.line).collect::<Vec<_>>(),
            vec![4, 5]
        );
        assert!(parse_kpi(Cursor::new(text), Path::new("kpi.csv")).is_err());
    }
}
