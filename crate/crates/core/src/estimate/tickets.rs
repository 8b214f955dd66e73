use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use super::rows::{open, parse_timestamp, read_rows, Malformed};
use super::SECONDS_PER_HOUR;
use crate::error::{positive, Error, Result};

pub const TICKET_HEADER: [&str; 4] = ["anomaly_id", "cell_id", "start_ts", "end_ts"];

/// One anomaly. `end` is `None` while the ticket is unresolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TicketRecord {
    pub anomaly_id: String,
    pub cell_id: String,
    pub start: i64,
    pub end: Option<i64>,
}

impl TicketRecord {
    /// Repair time in hours.
    pub fn duration_hours(&self) -> Option<f64> {
        self.end.map(|e| (e - self.start) as f64 / SECONDS_PER_HOUR)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TicketIngest {
    /// Valid tickets after overlap merging, ordered by cell then start.
    pub records: Vec<TicketRecord>,
    pub rows_read: usize,
    pub malformed: Vec<Malformed>,
    /// Tickets absorbed into an overlapping one on the same cell.
    pub merged: usize,
    pub unresolved: usize,
}

fn parse_row(r: &csv::StringRecord) -> std::result::Result<TicketRecord, String> {
    let anomaly_id = r[0].trim();
    let cell_id = r[1].trim();
    if anomaly_id.is_empty() || cell_id.is_empty() {
        return Err("empty anomaly_id or cell_id".into());
    }
    let start = parse_timestamp(&r[2])?;
    let end = match r[3].trim() {
        "" => None,
        raw => Some(parse_timestamp(raw)?),
    };
    if let Some(e) = end {
        if e < start {
            return Err(format!("end_ts {e} precedes start_ts {start}"));
        }
    }
    Ok(TicketRecord {
        anomaly_id: anomaly_id.to_owned(),
        cell_id: cell_id.to_owned(),
        start,
        end,
    })
}

pub fn parse_tickets<R: Read>(reader: R, source: &Path) -> Result<TicketIngest> {
    let (rows, malformed) = read_rows(reader, source, &TICKET_HEADER, parse_row)?;
    let rows_read = rows.len() + malformed.len();
    let before = rows.len();
    let records = merge_overlaps(rows);
    let unresolved = records.iter().filter(|r| r.end.is_none()).count();
    Ok(TicketIngest {
        merged: before - records.len(),
        records,
        rows_read,
        malformed,
        unresolved,
    })
}

/// Reads `anomaly_id,cell_id,start_ts,end_ts`. Timestamps are UTC seconds
/// (RFC 3339 also accepted); an empty `end_ts` marks an unresolved ticket.
pub fn ingest_tickets(path: &Path) -> Result<TicketIngest> {
    parse_tickets(open(path)?, path)
}

/// Merges resolved tickets whose repair intervals overlap or touch on the
/// same cell into one interval covering their union. Unresolved tickets are
/// kept as bare arrivals.
pub fn merge_overlaps(records: Vec<TicketRecord>) -> Vec<TicketRecord> {
    let mut by_cell: BTreeMap<String, Vec<TicketRecord>> = BTreeMap::new();
    for r in records {
        by_cell.entry(r.cell_id.clone()).or_default().push(r);
    }
    let mut out = Vec::new();
    for (_, mut tickets) in by_cell {
        tickets.sort_by_key(|t| (t.start, t.end.is_none(), t.end));
        let mut open: Option<TicketRecord> = None;
        for t in tickets {
            let Some(end) = t.end else {
                out.push(t);
                continue;
            };
            match &mut open {
                Some(cur) if t.start <= cur.end.unwrap() => {
                    cur.end = Some(cur.end.unwrap().max(end));
                    cur.anomaly_id.push('+');
                    cur.anomaly_id.push_str(&t.anomaly_id);
                }
                _ => {
                    if let Some(done) = open.replace(t) {
                        out.push(done);
                    }
                }
            }
        }
        out.extend(open);
    }
    out.sort_by(|a, b| (&a.cell_id, a.start).cmp(&(&b.cell_id, b.start)));
    out
}

/// Repair times in hours of the resolved tickets.
pub fn repair_durations(records: &[TicketRecord]) -> Vec<f64> {
    records
        .iter()
        .filter_map(TicketRecord::duration_hours)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaintenanceStats {
    pub mean_y: f64,
    pub e_y2: f64,
    pub n: usize,
    pub unresolved: usize,
    pub histogram: Histogram,
}

/// Sample mean and second moment of the repair time (hours).
pub fn maintenance_stats(records: &[TicketRecord], bin_width: f64) -> Result<MaintenanceStats> {
    positive("bin_width", bin_width)?;
    let ys = repair_durations(records);
    if ys.is_empty() {
        return Err(Error::InsufficientData("no resolved tickets".into()));
    }
    let n = ys.len() as f64;
    let max = ys.iter().copied().fold(0.0, f64::max);
    let mut counts = vec![0; (max / bin_width).floor() as usize + 1];
    for y in &ys {
        counts[(y / bin_width).floor() as usize] += 1;
    }
    Ok(MaintenanceStats {
        mean_y: ys.iter().sum::<f64>() / n,
        e_y2: ys.iter().map(|y| y * y).sum::<f64>() / n,
        n: ys.len(),
        unresolved: records.len() - ys.len(),
        histogram: Histogram { bin_width, counts },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> Result<TicketIngest> {
        parse_tickets(Cursor::new(text), Path::new("tickets.csv"))
    }

    fn ticket(id: &str, cell: &str, start: i64, end: Option<i64>) -> TicketRecord {
        TicketRecord {
            anomaly_id: id.into(),
            cell_id: cell.into(),
            start,
            end,
        }
    }

    #[test]
    fn reads_valid_rows() {
        let t = parse("anomaly_id,cell_id,start_ts,end_ts\na1,c1,0,3600\na2,c2,100,\na3,c1,7200,2024-01-01T00:00:00Z\n").unwrap();
        assert_eq!(t.records.len(), 3);
        assert_eq!(t.unresolved, 1);
        assert_eq!(t.records[0].duration_hours(), Some(1.0));
        assert!(t.malformed.is_empty());
    }

    #[test]
    fn end_before_start_is_reported() {
        let mut text = String::from("anomaly_id,cell_id,start_ts,end_ts\n");
        for i in 0..10 {
            text.push_str(&format!("a{i},c{i},{},{}\n", i * 10, i * 10 + 5));
        }
        text.push_str("bad,c1,500,400\n");
        let t = parse(&text).unwrap();
        assert_eq!(t.records.len(), 10);
        assert_eq!(t.malformed.len(), 1);
        assert_eq!(t.malformed[0].line, 12);
        assert!(t.malformed[0].reason.contains("precedes"));
    }

    #[test]
    fn overlapping_tickets_merge_into_union() {
        let merged = merge_overlaps(vec![
            ticket("b", "c1", 50, Some(200)),
            ticket("a", "c1", 0, Some(100)),
            ticket("c", "c1", 300, Some(400)),
            ticket("d", "c2", 60, Some(90)),
            ticket("e", "c1", 120, Some(150)),
        ]);
        assert_eq!(
            merged,
            vec![
                ticket("a+b+e", "c1", 0, Some(200)),
                ticket("c", "c1", 300, Some(400)),
                ticket("d", "c2", 60, Some(90)),
            ]
        );
        let t = parse("anomaly_id,cell_id,start_ts,end_ts\na,x,0,10\nb,x,5,20\n").unwrap();
        assert_eq!(t.merged, 1);
        assert_eq!(t.records, vec![ticket("a+b", "x", 0, Some(20))]);
    }

    #[test]
    fn maintenance_moments() {
        let recs = vec![
            ticket("a", "c", 0, Some(3600)),
            ticket("b", "c", 10_000, Some(10_000 + 3 * 3600)),
            ticket("u", "c", 20_000, None),
        ];
        let s = maintenance_stats(&recs, 1.0).unwrap();
        assert_eq!((s.mean_y, s.e_y2, s.n, s.unresolved), (2.0, 5.0, 2, 1));
        assert_eq!(s.histogram.counts, vec![0, 1, 0, 1]);
        assert!(maintenance_stats(&recs[2..], 1.0).is_err());
    }

    #[test]
    fn unreadable_file() {
        assert!(matches!(
            ingest_tickets(Path::new("/nonexistent/t.csv")),
            Err(Error::Io { .. })
        ));
    }
}
