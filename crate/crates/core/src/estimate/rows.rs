use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Abort ingestion when more than this share of data rows is malformed.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Malformed {
    pub line: u64,
    pub reason: String,
}

/// Reads a headed CSV, keeping the rows `parse` accepts and recording the
/// rest with their line numbers.
pub(crate) fn read_rows<R, T, F>(
    reader: R,
    source: &Path,
    header: &[&str],
    parse: F,
) -> Result<(Vec<T>, Vec<Malformed>)>
where
    R: Read,
    F: Fn(&csv::StringRecord) -> std::result::Result<T, String>,
{
    let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let found: Vec<String> = csv.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    if found != header {
        return Err(Error::Format {
            path: source.to_path_buf(),
            reason: format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for result in csv.records() {
        match result {
            Ok(record) => {
                let line = record.position().map_or(0, |p| p.line());
                if record.len() != header.len() {
                    bad.push(Malformed {
                        line,
                        reason: format!("expected {} fields, found {}", header.len(), record.len()),
                    });
                    continue;
                }
                match parse(&record) {
                    Ok(row) => rows.push(row),
                    Err(reason) => bad.push(Malformed { line, reason }),
                }
            }
            Err(e) => bad.push(Malformed {
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            }),
        }
    }
    let total = rows.len() + bad.len();
    if total == 0 {
        return Err(Error::InsufficientData(format!(
            "{} has no data rows",
            source.display()
        )));
    }
    if bad.len() as f64 > MAX_MALFORMED_FRACTION * total as f64 {
        let summary = bad
            .iter()
            .take(5)
            .map(|m| format!("line {}: {}", m.line, m.reason))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::TooManyMalformed {
            path: source.to_path_buf(),
            bad: bad.len(),
            total,
            summary,
        });
    }
    Ok((rows, bad))
}

pub(crate) fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// UTC seconds, RFC 3339, or a naive ISO-8601 date-time read as UTC.
pub(crate) fn parse_timestamp(raw: &str) -> std::result::Result<i64, String> {
    let s = raw.trim();
    if let Ok(secs) = s.parse::<i64>() {
        return Ok(secs);
    }
    if let Ok(t) = chrono::DateTime::parse_from_rfc3339(s) {
        return Ok(t.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = chrono::NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t.and_utc().timestamp());
        }
    }
    Err(format!("unreadable timestamp `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn timestamps() {
        assert_eq!(parse_timestamp("1704067200"), Ok(1_704_067_200));
        assert_eq!(parse_timestamp("2024-01-01T00:00:00Z"), Ok(1_704_067_200));
        assert_eq!(
            parse_timestamp("2024-01-01T01:00:00+01:00"),
            Ok(1_704_067_200)
        );
        assert_eq!(parse_timestamp(" 2024-01-01 00:00:00 "), Ok(1_704_067_200));
        assert_eq!(parse_timestamp("2024-01-01T00:00"), Ok(1_704_067_200));
        assert!(parse_timestamp("yesterday").is_err());
    }

    fn ints(text: &str) -> Result<(Vec<i64>, Vec<Malformed>)> {
        read_rows(Cursor::new(text), Path::new("t.csv"), &["a", "b"], |r| {
            r[0].parse::<i64>().map_err(|e| e.to_string())
        })
    }

    #[test]
    fn malformed_rows_carry_line_numbers() {
        let mut text = String::from("a,b\n");
        for i in 0..20 {
            text.push_str(&format!("{i},x\n"));
        }
        text.push_str("oops,x\n");
        text.push_str("1\n");
        let (rows, bad) = ints(&text).unwrap();
        assert_eq!(rows.len(), 20);
        assert_eq!(bad.iter().map(|m| m.line).collect::<Vec<_>>(), vec![22, 23]);
    }

    #[test]
    fn too_many_malformed_rows_abort() {
        let text = "a,b\n1,x\n2,x\nno,x\n";
        assert!(matches!(
            ints(text),
            Err(Error::TooManyMalformed {
                bad: 1,
                total: 3,
                ..
            })
        ));
        assert!(matches!(ints("c,d\n1,2\n"), Err(Error::Format { .. })));
        assert!(matches!(ints("a,b\n"), Err(Error::InsufficientData(_))));
    }
}
