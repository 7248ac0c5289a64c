use std::fmt;
use std::io::{self, Read, Write};
use std::str::FromStr;

use thiserror::Error;

pub const COLUMNS: [&str; 7] = [
    "scenario", "seed", "policy", "obj", "comp", "seconds", "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Cut short by the per-episode time limit; obj and comp are partial.
    TimedOut,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::TimedOut => "timed-out",
        })
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(Status::Ok),
            "timed-out" => Ok(Status::TimedOut),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub seed: u64,
    pub policy: String,
    pub obj: f64,
    pub comp: f64,
    pub seconds: f64,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub obj: f64,
    pub comp: f64,
    pub seconds: f64,
}

/// Per-seed rows in seed order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Unweighted means over all rows, timed out ones included.
    pub fn mean(&self) -> Aggregate {
        let n = self.rows.len().max(1) as f64;
        let sum = |f: fn(&ResultRow) -> f64| self.rows.iter().map(f).sum::<f64>() / n;
        Aggregate {
            obj: sum(|r| r.obj),
            comp: sum(|r| r.comp),
            seconds: sum(|r| r.seconds),
        }
    }

    /// Sample standard deviations (n - 1 denominator); zero for a single row.
    pub fn std(&self) -> Aggregate {
        let mean = self.mean();
        let n = self.rows.len();
        if n < 2 {
            return Aggregate {
                obj: 0.0,
                comp: 0.0,
                seconds: 0.0,
            };
        }
        let sd = |f: fn(&ResultRow) -> f64, m: f64| {
            (self.rows.iter().map(|r| (f(r) - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Aggregate {
            obj: sd(|r| r.obj, mean.obj),
            comp: sd(|r| r.comp, mean.comp),
            seconds: sd(|r| r.seconds, mean.seconds),
        }
    }

    pub fn timed_out(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::TimedOut)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(format!("unknown table format `{other}`")),
        }
    }
}

impl TableFormat {
    /// `.md` means markdown, anything else csv.
    pub fn for_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("md") => TableFormat::Markdown,
            _ => TableFormat::Csv,
        }
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("no results to write")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

fn record(row: &ResultRow) -> [String; 7] {
    // Display for f64 is the shortest string that parses back to the same value
    [
        row.scenario.clone(),
        row.seed.to_string(),
        row.policy.clone(),
        row.obj.to_string(),
        row.comp.to_string(),
        row.seconds.to_string(),
        row.status.to_string(),
    ]
}

fn aggregate_record(label: &str, table: &ResultTable, a: Aggregate) -> [String; 7] {
    let first = &table.rows[0];
    let timed_out = table.timed_out();
    [
        first.scenario.clone(),
        label.to_string(),
        first.policy.clone(),
        a.obj.to_string(),
        a.comp.to_string(),
        a.seconds.to_string(),
        if timed_out == 0 {
            String::new()
        } else {
            format!("{timed_out} timed-out")
        },
    ]
}

/// Writes a header, one line per row, then `mean` and `std` lines (labelled
/// in the seed column).
pub fn emit_table<W: Write>(
    table: &ResultTable,
    format: TableFormat,
    out: W,
) -> Result<(), TableError> {
    if table.rows.is_empty() {
        return Err(TableError::Empty);
    }
    let mut lines: Vec<[String; 7]> = table.rows.iter().map(record).collect();
    lines.push(aggregate_record("mean", table, table.mean()));
    lines.push(aggregate_record("std", table, table.std()));
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS)?;
            for line in &lines {
                w.write_record(line)?;
            }
            w.flush()?;
        }
        TableFormat::Markdown => {
            let mut out = out;
            writeln!(out, "| {} |", COLUMNS.join(" | "))?;
            writeln!(out, "|{}", "---|".repeat(COLUMNS.len()))?;
            for line in &lines {
                writeln!(out, "| {} |", line.join(" | "))?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Reads a csv table back, skipping the aggregate lines.
pub fn parse_csv<R: Read>(input: R) -> Result<ResultTable, TableError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let err = |message: String| TableError::Row {
            row: i + 1,
            message,
        };
        if rec.len() != COLUMNS.len() {
            return Err(err(format!(
                "expected {} fields, got {}",
                COLUMNS.len(),
                rec.len()
            )));
        }
        if matches!(&rec[1], "mean" | "std") {
            continue;
        }
        let float = |j: usize| {
            rec[j]
                .parse::<f64>()
                .map_err(|e| err(format!("{}: {e}", COLUMNS[j])))
        };
        rows.push(ResultRow {
            scenario: rec[0].to_string(),
            seed: rec[1].parse().map_err(|e| err(format!("seed: {e}")))?,
            policy: rec[2].to_string(),
            obj: float(3)?,
            comp: float(4)?,
            seconds: float(5)?,
            status: rec[6].parse().map_err(err)?,
        });
    }
    Ok(ResultTable { rows })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn row(seed: u64, obj: f64) -> ResultRow {
        ResultRow {
            scenario: "synth-S".into(),
            seed,
            policy: "nearest".into(),
            obj,
            comp: 0.5,
            seconds: 0.01,
            status: Status::Ok,
        }
    }

    #[test]
    fn one_row_gives_three_lines() {
        let table = ResultTable {
            rows: vec![row(0, 1.5)],
        };
        let mut out = Vec::new();
        emit_table(&table, TableFormat::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "scenario,seed,policy,obj,comp,seconds,status");
        assert_eq!(lines[1], "synth-S,0,nearest,1.5,0.5,0.01,ok");
        assert!(lines[2].starts_with("synth-S,mean,nearest,1.5,"));
        assert!(lines[3].starts_with("synth-S,std,nearest,0,0,0,"));
    }

    #[test]
    fn markdown_is_pipe_delimited() {
        let table = ResultTable {
            rows: vec![row(0, 1.0), row(1, 3.0)],
        };
        let mut out = Vec::new();
        emit_table(&table, TableFormat::Markdown, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().all(|l| l.starts_with('|') && l.ends_with('|')));
        assert!(text.contains("| synth-S | mean | nearest | 2 |"));
    }

    #[test]
    fn aggregates() {
        let table = ResultTable {
            rows: vec![row(0, 1.0), row(1, 3.0)],
        };
        assert_eq!(table.mean().obj, 2.0);
        assert_eq!(table.std().obj, 2f64.sqrt());
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(
            emit_table(&ResultTable::default(), TableFormat::Csv, Vec::new()),
            Err(TableError::Empty)
        ));
    }

    #[test]
    fn format_from_path() {
        assert_eq!(
            TableFormat::for_path("a/b.md".as_ref()),
            TableFormat::Markdown
        );
        assert_eq!(TableFormat::for_path("b.csv".as_ref()), TableFormat::Csv);
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            rows in prop::collection::vec(
                (any::<u64>(), -1e6f64..1e6, 0f64..=1.0, 0f64..100.0, any::<bool>(), "[a-z,\" -]{1,8}"),
                1..20,
            )
        ) {
            let table = ResultTable {
                rows: rows
                    .into_iter()
                    .map(|(seed, obj, comp, seconds, late, scenario)| ResultRow {
                        scenario,
                        seed,
                        policy: "sa-rh".into(),
                        obj,
                        comp,
                        seconds,
                        status: if late { Status::TimedOut } else { Status::Ok },
                    })
                    .collect(),
            };
            let mut out = Vec::new();
            emit_table(&table, TableFormat::Csv, &mut out).unwrap();
            prop_assert_eq!(parse_csv(out.as_slice()).unwrap(), table);
        }
    }
}
