use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::domain::{FleetEntry, MatrixError, ProfitMode, Request, Scenario, StationGraph};

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("request log {0} has no rows")]
    Empty(String),
    #[error("row {row}: {field} = {value} out of range [0, {limit})")]
    OutOfRange {
        row: usize,
        field: &'static str,
        value: i64,
        limit: i64,
    },
    #[error("distance file: expected {expected}x{expected} matrix, row {row} has {found} entries")]
    DistanceShape {
        expected: usize,
        row: usize,
        found: usize,
    },
    #[error("distance file: {0}")]
    Distance(#[from] MatrixError),
    #[error("vehicle spec needs at least one vehicle with positive capacity")]
    Fleet,
}

/// Vehicle fleet for imported days; start stations are drawn uniformly from
/// a stream seeded by `seed` and the day's position in the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FleetSpec {
    pub count: usize,
    pub capacity: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportedDay {
    pub day: String,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DaySplit {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Debug, Deserialize)]
struct LogRow {
    day: String,
    slot: i64,
    origin_cell: i64,
    dest_cell: i64,
}

fn read_err(path: &Path, e: impl std::fmt::Display) -> ImportError {
    ImportError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Reads an I*I matrix of integer travel times, one comma-separated row per
/// line, no header.
pub fn read_distance_file(
    path: impl AsRef<Path>,
    cell_count: usize,
) -> Result<StationGraph, ImportError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| read_err(path, e))?;
    let mut rows = Vec::with_capacity(cell_count);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| read_err(path, e))?;
        let row: Vec<i64> = record
            .iter()
            .map(|f| {
                f.parse::<i64>()
                    .map_err(|e| read_err(path, format!("row {i}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != cell_count {
            return Err(ImportError::DistanceShape {
                expected: cell_count,
                row: i,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.len() != cell_count {
        return Err(ImportError::DistanceShape {
            expected: cell_count,
            row: rows.len(),
            found: 0,
        });
    }
    Ok(StationGraph::closed(&rows)?)
}

/// Converts a preprocessed request log (`day,slot,origin_cell,dest_cell`)
/// into one scenario per day, in order of first appearance. Slot `s` becomes
/// appearance time `s + 1`; every request is worth `profit` and has unit
/// volume; travel is free.
pub fn import_request_log(
    log_path: impl AsRef<Path>,
    distance_path: impl AsRef<Path>,
    cell_count: usize,
    horizon: u32,
    fleet: FleetSpec,
    profit: f64,
) -> Result<Vec<ImportedDay>, ImportError> {
    if fleet.count == 0 || fleet.capacity == 0 {
        return Err(ImportError::Fleet);
    }
    let log_path = log_path.as_ref();
    let graph = read_distance_file(distance_path, cell_count)?;

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(log_path)
        .map_err(|e| read_err(log_path, e))?;
    let mut days: Vec<(String, Vec<Request>)> = Vec::new();
    for (row, record) in reader.deserialize::<LogRow>().enumerate() {
        let r = record.map_err(|e| read_err(log_path, e))?;
        let check = |field: &'static str, value: i64, limit: i64| {
            if (0..limit).contains(&value) {
                Ok(())
            } else {
                Err(ImportError::OutOfRange {
                    row,
                    field,
                    value,
                    limit,
                })
            }
        };
        check("slot", r.slot, horizon as i64)?;
        check("origin_cell", r.origin_cell, cell_count as i64)?;
        check("dest_cell", r.dest_cell, cell_count as i64)?;
        let request = Request {
            from: r.origin_cell as usize,
            to: r.dest_cell as usize,
            val: profit,
            vol: 1,
            time: r.slot as u32 + 1,
        };
        match days.iter_mut().find(|(d, _)| *d == r.day) {
            Some((_, reqs)) => reqs.push(request),
            None => days.push((r.day, vec![request])),
        }
    }
    if days.is_empty() {
        return Err(ImportError::Empty(log_path.display().to_string()));
    }

    Ok(days
        .into_iter()
        .enumerate()
        .map(|(i, (day, requests))| {
            let mut rng = ChaCha8Rng::seed_from_u64(fleet.seed.wrapping_add(i as u64));
            let fleet = (0..fleet.count)
                .map(|_| FleetEntry {
                    station: rng.gen_range(0..cell_count),
                    capacity: fleet.capacity,
                })
                .collect();
            let scenario = Scenario {
                graph: graph.clone(),
                fleet,
                requests,
                horizon,
                cost_rate: 0.0,
                profit_mode: ProfitMode::Fixed,
            };
            ImportedDay { day, scenario }
        })
        .collect())
}

/// Splits days in log order into (train, validation, test). Counts larger
/// than what is available are truncated.
pub fn split_days(
    days: Vec<ImportedDay>,
    split: DaySplit,
) -> (Vec<ImportedDay>, Vec<ImportedDay>, Vec<ImportedDay>) {
    let mut iter = days.into_iter();
    let train = iter.by_ref().take(split.train).collect();
    let validation = iter.by_ref().take(split.validation).collect();
    let test = iter.take(split.test).collect();
    (train, validation, test)
}
