//! Per-step CSV format. Floats are written with 17 significant digits so
//! every row parses back to the identical [`StepRecord`].

use std::io::{Read, Write};

use ailfem_core::adaptivity::{Event, GoalColumns, StepRecord};

pub const BASE_COLUMNS: [&str; 13] = [
    "ell",
    "k",
    "total_step",
    "nelem",
    "ndof",
    "work",
    "eta",
    "energy",
    "energy_diff",
    "u_norm",
    "delta",
    "L",
    "event",
];

pub const GOAL_COLUMNS: [&str; 4] = ["zeta", "product_estimator", "goal_value", "goal_error"];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: bad value `{value}` in column `{column}`")]
    Value { row: usize, column: &'static str, value: String },
    #[error("row {row}: expected {expected} fields, got {got}")]
    Width { row: usize, expected: usize, got: usize },
}

pub fn header(goal: bool) -> Vec<&'static str> {
    let mut h = BASE_COLUMNS.to_vec();
    if goal {
        h.extend(GOAL_COLUMNS);
    }
    h
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn fields(r: &StepRecord) -> Vec<String> {
    let mut f = vec![
        r.ell.to_string(),
        r.k.to_string(),
        r.total_step.to_string(),
        r.nelem.to_string(),
        r.ndof.to_string(),
        r.work.to_string(),
        format_float(r.eta),
        format_float(r.energy),
        format_float(r.energy_diff),
        format_float(r.u_norm),
        format_float(r.delta),
        format_float(r.l),
        r.event.name().to_string(),
    ];
    if let Some(g) = r.goal {
        f.extend([g.zeta, g.product_estimator, g.goal_value, g.goal_error].map(format_float));
    }
    f
}

/// Streams records; the header is written on construction.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
    goal: bool,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, goal: bool) -> Result<Self, CsvError> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        inner.write_record(header(goal))?;
        Ok(RecordWriter { inner, goal })
    }

    pub fn write(&mut self, r: &StepRecord) -> Result<(), CsvError> {
        debug_assert_eq!(r.goal.is_some(), self.goal);
        self.inner.write_record(fields(r))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CsvError> {
        self.inner.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W, CsvError> {
        self.inner.into_inner().map_err(|e| CsvError::Csv(e.into_error().into()))
    }
}

fn parse<T: std::str::FromStr>(row: usize, column: &'static str, value: &str) -> Result<T, CsvError> {
    value.parse().map_err(|_| CsvError::Value {
        row,
        column,
        value: value.to_string(),
    })
}

/// Reads a whole CSV file back into records.
pub fn read_records<R: Read>(input: R) -> Result<Vec<StepRecord>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let goal = if found == header(false) {
        false
    } else if found == header(true) {
        true
    } else {
        return Err(CsvError::Header(found));
    };
    let width = header(goal).len();
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != width {
            return Err(CsvError::Width {
                row,
                expected: width,
                got: rec.len(),
            });
        }
        let f = |j: usize| &rec[j];
        let float = |j: usize| parse::<f64>(row, header(goal)[j], f(j));
        let event = Event::from_name(f(12)).ok_or_else(|| CsvError::Value {
            row,
            column: "event",
            value: f(12).to_string(),
        })?;
        let goal_cols = if goal {
            Some(GoalColumns {
                zeta: float(13)?,
                product_estimator: float(14)?,
                goal_value: float(15)?,
                goal_error: float(16)?,
            })
        } else {
            None
        };
        out.push(StepRecord {
            ell: parse(row, "ell", f(0))?,
            k: parse(row, "k", f(1))?,
            total_step: parse(row, "total_step", f(2))?,
            nelem: parse(row, "nelem", f(3))?,
            ndof: parse(row, "ndof", f(4))?,
            work: parse(row, "work", f(5))?,
            eta: float(6)?,
            energy: float(7)?,
            energy_diff: float(8)?,
            u_norm: float(9)?,
            delta: float(10)?,
            l: float(11)?,
            event,
            goal: goal_cols,
        });
    }
    Ok(out)
}
