//! Small numeric CSV tables with a fixed header and `#` comment lines.

use std::fmt::Write as _;

use fullersim_core::calibrate::FidelityCurve;
use fullersim_core::measures::ObservableRecord;

use super::LineError;

pub const CURVE_COLUMNS: [&str; 2] = ["ta_ns", "f_binned"];
pub const OBSERVABLE_COLUMNS: [&str; 5] = ["ta_ns", "delta_e", "d_mean", "f_binned", "samples"];

pub struct Row<T = f64> {
    pub line: usize,
    pub fields: Vec<T>,
}

/// Rows as raw strings after checking the header.
pub fn raw_records(text: &str, columns: &[&str]) -> Result<Vec<Row<String>>, LineError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header_line = text
        .lines()
        .position(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map_or(1, |k| k + 1);
    let headers = reader.headers().map_err(|e| LineError::new(header_line, e.to_string()))?;
    if headers.iter().ne(columns.iter().copied()) {
        return Err(LineError::new(header_line, format!("expected header `{}`", columns.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            LineError::new(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push(Row { line, fields: record.iter().map(str::to_owned).collect() });
    }
    Ok(rows)
}

/// Rows of finite numbers.
pub fn records(text: &str, columns: &[&str]) -> Result<Vec<Row>, LineError> {
    raw_records(text, columns)?
        .into_iter()
        .map(|row| {
            let fields = row
                .fields
                .iter()
                .zip(columns)
                .map(|(f, name)| number(row.line, name, f))
                .collect::<Result<_, _>>()?;
            Ok(Row { line: row.line, fields })
        })
        .collect()
}

fn number(line: usize, column: &str, text: &str) -> Result<f64, LineError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(LineError::new(line, format!("{column}: `{text}` is not a finite number"))),
    }
}

fn header(out: &mut String, comments: &[String], columns: &[&str]) {
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(&columns.join(","));
    out.push('\n');
}

pub fn parse_curve(name: &str, text: &str) -> Result<FidelityCurve, LineError> {
    let rows = records(text, &CURVE_COLUMNS)?;
    for w in rows.windows(2) {
        if w[1].fields[0] <= w[0].fields[0] {
            return Err(LineError::new(w[1].line, "ta_ns not increasing"));
        }
    }
    let last = rows.last().map_or(1, |r| r.line);
    FidelityCurve::new(name, rows.iter().map(|r| (r.fields[0], r.fields[1])).collect())
        .map_err(|e| LineError::new(last, e.to_string()))
}

pub fn write_curve(points: &[(f64, f64)], comments: &[String]) -> String {
    let mut out = String::new();
    header(&mut out, comments, &CURVE_COLUMNS);
    for (t, f) in points {
        let _ = writeln!(out, "{t},{f}");
    }
    out
}

pub fn write_observables(rows: &[ObservableRecord], comments: &[String]) -> String {
    let mut out = String::new();
    header(&mut out, comments, &OBSERVABLE_COLUMNS);
    for r in rows {
        let samples = r.sample_count.map_or_else(|| "exact".to_owned(), |n| n.to_string());
        let _ = writeln!(out, "{},{},{},{},{samples}", r.t_a, r.delta_e, r.d_mean, r.f_binned);
    }
    out
}

pub fn parse_observables(text: &str) -> Result<Vec<ObservableRecord>, LineError> {
    raw_records(text, &OBSERVABLE_COLUMNS)?
        .into_iter()
        .map(|row| {
            let f = &row.fields;
            let num = |k: usize| number(row.line, OBSERVABLE_COLUMNS[k], &f[k]);
            let sample_count = match f[4].as_str() {
                "exact" => None,
                s => Some(s.parse().map_err(|_| LineError::new(row.line, format!("samples: `{s}`")))?),
            };
            Ok(ObservableRecord { t_a: num(0)?, delta_e: num(1)?, d_mean: num(2)?, f_binned: num(3)?, sample_count })
        })
        .collect()
}
