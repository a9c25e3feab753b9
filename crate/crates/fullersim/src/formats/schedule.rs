//! Schedule CSV: header `s,gamma_ghz,j_ghz`, one knot per row, `#` comments.

use std::fmt::Write as _;

use fullersim_core::schedule::{AnnealingSchedule, Knot};

use super::tables::{records, Row};
use super::LineError;

pub const COLUMNS: [&str; 3] = ["s", "gamma_ghz", "j_ghz"];

pub fn parse_schedule(name: &str, text: &str) -> Result<AnnealingSchedule, LineError> {
    let rows = records(text, &COLUMNS)?;
    let mut knots: Vec<Knot> = Vec::with_capacity(rows.len());
    let mut last_line = 1;
    for Row { line, fields } in &rows {
        let (line, f) = (*line, fields);
        let (s, gamma, j) = (f[0], f[1], f[2]);
        if !(0.0..=1.0).contains(&s) {
            return Err(LineError::new(line, format!("s = {s} outside [0, 1]")));
        }
        if gamma < 0.0 || j < 0.0 {
            return Err(LineError::new(line, "negative energy"));
        }
        if let Some(prev) = knots.last() {
            if s <= prev.s {
                return Err(LineError::new(line, "s not increasing"));
            }
        } else if s != 0.0 {
            return Err(LineError::new(line, "first knot must have s = 0"));
        }
        knots.push(Knot { s, gamma, j });
        last_line = line;
    }
    match knots.last() {
        None => return Err(LineError::new(1, "schedule has no knots")),
        Some(k) if k.s != 1.0 => return Err(LineError::new(last_line, "missing s = 1 knot")),
        _ => {}
    }
    AnnealingSchedule::new(name, knots).map_err(|e| LineError::new(last_line, e.to_string()))
}

pub fn write_schedule(s: &AnnealingSchedule, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for k in s.knots() {
        let _ = writeln!(out, "{},{},{}", k.s, k.gamma, k.j);
    }
    out
}
