//! CSV and JSON emitters.

use std::io::Write;

use anece_core::{CheckResult, DofReport};

use crate::error::CliError;

/// Significant digits of non-integer CSV values.
pub const SIGNIFICANT_DIGITS: i32 = 12;

/// Fixed-point text with 12 significant digits; integral values print bare.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let fixed = if x == 0.0 {
        "0".to_string()
    } else {
        let magnitude = x.abs().log10().floor() as i32;
        let decimals = (SIGNIFICANT_DIGITS - 1 - magnitude).clamp(0, 40) as usize;
        format!("{x:.decimals$}")
    };
    // decide integrality after rounding, otherwise re-parsing can change the text
    let rounded: f64 = fixed.parse().unwrap_or(x);
    if rounded.fract() == 0.0 && rounded.abs() < 1e15 {
        return format!("{}", rounded as i64);
    }
    fixed
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Header plus rows of preformatted cells.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub const CHECK_HEADER: [&str; 5] = ["name", "measured", "target", "tolerance", "passed"];

pub fn write_checks<W: Write>(w: W, checks: &[CheckResult]) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                format_number(c.measured),
                format_number(c.target),
                format_number(c.tolerance),
                c.passed.to_string(),
            ]
        })
        .collect();
    write_table(w, &CHECK_HEADER, &rows)
}

/// Single-line JSON object with keys in sorted order.
pub fn report_json(report: &DofReport) -> Result<String, CliError> {
    Ok(serde_json::to_string(&report.entries)?)
}
