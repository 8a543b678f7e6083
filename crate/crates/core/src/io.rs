//! Plain-text boundary formats: whitespace-separated numeric rows with `#`
//! comments and blank lines ignored.

use crate::error::{FoamError, Result};

fn numeric_rows(text: &str, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let values: Vec<f64> = content
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| FoamError::Boundary(format!("line {}: cannot parse {s:?}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if values.len() != width {
            return Err(FoamError::Boundary(format!(
                "line {}: expected {width} values, found {}",
                lineno + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FoamError::Boundary(format!("line {}: non-finite value", lineno + 1)));
        }
        rows.push(values);
    }
    Ok(rows)
}

/// Rows of `theta phi` in radians.
pub fn parse_angle_rows(text: &str) -> Result<Vec<(f64, f64)>> {
    Ok(numeric_rows(text, 2)?.into_iter().map(|r| (r[0], r[1])).collect())
}

/// Rows of `x y z`.
pub fn parse_vector_rows(text: &str) -> Result<Vec<[f64; 3]>> {
    Ok(numeric_rows(text, 3)?.into_iter().map(|r| [r[0], r[1], r[2]]).collect())
}

pub fn format_angle_rows(rows: &[(f64, f64)]) -> String {
    rows.iter().map(|(t, p)| format!("{t} {p}\n")).collect()
}

pub fn format_vector_rows(rows: &[[f64; 3]]) -> String {
    rows.iter().map(|v| format!("{} {} {}\n", v[0], v[1], v[2])).collect()
}
