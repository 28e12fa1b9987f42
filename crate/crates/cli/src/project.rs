//! Two-dimensional envelope projection of a region CSV: for each value of
//! the second plane axis, the pointwise minimum of the first axis over all
//! rows (the discarded axes are minimized out).

use std::collections::BTreeMap;
use std::path::Path;

use crate::output::{fmt6, Table};
use crate::CliError;

const AXES: [&str; 4] = ["r_i", "r_s", "r_j", "r_l"];

/// A plane like "rj-ri": first axis is minimized, second axis indexes rows.
pub fn parse_plane(plane: &str) -> Result<(String, String), CliError> {
    let (a, b) = plane
        .split_once('-')
        .ok_or_else(|| CliError::config(format!("plane '{plane}' is not like 'rj-ri'")))?;
    let norm = |s: &str| -> Result<String, CliError> {
        let name = match s {
            "ri" | "r_i" => "r_i",
            "rs" | "r_s" => "r_s",
            "rj" | "r_j" => "r_j",
            "rl" | "r_l" => "r_l",
            other => return Err(CliError::config(format!("unknown axis '{other}'"))),
        };
        Ok(name.to_string())
    };
    let (a, b) = (norm(a)?, norm(b)?);
    if a == b {
        return Err(CliError::config(format!("plane '{plane}' repeats one axis")));
    }
    Ok((a, b))
}

pub fn project(input: &Path, plane: &str) -> Result<Table, CliError> {
    let (min_axis, grid_axis) = parse_plane(plane)?;

    let mut reader = csv::Reader::from_path(input)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", input.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::config(format!("{}: {e}", input.display())))?
        .clone();
    let column = |name: &str| -> Result<usize, CliError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::config(format!("{} lacks column '{name}'", input.display())))
    };
    for axis in AXES {
        column(axis)?;
    }
    let min_col = column(&min_axis)?;
    let grid_col = column(&grid_axis)?;

    // group by the exact textual grid value so identical grid rates collapse
    let mut envelope: BTreeMap<String, f64> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for record in reader.records() {
        let record =
            record.map_err(|e| CliError::config(format!("{}: {e}", input.display())))?;
        let grid_key = record
            .get(grid_col)
            .ok_or_else(|| CliError::config("short row in region CSV"))?
            .to_string();
        let value: f64 = record
            .get(min_col)
            .ok_or_else(|| CliError::config("short row in region CSV"))?
            .parse()
            .map_err(|e| CliError::config(format!("bad number in region CSV: {e}")))?;
        match envelope.get_mut(&grid_key) {
            Some(best) => *best = best.min(value),
            None => {
                envelope.insert(grid_key.clone(), value);
                order.push(grid_key);
            }
        }
    }

    let mut table = Table::new(&[&min_axis, &grid_axis]);
    for key in order {
        table.push(vec![fmt6(envelope[&key]), key]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::parse_plane;

    #[test]
    fn plane_names_normalize() {
        assert_eq!(parse_plane("rj-ri").unwrap(), ("r_j".to_string(), "r_i".to_string()));
        assert_eq!(parse_plane("r_l-r_i").unwrap(), ("r_l".to_string(), "r_i".to_string()));
    }

    #[test]
    fn repeated_or_unknown_axes_are_rejected() {
        assert!(parse_plane("ri-ri").is_err());
        assert!(parse_plane("bogus-ri").is_err());
        assert!(parse_plane("rjri").is_err());
    }
}
