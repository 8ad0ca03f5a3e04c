//! Deterministic CSV emission.
//!
//! Schema: first line `# qsljc v1, gamma=1 units`, then a snake_case header
//! row, then data rows. Floats carry 12 significant digits in scientific
//! notation, `.` decimal separator, LF line endings. Identical configs
//! produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

const PREAMBLE: &str = "# qsljc v1, gamma=1 units";

/// One CSV cell: a measured float or an integral count/flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
}

/// 12 significant digits, scientific notation. Signed zero is normalized
/// so no column ever prints `-0.0`.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.11e}", x)
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::F(x) => format_float(*x),
        Cell::I(i) => i.to_string(),
    }
}

/// Write one CSV table; returns the path written.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let mut buf = String::new();
    buf.push_str(PREAMBLE);
    buf.push('\n');
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len(), "row width mismatch in {name}");
        let line: Vec<String> = row.iter().map(format_cell).collect();
        buf.push_str(&line.join(","));
        buf.push('\n');
    }
    let mut file = std::fs::File::create(&path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(buf.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
