//! Menu CSV schema and atomic file writing.
//!
//! Columns: `mu,orientation,noise,posterior,price,surplus,gross_utility`.
//! Floats are written with 17 significant digits so a read-back reproduces
//! the binary values exactly; identical runs produce byte-identical files.

use crate::error::CliError;
use infomenu_core::solver::{MenuPoint, OptimalMenu};
use infomenu_core::Orientation;
use std::io::Write;
use std::path::Path;

/// `f64` with full round-trip precision.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write bytes to `path` atomically (temp file + rename).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Serialize any JSON-able report, pretty-printed, trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub const MENU_HEADER: &str = "mu,orientation,noise,posterior,price,surplus,gross_utility";

pub fn write_menu_csv(path: &Path, menu: &OptimalMenu) -> Result<(), CliError> {
    let mut out = String::with_capacity(menu.points.len() * 96);
    out.push_str(MENU_HEADER);
    out.push('\n');
    for p in &menu.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_float(p.mu),
            p.orientation.as_str(),
            fmt_float(p.noise),
            fmt_float(p.posterior),
            fmt_float(p.price),
            fmt_float(p.surplus),
            fmt_float(p.gross_utility),
        ));
    }
    atomic_write(path, out.as_bytes())
}

/// Read a menu CSV back into rows, with line-numbered schema errors.
pub fn read_menu_csv(path: &Path) -> Result<Vec<MenuPoint>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read menu {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == MENU_HEADER => {}
        Some((_, header)) => {
            return Err(CliError::input(format!(
                "menu {}: unexpected header '{header}'",
                path.display()
            )))
        }
        None => return Err(CliError::input(format!("menu {} is empty", path.display()))),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CliError::input(format!(
                "menu {} line {}: expected 7 fields, found {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64, CliError> {
            fields[i].trim().parse::<f64>().map_err(|e| {
                CliError::input(format!(
                    "menu {} line {}: field {} '{}' is not a number: {e}",
                    path.display(),
                    lineno + 1,
                    i + 1,
                    fields[i]
                ))
            })
        };
        let orientation: Orientation = fields[1].trim().parse().map_err(|_| {
            CliError::input(format!(
                "menu {} line {}: unknown orientation '{}'",
                path.display(),
                lineno + 1,
                fields[1]
            ))
        })?;
        let row = MenuPoint {
            mu: num(0)?,
            orientation,
            noise: num(2)?,
            posterior: num(3)?,
            price: num(4)?,
            surplus: num(5)?,
            gross_utility: num(6)?,
        };
        let unit = |name: &str, x: f64| -> Result<(), CliError> {
            if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                return Err(CliError::input(format!(
                    "menu {} line {}: {name} = {x} is not in [0, 1]",
                    path.display(),
                    lineno + 1
                )));
            }
            Ok(())
        };
        unit("mu", row.mu)?;
        unit("noise", row.noise)?;
        unit("posterior", row.posterior)?;
        for (name, x) in [
            ("price", row.price),
            ("surplus", row.surplus),
            ("gross_utility", row.gross_utility),
        ] {
            if !x.is_finite() {
                return Err(CliError::input(format!(
                    "menu {} line {}: {name} = {x} is not finite",
                    path.display(),
                    lineno + 1
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, -0.0, 123456.789] {
            let back: f64 = fmt_float(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
    }
}
