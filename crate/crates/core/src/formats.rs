//! Plain-text output formats.
//!
//! Numbers are written with 17 significant digits so every `f64` round-trips.

use std::io::{self, Write};

pub const DENSITY_HEADER: &str = "y,n_y";
pub const EXPONENT_HEADER: &str = "z,psi_z";
pub const ORACLE_HEADER: &str = "z,T_z";
pub const DURATION_HEADER: &str = "duration";
pub const REFINE_HEADER: &str = "N,series,z_or_y,value";

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_xy_csv<W: Write + ?Sized>(
    w: &mut W,
    header: &str,
    rows: &[(f64, f64)],
) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for &(x, y) in rows {
        writeln!(w, "{},{}", fmt_num(x), fmt_num(y))?;
    }
    Ok(())
}

pub fn write_column_csv<W: Write + ?Sized>(
    w: &mut W,
    header: &str,
    values: &[f64],
) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for &v in values {
        writeln!(w, "{}", fmt_num(v))?;
    }
    Ok(())
}

/// Parses a two-column CSV written by [`write_xy_csv`], checking the header.
pub fn read_xy_csv(text: &str, header: &str) -> Option<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    if lines.next()? != header {
        return None;
    }
    lines
        .map(|line| {
            let (a, b) = line.split_once(',')?;
            Some((a.parse().ok()?, b.parse().ok()?))
        })
        .collect()
}
