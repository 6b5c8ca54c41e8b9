//! CSV and JSON artifact writers.
//!
//! All floating-point values are written with 17 significant digits so CSVs
//! round-trip exactly and identical runs produce byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Result, SheathError};
use crate::evolution::{DiagnosticsSeries, EvolutionState, GridSpec};
use crate::params::PlasmaParams;
use crate::stationary::SheathProfile;

/// 17 significant digits: exact round-trip for binary64.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_profile_csv(path: &Path, profile: &SheathProfile) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,phi,n,u,T")?;
    for i in 0..profile.x.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt(profile.x[i]),
            fmt(profile.phi[i]),
            fmt(profile.n[i]),
            fmt(profile.u[i]),
            fmt(profile.t[i])
        )?;
    }
    Ok(())
}

pub fn write_state_csv(path: &Path, state: &EvolutionState) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,v,u,T,phi")?;
    let h = state.grid.h();
    for i in 0..state.v.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt(i as f64 * h),
            fmt(state.v[i]),
            fmt(state.u[i]),
            fmt(state.temp[i]),
            fmt(state.phi[i])
        )?;
    }
    Ok(())
}

/// Restart reader for the snapshot format written by write_state_csv.
pub fn read_state_csv(path: &Path, t: f64, params: PlasmaParams) -> Result<EvolutionState> {
    let reader = BufReader::new(File::open(path)?);
    let mut x = Vec::new();
    let mut v = Vec::new();
    let mut u = Vec::new();
    let mut temp = Vec::new();
    let mut phi = Vec::new();
    for (ln, line) in reader.lines().enumerate() {
        let line = line?;
        if ln == 0 {
            if line.trim() != "x,v,u,T,phi" {
                return Err(SheathError::Config(format!(
                    "unexpected snapshot header: {line}"
                )));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(SheathError::Config(format!("bad snapshot row {ln}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| SheathError::Config(format!("row {ln}: {e}")))
        };
        x.push(parse(cols[0])?);
        v.push(parse(cols[1])?);
        u.push(parse(cols[2])?);
        temp.push(parse(cols[3])?);
        phi.push(parse(cols[4])?);
    }
    if x.len() < 17 {
        return Err(SheathError::Config("snapshot too short".into()));
    }
    let grid = GridSpec::new(*x.last().unwrap(), x.len() - 1)?;
    Ok(EvolutionState { t, grid, v, u, temp, phi, params })
}

pub fn write_series_csv(path: &Path, series: &DiagnosticsSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "t")?;
    for name in &series.names {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for k in 0..series.t.len() {
        write!(w, "{}", fmt(series.t[k]))?;
        for col in &series.columns {
            write!(w, ",{}", fmt(col[k]))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Two-column series reader ("t,<name>" or wider; first column is t).
pub fn read_series_csv(path: &Path) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<String>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut t = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut names = Vec::new();
    for (ln, line) in reader.lines().enumerate() {
        let line = line?;
        let parts: Vec<&str> = line.split(',').collect();
        if ln == 0 {
            if parts.len() < 2 || parts[0].trim() != "t" {
                return Err(SheathError::Config(format!("bad series header: {line}")));
            }
            names = parts[1..].iter().map(|s| s.trim().to_string()).collect();
            cols = vec![Vec::new(); names.len()];
            continue;
        }
        if parts.len() != names.len() + 1 {
            return Err(SheathError::Config(format!("bad series row {ln}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| SheathError::Config(format!("row {ln}: {e}")))
        };
        t.push(parse(parts[0])?);
        for (j, p) in parts[1..].iter().enumerate() {
            cols[j].push(parse(p)?);
        }
    }
    Ok((t, cols, names))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| SheathError::Config(format!("json write: {e}")))?;
    writeln!(w)?;
    Ok(())
}

/// gnuplot command file referencing a CSV; columns are 1-based.
pub fn write_plot_script(
    path: &Path,
    csv_name: &str,
    title: &str,
    xlabel: &str,
    series: &[(usize, &str)],
    logscale_y: bool,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "set datafile separator ','")?;
    writeln!(w, "set key autotitle columnhead")?;
    writeln!(w, "set title '{title}'")?;
    writeln!(w, "set xlabel '{xlabel}'")?;
    if logscale_y {
        writeln!(w, "set logscale y")?;
    }
    write!(w, "plot ")?;
    for (k, (col, label)) in series.iter().enumerate() {
        if k > 0 {
            write!(w, ", ")?;
        }
        write!(w, "'{csv_name}' using 1:{col} with lines title '{label}'")?;
    }
    writeln!(w)?;
    Ok(())
}
