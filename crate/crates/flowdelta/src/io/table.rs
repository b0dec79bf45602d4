//! CSV tables. Floats are written with 17 significant digits so a table
//! re-reads to the same bits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::classify::{Overlay, RegionMap};
use crate::delta::{DeltaTrajectory, OvercompressiveScan};
use crate::model::SystemParams;
use crate::solver::{Grid, Snapshot};

/// `1.2345678901234567e0` style, 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    pub x: f64,
    /// `x / t`, NaN at `t = 0`.
    pub xt: f64,
    pub rho: f64,
    pub u_tilde: f64,
    pub u_phys: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub rho: f64,
    pub u_tilde: f64,
    pub region: String,
    pub subregion: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub zeta: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub curve: String,
    pub rho: f64,
    pub u_tilde: f64,
}

pub fn profile_rows(params: &SystemParams, grid: &Grid, snaps: &[Snapshot]) -> Vec<ProfileRow> {
    let mut out = Vec::with_capacity(snaps.len() * grid.n_cells);
    for s in snaps {
        let shift = params.shift(s.t);
        for i in 0..grid.n_cells {
            let x = grid.x(i);
            out.push(ProfileRow {
                t: s.t,
                x,
                xt: if s.t > 0.0 { x / s.t } else { f64::NAN },
                rho: s.rho[i],
                u_tilde: s.u_tilde[i],
                u_phys: s.u_tilde[i] + shift,
            });
        }
    }
    out
}

/// Splits `I_a` into `("I", "a")`; labels without a subscript keep an empty one.
pub fn split_label(label: &str) -> (&str, &str) {
    label.split_once('_').unwrap_or((label, ""))
}

pub fn join_label(region: &str, subregion: &str) -> String {
    if subregion.is_empty() {
        region.to_string()
    } else {
        format!("{region}_{subregion}")
    }
}

pub fn region_rows(map: &RegionMap) -> Vec<RegionRow> {
    let n = map.rho.len();
    map.labels
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let (region, sub) = split_label(l);
            RegionRow { rho: map.rho[k % n], u_tilde: map.u_tilde[k / n], region: region.into(), subregion: sub.into() }
        })
        .collect()
}

/// Admissible cells get region `IV`, ambiguous ones subregion `flagged`.
pub fn scan_rows(scan: &OvercompressiveScan) -> Vec<RegionRow> {
    let n = scan.rho.len();
    (0..scan.admissible.len())
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let flagged = scan.flagged.contains(&(i, j));
            RegionRow {
                rho: scan.rho[i],
                u_tilde: scan.u_tilde[j],
                region: if scan.admissible[k] { "IV" } else { "none" }.into(),
                subregion: if flagged { "flagged" } else { "" }.into(),
            }
        })
        .collect()
}

pub fn trajectory_rows(traj: &DeltaTrajectory) -> Vec<TrajectoryRow> {
    (0..traj.times.len())
        .map(|k| TrajectoryRow { t: traj.times[k], x: traj.x[k], zeta: traj.zeta[k], eta: traj.eta[k] })
        .collect()
}

pub fn curve_rows(overlays: &[Overlay]) -> Vec<CurveRow> {
    overlays
        .iter()
        .flat_map(|o| o.points.iter().map(move |&(rho, u)| CurveRow { curve: o.name.clone(), rho, u_tilde: u }))
        .collect()
}

/// Groups curve rows back into overlays, keeping first-seen order.
pub fn overlays_from_rows(rows: &[CurveRow]) -> Vec<Overlay> {
    let mut out: Vec<Overlay> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|o| o.name == r.curve) {
            Some(o) => o.points.push((r.rho, r.u_tilde)),
            None => out.push(Overlay { name: r.curve.clone(), points: vec![(r.rho, r.u_tilde)] }),
        }
    }
    out
}

/// Rows that know their CSV header and cell text.
pub trait CsvRow: Sized {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
    fn from_cells(cells: &[&str]) -> Option<Self>;
}

fn num(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

impl CsvRow for ProfileRow {
    const HEADER: &'static [&'static str] = &["t", "x", "xt", "rho", "u_tilde", "u_phys"];

    fn cells(&self) -> Vec<String> {
        [self.t, self.x, self.xt, self.rho, self.u_tilde, self.u_phys].map(fmt_f64).to_vec()
    }

    fn from_cells(c: &[&str]) -> Option<Self> {
        Some(Self { t: num(c[0])?, x: num(c[1])?, xt: num(c[2])?, rho: num(c[3])?, u_tilde: num(c[4])?, u_phys: num(c[5])? })
    }
}

impl CsvRow for RegionRow {
    const HEADER: &'static [&'static str] = &["rho", "u_tilde", "region", "subregion"];

    fn cells(&self) -> Vec<String> {
        vec![fmt_f64(self.rho), fmt_f64(self.u_tilde), self.region.clone(), self.subregion.clone()]
    }

    fn from_cells(c: &[&str]) -> Option<Self> {
        Some(Self { rho: num(c[0])?, u_tilde: num(c[1])?, region: c[2].into(), subregion: c[3].into() })
    }
}

impl CsvRow for TrajectoryRow {
    const HEADER: &'static [&'static str] = &["t", "x", "zeta", "eta"];

    fn cells(&self) -> Vec<String> {
        [self.t, self.x, self.zeta, self.eta].map(fmt_f64).to_vec()
    }

    fn from_cells(c: &[&str]) -> Option<Self> {
        Some(Self { t: num(c[0])?, x: num(c[1])?, zeta: num(c[2])?, eta: num(c[3])? })
    }
}

impl CsvRow for CurveRow {
    const HEADER: &'static [&'static str] = &["curve", "rho", "u_tilde"];

    fn cells(&self) -> Vec<String> {
        vec![self.curve.clone(), fmt_f64(self.rho), fmt_f64(self.u_tilde)]
    }

    fn from_cells(c: &[&str]) -> Option<Self> {
        Some(Self { curve: c[0].into(), rho: num(c[1])?, u_tilde: num(c[2])? })
    }
}

pub fn write_csv<R: CsvRow, W: Write>(out: W, rows: &[R]) -> Result<(), IoError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<R: CsvRow>(path: &Path, rows: &[R]) -> Result<(), IoError> {
    write_csv(BufWriter::new(File::create(path)?), rows)
}

pub fn read_csv<R: CsvRow>(text: &str) -> Result<Vec<R>, IoError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != R::HEADER {
        return Err(IoError::Parse { line: 1, message: format!("expected header {:?}, found {header:?}", R::HEADER) });
    }
    let mut out = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        let cells: Vec<&str> = rec.iter().collect();
        let row = (cells.len() == R::HEADER.len()).then(|| R::from_cells(&cells)).flatten();
        out.push(row.ok_or_else(|| IoError::Parse { line: k + 2, message: "malformed row".into() })?);
    }
    Ok(out)
}

pub fn read_csv_file<R: CsvRow>(path: &Path) -> Result<Vec<R>, IoError> {
    read_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count(), 17);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            RegionRow { rho: 0.075, u_tilde: -9.9, region: "V".into(), subregion: "C0VSaC0".into() },
            RegionRow { rho: 1.0 / 3.0, u_tilde: 0.1, region: "IV".into(), subregion: String::new() },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rho,u_tilde,region,subregion\n") && text.ends_with('\n'));
        assert_eq!(read_csv::<RegionRow>(&text).unwrap(), rows);
        assert!(read_csv::<TrajectoryRow>(&text).is_err());
    }

    #[test]
    fn labels_split() {
        assert_eq!(split_label("V_C0VSaC0"), ("V", "C0VSaC0"));
        assert_eq!(split_label("IV"), ("IV", ""));
        assert_eq!(join_label("I", "a"), "I_a");
    }
}
