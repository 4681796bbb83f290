use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::run::{RunReport, Snapshot};
use crate::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.csv";

pub fn snapshot_file(index: usize) -> String {
    format!("snapshot_{index:03}.csv")
}

fn num(v: f64) -> String {
    // 17 significant digits
    format!("{v:.16e}")
}

fn write(path: PathBuf, body: &str) -> Result<()> {
    fs::write(&path, body).map_err(|e| Error::io(path, e))
}

/// Writes one field file per snapshot plus `summary.csv` into `dir`, creating
/// it if needed. Returns the paths written.
pub fn emit_csv(report: &RunReport, dir: &Path, modes: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (idx, snap) in report.snapshots.iter().enumerate() {
        let coeffs = snap.modes.as_ref().filter(|_| modes);
        let mut body = String::from("x,mean,std");
        if coeffs.is_some() {
            for m in 1..=report.k {
                let _ = write!(body, ",mode_{m}");
            }
        }
        body.push('\n');
        for (i, x) in report.x.iter().enumerate() {
            let _ = write!(body, "{},{},{}", num(*x), num(snap.mean[i]), num(snap.std[i]));
            if let Some(c) = coeffs {
                for v in &c[i * report.k..(i + 1) * report.k] {
                    let _ = write!(body, ",{}", num(*v));
                }
            }
            body.push('\n');
        }
        let path = dir.join(snapshot_file(idx));
        write(path.clone(), &body)?;
        written.push(path);
    }
    let mut summary = String::from("time,NT,wall_seconds\n");
    for s in &report.snapshots {
        let _ = writeln!(summary, "{},{},{}", num(s.time), s.nt, num(s.wall_seconds));
    }
    let path = dir.join(SUMMARY_FILE);
    write(path.clone(), &summary)?;
    written.push(path);
    Ok(written)
}

fn read(path: PathBuf) -> Result<String> {
    fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

fn bad(path: &Path, line: usize, what: &str) -> Error {
    Error::InvalidArgument(format!("{}:{line}: {what}", path.display()))
}

fn parse_row(path: &Path, line: usize, row: &str) -> Result<Vec<f64>> {
    row.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| bad(path, line, "malformed number")))
        .collect()
}

/// Reads back a directory written by [`emit_csv`]. Mode columns, when present,
/// are restored; configuration and scheme text are not stored and come back empty.
pub fn load_report(dir: &Path) -> Result<RunReport> {
    let summary_path = dir.join(SUMMARY_FILE);
    let summary = read(summary_path.clone())?;
    let mut lines = summary.lines();
    if lines.next() != Some("time,NT,wall_seconds") {
        return Err(bad(&summary_path, 1, "unexpected header"));
    }
    let mut snapshots = Vec::new();
    let mut x = Vec::new();
    let mut k = 0;
    for (idx, row) in lines.enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 3 {
            return Err(bad(&summary_path, idx + 2, "expected 3 columns"));
        }
        let time: f64 = cols[0].parse().map_err(|_| bad(&summary_path, idx + 2, "bad time"))?;
        let nt: usize = cols[1].parse().map_err(|_| bad(&summary_path, idx + 2, "bad NT"))?;
        let wall: f64 = cols[2].parse().map_err(|_| bad(&summary_path, idx + 2, "bad wall time"))?;

        let path = dir.join(snapshot_file(idx));
        let body = read(path.clone())?;
        let mut rows = body.lines();
        let header = rows.next().ok_or_else(|| bad(&path, 1, "empty file"))?;
        let width = header.split(',').count();
        if !header.starts_with("x,mean,std") || width < 3 {
            return Err(bad(&path, 1, "unexpected header"));
        }
        k = width - 3;
        let (mut xs, mut mean, mut std, mut modes) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (r, row) in rows.enumerate() {
            let v = parse_row(&path, r + 2, row)?;
            if v.len() != width {
                return Err(bad(&path, r + 2, "wrong column count"));
            }
            xs.push(v[0]);
            mean.push(v[1]);
            std.push(v[2]);
            modes.extend_from_slice(&v[3..]);
        }
        x = xs;
        snapshots.push(Snapshot {
            time,
            nt,
            wall_seconds: wall,
            mean,
            std,
            modes: (k > 0).then_some(modes),
            radiation: None,
        });
    }
    Ok(RunReport {
        config: String::new(),
        scheme: String::new(),
        x,
        k: k.max(1),
        snapshots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Linf,
    L2,
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linf" => Ok(Norm::Linf),
            "l2" => Ok(Norm::L2),
            other => Err(Error::InvalidArgument(format!("unknown norm `{other}` (use linf or l2)"))),
        }
    }
}

/// Norm of `a - b`. The L2 norm is the discrete `sqrt(dx * sum)` with uniform
/// cells.
pub fn norm_diff(a: &[f64], b: &[f64], norm: Norm) -> f64 {
    let d = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    match norm {
        Norm::Linf => d.fold(0.0, f64::max),
        Norm::L2 => (d.map(|v| v * v).sum::<f64>() / a.len() as f64).sqrt(),
    }
}

/// Relative L2 difference `|a - b| / |b|`, or the absolute one when `b` is zero.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let zero = vec![0.0; b.len()];
    let scale = norm_diff(b, &zero, Norm::L2);
    let d = norm_diff(a, b, Norm::L2);
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub time: f64,
    pub mean: f64,
    pub std: f64,
}

/// Per-output-time errors between the mean and std fields of two reports.
pub fn compare(a: &RunReport, b: &RunReport, norm: Norm) -> Result<Vec<ErrorRow>> {
    if a.x.len() != b.x.len() || a.x.iter().zip(&b.x).any(|(p, q)| (p - q).abs() > 1e-12) {
        return Err(Error::InvalidArgument("reports use different grids".into()));
    }
    if a.snapshots.len() != b.snapshots.len()
        || a.snapshots.iter().zip(&b.snapshots).any(|(p, q)| (p.time - q.time).abs() > 1e-12)
    {
        return Err(Error::InvalidArgument("reports have different output times".into()));
    }
    Ok(a.snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(p, q)| ErrorRow {
            time: p.time,
            mean: norm_diff(&p.mean, &q.mean, norm),
            std: norm_diff(&p.std, &q.std, norm),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> RunReport {
        let snap = |t: f64, nt| Snapshot {
            time: t,
            nt,
            wall_seconds: 0.5,
            mean: vec![1.0, 0.5 + t],
            std: vec![0.0, 0.1],
            modes: Some(vec![1.0, 0.0, 0.5 + t, 0.1]),
            radiation: None,
        };
        RunReport {
            config: String::new(),
            scheme: String::new(),
            x: vec![0.25, 0.75],
            k: 2,
            snapshots: vec![snap(0.1, 3), snap(0.2, 6), snap(0.3, 9)],
        }
    }

    #[test]
    fn three_snapshots_give_four_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_csv(&report(), dir.path(), false).unwrap();
        assert_eq!(files.len(), 4);
        let first = fs::read_to_string(&files[0]).unwrap();
        assert!(first.starts_with("x,mean,std\n2.5000000000000000e-1,"));
        let summary = fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(summary.lines().count(), 4);
        assert!(summary.starts_with("time,NT,wall_seconds\n"));
    }

    #[test]
    fn round_trip_with_modes() {
        let dir = tempfile::tempdir().unwrap();
        let rep = report();
        emit_csv(&rep, dir.path(), true).unwrap();
        let head = fs::read_to_string(dir.path().join("snapshot_000.csv")).unwrap();
        assert!(head.starts_with("x,mean,std,mode_1,mode_2\n"));
        let back = load_report(dir.path()).unwrap();
        assert_eq!(back.x, rep.x);
        assert_eq!(back.snapshots, rep.snapshots);
        assert!(compare(&rep, &back, Norm::Linf).unwrap().iter().all(|r| r.mean == 0.0 && r.std == 0.0));
    }

    #[test]
    fn mismatches_are_errors() {
        let a = report();
        let mut b = report();
        b.snapshots.pop();
        assert!(compare(&a, &b, Norm::L2).is_err());
        let mut c = report();
        c.x[1] = 0.8;
        assert!(compare(&a, &c, Norm::L2).is_err());
        let err = load_report(Path::new("/nonexistent/dir")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn norms() {
        assert_eq!(norm_diff(&[1.0, -2.0], &[0.0, 0.0], Norm::Linf), 2.0);
        assert!((norm_diff(&[3.0, 4.0], &[0.0, 0.0], Norm::L2) - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(relative_l2(&[2.0, 2.0], &[1.0, 1.0]), 1.0);
    }
}
