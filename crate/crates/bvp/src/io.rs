//! CSV and JSON output. Floats are written with 17 significant digits.

use std::io::{BufRead, Write};

use rd3_core::SystemParams;
use serde::{Deserialize, Serialize};

use crate::continuation::{BranchRun, DiagramRow, PointKind};
use crate::error::{BvpError, Result};
use crate::orbit::PeriodicOrbit;

pub const DIAGRAM_HEADER: &str = "step,A,mass,stability_hint,branch_id";
pub const ORBIT_HEADER: &str = "x,u,p,v,q,w,r";

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_diagram<W: Write>(mut w: W, rows: &[DiagramRow]) -> Result<()> {
    writeln!(w, "{DIAGRAM_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.step, fmt17(r.a), fmt17(r.mass), r.stability_hint, r.branch_id)?;
    }
    Ok(())
}

fn bad(line: usize, what: &str) -> BvpError {
    BvpError::Invalid(format!("line {line}: {what}"))
}

pub fn read_diagram<R: BufRead>(r: R) -> Result<Vec<DiagramRow>> {
    let mut out = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        if k == 0 {
            if line.trim() != DIAGRAM_HEADER {
                return Err(bad(1, "unexpected header"));
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad(k + 1, "expected 5 fields"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(k + 1, "bad number"));
        let int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad(k + 1, "bad integer"));
        out.push(DiagramRow {
            step: int(f[0])? as usize,
            a: num(f[1])?,
            mass: num(f[2])?,
            stability_hint: int(f[3])? as i32,
            branch_id: int(f[4])? as usize,
        });
    }
    Ok(out)
}

/// Node values from `−L` to `L` inclusive; the last row repeats the first state.
pub fn write_orbit<W: Write>(mut w: W, o: &PeriodicOrbit) -> Result<()> {
    writeln!(w, "{ORBIT_HEADER}")?;
    let n = o.intervals();
    for (k, x) in o.mesh.iter().enumerate() {
        let y = &o.nodes[k % n];
        let cols: Vec<String> = std::iter::once(*x).chain(y.iter().copied()).map(fmt17).collect();
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}

pub fn read_orbit<R: BufRead>(r: R) -> Result<Vec<[f64; 7]>> {
    let mut out = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        if k == 0 {
            if line.trim() != ORBIT_HEADER {
                return Err(bad(1, "unexpected header"));
            }
            continue;
        }
        let mut row = [0.0; 7];
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(bad(k + 1, "expected 7 fields"));
        }
        for (v, s) in row.iter_mut().zip(f) {
            *v = s.trim().parse().map_err(|_| bad(k + 1, "bad number"))?;
        }
        out.push(row);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub branch_id: usize,
    pub kind: String,
    pub step: usize,
    pub a: f64,
    pub mass: f64,
}

impl Event {
    pub fn from_run(run: &BranchRun) -> Vec<Event> {
        run.points
            .iter()
            .map(|p| Event {
                branch_id: run.branch_id,
                kind: match p.kind {
                    PointKind::Fold => "fold",
                    PointKind::Pitchfork => "pitchfork",
                    PointKind::Start => "start",
                    PointKind::End => "end",
                }
                .to_string(),
                step: p.step,
                a: p.a,
                mass: p.orbit.mass,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub params: SystemParams,
    pub seeds: Vec<String>,
    pub events: Vec<Event>,
    pub outputs: Vec<String>,
    /// Seconds since the Unix epoch; the only non-deterministic field.
    pub timestamp: u64,
}

impl Manifest {
    pub fn new(command: &str, params: SystemParams) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Manifest { command: command.into(), params, seeds: vec![], events: vec![], outputs: vec![], timestamp }
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagram_round_trip_is_exact() {
        let rows = vec![
            DiagramRow { step: 0, a: 0.1 + 0.2, mass: -1.0 / 3.0, stability_hint: 1, branch_id: 0 },
            DiagramRow { step: 7, a: 6.02214076e23, mass: 5e-324, stability_hint: -1, branch_id: 2 },
        ];
        let mut buf = Vec::new();
        write_diagram(&mut buf, &rows).unwrap();
        let back = read_diagram(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn fmt17_round_trips() {
        for x in [std::f64::consts::PI, -1e-300, 0.1, 123456789.123456789, f64::MAX] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }
}
