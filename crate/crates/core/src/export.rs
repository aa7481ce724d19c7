//! Trajectory files.
//!
//! CSV columns, in order:
//!
//! ```text
//! psi, t_1..t_s, x_{s+1}..x_n, dt_1..dt_s, dx_{s+1}..dx_n, form_residual, ortho_residual
//! ```
//!
//! where `form_residual = p⊛p - R²` and `ortho_residual = p⊛ṗ`. Values are
//! written with 17 significant digits so every binary64 survives a round trip.
//! JSON carries the same fields per sample plus a header with the signature,
//! radii and provenance.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{inner_product, Signature};
use crate::ode::{Provenance, Trajectory};
use crate::verify::CellReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub psi: f64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub dt: Vec<f64>,
    pub dx: Vec<f64>,
    pub form_residual: f64,
    pub ortho_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub signature: Signature,
    pub radius: f64,
    pub effective_radius: f64,
    pub provenance: Provenance,
    pub samples: Vec<SampleRecord>,
}

impl TrajectoryRecord {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let spec = traj.spec();
        let sig = spec.signature();
        let r2 = spec.radius() * spec.radius();
        let samples = traj
            .samples()
            .iter()
            .map(|s| {
                let p = s.point.coords();
                let v = s.velocity.coords();
                SampleRecord {
                    psi: s.psi,
                    t: s.point.t().to_vec(),
                    x: s.point.x().to_vec(),
                    dt: s.velocity.dt().to_vec(),
                    dx: s.velocity.dx().to_vec(),
                    form_residual: s.point.quadratic_form() - r2,
                    ortho_residual: inner_product(p, v, sig).unwrap_or(f64::NAN),
                }
            })
            .collect();
        Self {
            signature: sig,
            radius: spec.radius(),
            effective_radius: spec.effective_radius(),
            provenance: traj.provenance(),
            samples,
        }
    }
}

/// Column names for a signature.
pub fn csv_header(sig: Signature) -> Vec<String> {
    let (s, n) = (sig.s(), sig.n());
    let mut cols = vec!["psi".to_string()];
    cols.extend((1..=s).map(|i| format!("t_{i}")));
    cols.extend((s + 1..=n).map(|j| format!("x_{j}")));
    cols.extend((1..=s).map(|i| format!("dt_{i}")));
    cols.extend((s + 1..=n).map(|j| format!("dx_{j}")));
    cols.push("form_residual".into());
    cols.push("ortho_residual".into());
    cols
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(record: &TrajectoryRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(record.signature))?;
    for s in &record.samples {
        let row = std::iter::once(s.psi)
            .chain(s.t.iter().copied())
            .chain(s.x.iter().copied())
            .chain(s.dt.iter().copied())
            .chain(s.dx.iter().copied())
            .chain([s.form_residual, s.ortho_residual])
            .map(fmt17);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_csv`]. The signature is recovered from the
/// header; radius and provenance are not part of the CSV format.
pub fn read_csv<R: Read>(input: R) -> Result<(Signature, Vec<SampleRecord>)> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    let s = header.iter().filter(|h| h.starts_with("t_")).count();
    let r = header.iter().filter(|h| h.starts_with("x_")).count();
    let sig = Signature::new(s, r)?;
    let expected = csv_header(sig);
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let mut samples = Vec::new();
    for row in rd.records() {
        let row = row?;
        let vals = row
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{f:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut it = vals.into_iter();
        let mut take = |k: usize| -> Vec<f64> { it.by_ref().take(k).collect() };
        let psi = take(1)[0];
        let t = take(s);
        let x = take(r);
        let dt = take(s);
        let dx = take(r);
        let tail = take(2);
        samples.push(SampleRecord {
            psi,
            t,
            x,
            dt,
            dx,
            form_residual: tail[0],
            ortho_residual: tail[1],
        });
    }
    Ok((sig, samples))
}

pub fn write_json<W: Write>(record: &TrajectoryRecord, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, record)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<TrajectoryRecord> {
    Ok(serde_json::from_reader(input)?)
}

/// Verification report, one row per `(s, r, R)` cell.
pub fn write_report_csv<W: Write>(rows: &[CellReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_json<W: Write>(rows: &[CellReport], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, rows)?;
    Ok(())
}
