//! Serialization of configurations, coarse-grained fields and time series:
//! NDJSON snapshots (bit-exact round-trip), flat binary tensors with JSON
//! sidecars, and CSV series. All floating-point text output goes through the
//! shortest round-trip representation, so JSON and CSV round-trips are exact.

use crate::error::{Error, Result};
use crate::lattice::{Configuration, TorusGeometry};
use crate::observables::{CellStats, FieldSnapshot};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Header record of a configuration snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub n: usize,
    pub seed: u64,
    pub time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SiteRecord {
    x: usize,
    y: usize,
    theta: f64,
}

/// Writes a configuration as NDJSON: one header record, then one record per
/// occupied site in site order.
pub fn write_snapshot(
    w: &mut impl Write,
    config: &Configuration,
    seed: u64,
    time: f64,
) -> Result<()> {
    let n = config.geometry().side();
    serde_json::to_writer(&mut *w, &SnapshotHeader { n, seed, time })?;
    w.write_all(b"\n")?;
    for site in 0..config.geometry().sites() {
        if config.is_occupied(site) {
            let rec = SiteRecord {
                x: site % n,
                y: site / n,
                theta: config.angle_at(site),
            };
            serde_json::to_writer(&mut *w, &rec)?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Reads a configuration snapshot written by [`write_snapshot`].
pub fn read_snapshot(r: impl BufRead) -> Result<(Configuration, SnapshotHeader)> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty snapshot stream".into()))??;
    let header: SnapshotHeader = serde_json::from_str(&first)?;
    let mut config = Configuration::empty(TorusGeometry::new(header.n));
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let rec: SiteRecord = serde_json::from_str(&line)?;
        if rec.x >= header.n || rec.y >= header.n {
            return Err(Error::InvalidParameter(format!(
                "site ({}, {}) outside the {0}x{0} torus",
                rec.x, rec.y
            )));
        }
        let site = rec.x + header.n * rec.y;
        if config.is_occupied(site) {
            return Err(Error::InvalidParameter(format!(
                "duplicate site record for ({}, {})",
                rec.x, rec.y
            )));
        }
        config.occupy(site, rec.theta);
    }
    Ok((config, header))
}

/// Convenience wrapper writing a snapshot to a file path.
pub fn save_snapshot(path: &Path, config: &Configuration, seed: u64, time: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot(&mut w, config, seed, time)?;
    w.flush()?;
    Ok(())
}

/// Convenience wrapper reading a snapshot from a file path.
pub fn load_snapshot(path: &Path) -> Result<(Configuration, SnapshotHeader)> {
    read_snapshot(BufReader::new(File::open(path)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FieldHeader {
    time: f64,
    n: usize,
    block_side: usize,
    bins: usize,
    cells: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellRecord {
    cell: usize,
    count: u32,
    bin_counts: Vec<u32>,
    spin_sum: (f64, f64),
}

/// Writes a coarse-grained field as NDJSON: a header record, then one record
/// per cell in row-major order. Counts are stored raw, so the round-trip is
/// exact.
pub fn write_field_ndjson(w: &mut impl Write, snap: &FieldSnapshot) -> Result<()> {
    let header = FieldHeader {
        time: snap.time,
        n: snap.n,
        block_side: snap.block_side,
        bins: snap.bins,
        cells: snap.cells.len(),
    };
    serde_json::to_writer(&mut *w, &header)?;
    w.write_all(b"\n")?;
    for (cell, stats) in snap.cells.iter().enumerate() {
        let rec = CellRecord {
            cell,
            count: stats.count,
            bin_counts: stats.bin_counts.clone(),
            spin_sum: stats.spin_sum,
        };
        serde_json::to_writer(&mut *w, &rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a coarse-grained field written by [`write_field_ndjson`].
pub fn read_field_ndjson(r: impl BufRead) -> Result<FieldSnapshot> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty field stream".into()))??;
    let header: FieldHeader = serde_json::from_str(&first)?;
    let mut cells = vec![
        CellStats {
            count: 0,
            bin_counts: vec![0; header.bins],
            spin_sum: (0.0, 0.0),
        };
        header.cells
    ];
    let mut seen = vec![false; header.cells];
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let rec: CellRecord = serde_json::from_str(&line)?;
        if rec.cell >= header.cells || seen[rec.cell] {
            return Err(Error::InvalidParameter(format!(
                "bad or duplicate cell index {}",
                rec.cell
            )));
        }
        if rec.bin_counts.len() != header.bins {
            return Err(Error::GridMismatch(format!(
                "cell {} has {} bins, header says {}",
                rec.cell,
                rec.bin_counts.len(),
                header.bins
            )));
        }
        seen[rec.cell] = true;
        cells[rec.cell] = CellStats {
            count: rec.count,
            bin_counts: rec.bin_counts,
            spin_sum: rec.spin_sum,
        };
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::InvalidParameter("missing cell records".into()));
    }
    Ok(FieldSnapshot {
        time: header.time,
        n: header.n,
        block_side: header.block_side,
        bins: header.bins,
        cells,
    })
}

/// JSON sidecar describing a flat binary tensor of little-endian f64 values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorSidecar {
    pub shape: Vec<usize>,
    pub dtype: String,
    /// Producer-specific metadata (time stamps, grid parameters, layout).
    pub meta: serde_json::Value,
}

/// Writes `data` as a flat little-endian f64 tensor plus a JSON sidecar.
pub fn write_tensor(
    data_path: &Path,
    sidecar_path: &Path,
    data: &[f64],
    shape: &[usize],
    meta: serde_json::Value,
) -> Result<()> {
    let expected: usize = shape.iter().product();
    if expected != data.len() {
        return Err(Error::GridMismatch(format!(
            "tensor shape {shape:?} holds {expected} values, got {}",
            data.len()
        )));
    }
    let mut w = BufWriter::new(File::create(data_path)?);
    for &v in data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    let sidecar = TensorSidecar {
        shape: shape.to_vec(),
        dtype: "f64le".into(),
        meta,
    };
    let mut s = BufWriter::new(File::create(sidecar_path)?);
    serde_json::to_writer_pretty(&mut s, &sidecar)?;
    s.flush()?;
    Ok(())
}

/// Reads a tensor written by [`write_tensor`]; bitwise exact.
pub fn read_tensor(data_path: &Path, sidecar_path: &Path) -> Result<(Vec<f64>, TensorSidecar)> {
    let sidecar: TensorSidecar = serde_json::from_reader(BufReader::new(File::open(sidecar_path)?))?;
    if sidecar.dtype != "f64le" {
        return Err(Error::InvalidParameter(format!(
            "unsupported tensor dtype {}",
            sidecar.dtype
        )));
    }
    let expected: usize = sidecar.shape.iter().product();
    let mut bytes = Vec::new();
    File::open(data_path)?.read_to_end(&mut bytes)?;
    if bytes.len() != expected * 8 {
        return Err(Error::GridMismatch(format!(
            "tensor file holds {} bytes, sidecar shape {:?} needs {}",
            bytes.len(),
            sidecar.shape,
            expected * 8
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((data, sidecar))
}

/// Exports a field snapshot in the tensor-plus-sidecar format: shape
/// `[L, L, bins + 3]`, with per-cell layout `count, bin_counts.., spin_x,
/// spin_y` (raw counts, exactly representable in f64).
pub fn write_field_tensor(
    data_path: &Path,
    sidecar_path: &Path,
    snap: &FieldSnapshot,
) -> Result<()> {
    let l = snap.grid_side();
    let width = snap.bins + 3;
    let mut data = Vec::with_capacity(l * l * width);
    for stats in &snap.cells {
        data.push(stats.count as f64);
        data.extend(stats.bin_counts.iter().map(|&c| c as f64));
        data.push(stats.spin_sum.0);
        data.push(stats.spin_sum.1);
    }
    let meta = serde_json::json!({
        "time": snap.time,
        "n": snap.n,
        "block_side": snap.block_side,
        "bins": snap.bins,
        "layout": "count, bin_counts.., spin_x, spin_y",
    });
    write_tensor(data_path, sidecar_path, &data, &[l, l, width], meta)
}

/// Reads a field exported by [`write_field_tensor`].
pub fn read_field_tensor(data_path: &Path, sidecar_path: &Path) -> Result<FieldSnapshot> {
    let (data, sidecar) = read_tensor(data_path, sidecar_path)?;
    let meta = &sidecar.meta;
    let get = |key: &str| -> Result<u64> {
        meta.get(key)
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::InvalidParameter(format!("sidecar missing {key}")))
    };
    let bins = get("bins")? as usize;
    let width = bins + 3;
    if sidecar.shape.len() != 3 || sidecar.shape[2] != width {
        return Err(Error::GridMismatch(format!(
            "field tensor shape {:?} does not match {bins} bins",
            sidecar.shape
        )));
    }
    let cells = data
        .chunks_exact(width)
        .map(|row| CellStats {
            count: row[0] as u32,
            bin_counts: row[1..1 + bins].iter().map(|&v| v as u32).collect(),
            spin_sum: (row[1 + bins], row[2 + bins]),
        })
        .collect();
    Ok(FieldSnapshot {
        time: meta
            .get("time")
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| Error::InvalidParameter("sidecar missing time".into()))?,
        n: get("n")? as usize,
        block_side: get("block_side")? as usize,
        bins,
        cells,
    })
}

/// Writes a numeric time series as CSV with a header line; values use the
/// shortest round-trip decimal representation.
pub fn write_series_csv(w: &mut impl Write, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::GridMismatch(format!(
                "row with {} values under {} columns",
                row.len(),
                columns.len()
            )));
        }
        let text: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", text.join(","))?;
    }
    Ok(())
}

/// Reads a CSV series written by [`write_series_csv`].
pub fn read_series_csv(r: impl BufRead) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty series".into()))??;
    let columns: Vec<String> = header.split(',').map(str::to_owned).collect();
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|e| Error::InvalidParameter(format!("bad CSV value {v:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != columns.len() {
            return Err(Error::GridMismatch(format!(
                "row with {} values under {} columns",
                row.len(),
                columns.len()
            )));
        }
        rows.push(row);
    }
    Ok((columns, rows))
}
