//! File formats.
//!
//! * trace CSV: header `t,re,im`, one row per sample;
//! * trace binary: four little-endian 64-bit header fields
//!   (`kappa: f64`, `dt: f64`, `n: u64`, `seed: u64`) followed by `n` packed
//!   `(re, im)` pairs of `f64`. Sample `k` sits at time `k·dt`;
//! * region CSV: `kappa,set_name,lo,hi`, one row per interval component, an
//!   empty `lo,hi` for an empty set, and a `hoelder_argmax` row carrying the
//!   maximizer in both columns;
//! * seminorm results as JSON lines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use slereg_core::exponents::{interval_pairs, RegionRow};
use slereg_core::regularity::SeminormParams;
use slereg_core::{Complex64, SeminormResult, TracePath};

use crate::error::{Error, Result};
use crate::format::machine;

pub const BINARY_HEADER_BYTES: usize = 32;

pub fn write_trace_csv<W: Write>(w: W, trace: &TracePath) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "re", "im"])?;
    for (t, z) in trace.times.iter().zip(&trace.points) {
        out.write_record([machine(*t), machine(z.re), machine(z.im)])?;
    }
    out.flush().map_err(Error::io("<csv>"))?;
    Ok(())
}

/// Reads a `t,re,im` CSV; `name` labels errors. Row numbers count data rows
/// from 1.
pub fn read_trace_csv<R: Read>(r: R, name: &str) -> Result<TracePath> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers()?.clone();
    let expected = ["t", "re", "im"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(Error::Malformed { path: name.into(), row: 0, detail: format!("header must be t,re,im, found {headers:?}") });
    }
    let mut times = Vec::new();
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Malformed { path: name.into(), row, detail: e.to_string() })?;
        let field = |j: usize| -> Result<f64> {
            let s = rec.get(j).unwrap_or("").trim();
            s.parse::<f64>()
                .map_err(|_| Error::Malformed { path: name.into(), row, detail: format!("column {}: cannot parse {s:?}", expected[j]) })
        };
        let (t, re, im) = (field(0)?, field(1)?, field(2)?);
        if !(t.is_finite() && re.is_finite() && im.is_finite()) {
            return Err(Error::Malformed { path: name.into(), row, detail: "non-finite value".into() });
        }
        times.push(t);
        points.push(Complex64::new(re, im));
    }
    Ok(TracePath::new(times, points)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryHeader {
    pub kappa: f64,
    pub dt: f64,
    pub n: u64,
    pub seed: u64,
}

pub fn write_trace_binary<W: Write>(mut w: W, header: &BinaryHeader, points: &[Complex64]) -> Result<()> {
    let io = Error::io("<binary>");
    let mut buf = Vec::with_capacity(BINARY_HEADER_BYTES + 16 * points.len());
    buf.extend_from_slice(&header.kappa.to_le_bytes());
    buf.extend_from_slice(&header.dt.to_le_bytes());
    buf.extend_from_slice(&header.n.to_le_bytes());
    buf.extend_from_slice(&header.seed.to_le_bytes());
    for z in points {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf).map_err(io)
}

pub fn read_trace_binary<R: Read>(mut r: R, name: &str) -> Result<(BinaryHeader, TracePath)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(Error::io(name))?;
    let malformed = |row: usize, detail: String| Error::Malformed { path: name.into(), row, detail };
    if bytes.len() < BINARY_HEADER_BYTES {
        return Err(malformed(0, format!("{} bytes is shorter than the {BINARY_HEADER_BYTES}-byte header", bytes.len())));
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().unwrap() };
    let header = BinaryHeader {
        kappa: f64::from_le_bytes(word(0)),
        dt: f64::from_le_bytes(word(1)),
        n: u64::from_le_bytes(word(2)),
        seed: u64::from_le_bytes(word(3)),
    };
    let body = &bytes[BINARY_HEADER_BYTES..];
    let expected = header.n.checked_mul(16).filter(|&b| b == body.len() as u64);
    if expected.is_none() {
        return Err(malformed(0, format!("header announces {} points but the body holds {} bytes", header.n, body.len())));
    }
    if !(header.dt > 0.0) {
        return Err(malformed(0, format!("dt = {} in header", header.dt)));
    }
    let mut times = Vec::with_capacity(header.n as usize);
    let mut points = Vec::with_capacity(header.n as usize);
    for (k, pair) in body.chunks_exact(16).enumerate() {
        let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
        if !(re.is_finite() && im.is_finite()) {
            return Err(malformed(k + 1, "non-finite value".into()));
        }
        times.push(header.dt * k as f64);
        points.push(Complex64::new(re, im));
    }
    Ok((header, TracePath::new(times, points)?))
}

/// Reads a trace file, choosing the format from the `.bin` extension or the
/// absence of a CSV header.
pub fn read_path_file(path: &Path) -> Result<(Option<BinaryHeader>, TracePath)> {
    let name = path.display().to_string();
    let file = File::open(path).map_err(Error::io(path))?;
    let mut reader = BufReader::new(file);
    let is_bin = path.extension().is_some_and(|e| e == "bin") || !reader.fill_buf().map_err(Error::io(path))?.starts_with(b"t");
    if is_bin {
        let (h, t) = read_trace_binary(reader, &name)?;
        Ok((Some(h), t))
    } else {
        Ok((None, read_trace_csv(reader, &name)?))
    }
}

pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(Error::io(path))
}

pub fn write_region_csv<W: Write>(w: W, rows: &[RegionRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["kappa", "set_name", "lo", "hi"])?;
    for row in rows {
        let kappa = machine(row.kappa);
        for (name, set) in row.sets() {
            let pairs = interval_pairs(set);
            if pairs.is_empty() {
                out.write_record([kappa.as_str(), name, "", ""])?;
            }
            for (lo, hi) in pairs {
                out.write_record([kappa.clone(), name.to_string(), machine(lo), machine(hi)])?;
            }
        }
        if let Some(r) = row.hoelder_argmax {
            out.write_record([kappa.clone(), "hoelder_argmax".into(), machine(r), machine(r)])?;
        }
    }
    out.flush().map_err(Error::io("<csv>"))?;
    Ok(())
}

#[derive(Serialize)]
struct RegionJsonRow<'a> {
    kappa: f64,
    attainable: bool,
    sets: Vec<RegionJsonSet<'a>>,
    hoelder_argmax: Option<f64>,
}

#[derive(Serialize)]
struct RegionJsonSet<'a> {
    name: &'a str,
    intervals: Vec<(f64, f64)>,
}

pub fn region_json(rows: &[RegionRow]) -> serde_json::Value {
    let rows: Vec<RegionJsonRow> = rows
        .iter()
        .map(|row| RegionJsonRow {
            kappa: row.kappa,
            attainable: row.kappa != 8.0,
            sets: row.sets().iter().map(|(name, set)| RegionJsonSet { name, intervals: interval_pairs(set) }).collect(),
            hoelder_argmax: row.hoelder_argmax,
        })
        .collect();
    serde_json::json!({ "rows": rows })
}

#[derive(Serialize)]
pub struct SeminormRecord<'a> {
    pub source: &'a str,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub value: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub mesh: f64,
    pub excluded_cells: usize,
    pub excluded_measure: f64,
    pub stride: usize,
}

impl<'a> SeminormRecord<'a> {
    pub fn new(source: &'a str, r: &SeminormResult) -> Self {
        let (mut p, mut alpha, mut delta, mut q) = (None, None, None, None);
        match r.params {
            SeminormParams::P(v) => p = Some(v),
            SeminormParams::Alpha(v) => alpha = Some(v),
            SeminormParams::Besov { delta: d, q: qq } => {
                delta = Some(d);
                q = Some(qq);
            }
        }
        Self {
            source,
            kind: r.kind.as_str(),
            p,
            alpha,
            delta,
            q,
            value: r.value,
            window: r.window,
            samples: r.diagnostics.samples,
            mesh: r.diagnostics.mesh,
            excluded_cells: r.diagnostics.excluded_cells,
            excluded_measure: r.diagnostics.excluded_measure,
            stride: r.diagnostics.stride,
        }
    }
}

/// Writes one JSON object per line.
pub fn write_json_line<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut w, value)?;
    w.write_all(b"\n").map_err(Error::io("<jsonl>"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_trace() -> TracePath {
        let times = vec![0.0, 0.25, 0.5];
        let points = vec![Complex64::new(0.0, 0.0), Complex64::new(0.1, 1.0 / 3.0), Complex64::new(-0.2, 1e-300)];
        TracePath::new(times, points).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let tr = sample_trace();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &tr).unwrap();
        assert!(buf.starts_with(b"t,re,im\n"));
        let back = read_trace_csv(&buf[..], "mem").unwrap();
        assert_eq!(back.times, tr.times);
        assert_eq!(back.points, tr.points);
    }

    #[test]
    fn csv_reports_offending_row() {
        let text = "t,re,im\n0,0,0\n0.5,abc,1\n";
        let err = read_trace_csv(text.as_bytes(), "f.csv").unwrap_err().to_string();
        assert!(err.contains("row 2"), "{err}");
        assert!(err.contains("re"), "{err}");
        let short = "t,re,im\n0,0,0\n0.5,1\n";
        assert!(read_trace_csv(short.as_bytes(), "f.csv").unwrap_err().to_string().contains("row 2"));
    }

    #[test]
    fn binary_layout_and_round_trip() {
        let tr = sample_trace();
        let header = BinaryHeader { kappa: 2.0, dt: 0.25, n: 3, seed: 7 };
        let mut buf = Vec::new();
        write_trace_binary(&mut buf, &header, &tr.points).unwrap();
        assert_eq!(buf.len(), 32 + 48);
        assert_eq!(&buf[0..8], &2.0f64.to_le_bytes());
        assert_eq!(&buf[16..24], &3u64.to_le_bytes());
        assert_eq!(&buf[24..32], &7u64.to_le_bytes());
        let (h, back) = read_trace_binary(&buf[..], "mem").unwrap();
        assert_eq!(h, header);
        assert_eq!(back.points, tr.points);
        assert_eq!(back.times, tr.times);
        assert!(read_trace_binary(&buf[..40], "mem").is_err());
    }
}
