//! Trace-parallel execution with an ordered reduction and an optional
//! append-only checkpoint.
//!
//! Trace `i` depends only on `(config, i)`, so the records are identical no
//! matter how many threads run or how often a run is interrupted. Records are
//! always handed back in index order.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding the thread count.
pub const THREADS_ENV: &str = "SLE_REG_THREADS";

/// Thread count: `SLE_REG_THREADS` if set and valid, else `flag`, else the
/// number of available cores.
pub fn thread_count(flag: Option<usize>) -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .or(flag.filter(|&n| n > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Per-trace output. `None` entries are excluded samples (flagged).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub index: u64,
    pub values: Vec<Option<f64>>,
    #[serde(default)]
    pub clamps: u64,
}

impl TraceRecord {
    pub fn new(index: u64, values: Vec<Option<f64>>, clamps: u64) -> Self {
        Self { index, values, clamps }
    }

    pub fn dense(index: u64, values: Vec<f64>, clamps: u64) -> Self {
        Self::new(index, values.into_iter().map(Some).collect(), clamps)
    }

    pub fn flagged(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    config_hash: String,
}

pub struct Runner {
    threads: usize,
    chunk: usize,
    checkpoint: Option<(PathBuf, String)>,
}

impl Runner {
    pub fn new(threads: usize) -> Self {
        Self { threads: threads.max(1), chunk: 64, checkpoint: None }
    }

    /// Persist records to `path`, tagged with `config_hash`. An existing file
    /// with the same hash is resumed; a different hash is refused.
    pub fn with_checkpoint(mut self, path: PathBuf, config_hash: String) -> Self {
        self.checkpoint = Some((path, config_hash));
        self
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn run<F>(&self, n: usize, f: F) -> Result<Vec<TraceRecord>>
    where
        F: Fn(u64) -> Result<TraceRecord> + Sync + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .expect("thread pool construction");
        let mut records = match &self.checkpoint {
            Some((path, hash)) => load_checkpoint(path, hash, n)?,
            None => Vec::new(),
        };
        let mut sink = match &self.checkpoint {
            Some((path, _)) => Some(OpenOptions::new().append(true).open(path).map_err(Error::io(path))?),
            None => None,
        };
        let chunk = self.chunk.max(4 * self.threads);
        while records.len() < n {
            let lo = records.len();
            let hi = (lo + chunk).min(n);
            let batch: Vec<TraceRecord> = pool.install(|| (lo..hi).into_par_iter().map(|i| f(i as u64)).collect::<Result<_>>())?;
            if let (Some(file), Some((path, _))) = (sink.as_mut(), &self.checkpoint) {
                let mut buf = Vec::new();
                for r in &batch {
                    serde_json::to_writer(&mut buf, r)?;
                    buf.push(b'\n');
                }
                file.write_all(&buf).and_then(|_| file.flush()).map_err(Error::io(path))?;
            }
            records.extend(batch);
        }
        Ok(records)
    }
}

/// Reads the valid prefix of a checkpoint, creating the file if absent.
fn load_checkpoint(path: &PathBuf, hash: &str, n: usize) -> Result<Vec<TraceRecord>> {
    let header = serde_json::to_string(&CheckpointHeader { config_hash: hash.to_string() })?;
    let Ok(file) = File::open(path) else {
        std::fs::write(path, format!("{header}\n")).map_err(Error::io(path))?;
        return Ok(Vec::new());
    };
    let mut lines = BufReader::new(file).lines();
    let first = lines.next().transpose().map_err(Error::io(path))?.unwrap_or_default();
    let found: CheckpointHeader = serde_json::from_str(&first)
        .map_err(|e| Error::Malformed { path: path.display().to_string(), row: 0, detail: format!("checkpoint header: {e}") })?;
    if found.config_hash != hash {
        return Err(Error::HashMismatch { expected: hash.to_string(), found: found.config_hash });
    }
    let mut records = Vec::new();
    for line in lines {
        let Ok(line) = line else { break };
        match serde_json::from_str::<TraceRecord>(&line) {
            Ok(r) if r.index == records.len() as u64 && records.len() < n => records.push(r),
            _ => break,
        }
    }
    // drop a torn tail so appends continue from a clean prefix
    let mut text = format!("{header}\n");
    for r in &records {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(Error::io(path))?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(i: u64) -> Result<TraceRecord> {
        Ok(TraceRecord::dense(i, vec![(i as f64).sqrt(), 1.0 / (i as f64 + 1.0)], 0))
    }

    #[test]
    fn parallel_equals_serial() {
        let a = Runner::new(1).run(300, job).unwrap();
        let b = Runner::new(4).run(300, job).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(i, r)| r.index == i as u64));
    }

    #[test]
    fn checkpoint_resume_and_refusal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let first = Runner::new(2).with_checkpoint(path.clone(), "h1".into()).run(100, job).unwrap();
        // simulate an interrupted run: keep 37 records plus a torn line
        let text = std::fs::read_to_string(&path).unwrap();
        let mut kept: Vec<&str> = text.lines().take(38).collect();
        kept.push("{\"index\":37,\"val");
        std::fs::write(&path, kept.join("\n")).unwrap();
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let resumed = Runner::new(2)
            .with_checkpoint(path.clone(), "h1".into())
            .run(100, |i| {
                calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                job(i)
            })
            .unwrap();
        assert_eq!(resumed, first);
        assert_eq!(calls.into_inner(), 63);
        let err = Runner::new(1).with_checkpoint(path, "h2".into()).run(100, job).unwrap_err();
        assert!(matches!(err, Error::HashMismatch { .. }));
    }
}
