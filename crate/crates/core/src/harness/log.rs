use crate::control::Mode;
use crate::error::{Error, Result};
use crate::sensing::CameraKind;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// First line of a tick log: what is needed to recompute metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub seed: u64,
    pub variant: String,
    pub scenario: String,
    pub participant: usize,
    pub target_id: u32,
    pub tick_rate: f64,
    /// Seconds of continuous search that count as losing the target.
    pub give_up_after: f64,
    /// A misbinding must last longer than this (seconds) to count.
    pub wrong_person_min_duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub t: f64,
    pub mode: Mode,
    pub camera: CameraKind,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    /// Executed linear velocity.
    pub v: f64,
    pub omega: f64,
    /// Ground-truth agent–target distance.
    pub target_distance: f64,
    /// Closest static obstacle or wall seen by the lidar.
    pub obstacle_distance: f64,
    pub bound_truth: Option<u32>,
    pub reid_called: bool,
    pub fresh: bool,
    pub collision: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickLog {
    pub header: LogHeader,
    pub ticks: Vec<TickRecord>,
}

impl TickLog {
    /// JSON-lines: the header object, then one object per tick.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer(&mut out, &self.header)?;
        out.write_all(b"\n")?;
        for t in &self.ticks {
            serde_json::to_writer(&mut out, t)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory cannot fail");
        buf
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(Error::Log("empty log".into())),
        };
        let mut ticks = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            ticks.push(serde_json::from_str(&line)?);
        }
        Ok(Self { header, ticks })
    }
}
