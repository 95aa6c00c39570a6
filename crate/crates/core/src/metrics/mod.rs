// Copyright 2026 The emunoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Latency statistics and report files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::host::{PacketRecord, RunReport, StopReason};
use crate::noc::{NocConfig, NodeId};
use crate::transactor::SafetyReport;

pub const CSV_HEADER: &str = "id,src,dst,len,icyc,injected,arrived,latency,head_latency";

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("serializing report: {0}")]
    Json(#[from] serde_json::Error),
}

/// A delivered packet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LatencyRecord {
    pub packet_id: u32,
    pub src: NodeId,
    pub dst: NodeId,
    pub len: u16,
    pub injected: u64,
    pub arrived: u64,
    pub head_arrived: Option<u64>,
}

impl LatencyRecord {
    pub fn latency(&self) -> u64 {
        self.arrived - self.injected
    }

    pub fn head_latency(&self) -> Option<u64> {
        Some(self.head_arrived? - self.injected)
    }

    /// Delivered packets of a run, in packet order.
    pub fn from_run(per_packet: &[PacketRecord]) -> Vec<Self> {
        per_packet
            .iter()
            .filter_map(|p| {
                Some(Self {
                    packet_id: p.id,
                    src: p.src,
                    dst: p.dst,
                    len: p.len,
                    injected: p.injected?,
                    arrived: p.arrived?,
                    head_arrived: p.head_arrived,
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub packets: usize,
    pub flits_delivered: u64,
    pub max_latency: Option<u64>,
    pub min_latency: Option<u64>,
    pub mean_latency: Option<f64>,
    pub p50_latency: Option<u64>,
    pub p99_latency: Option<u64>,
    pub max_head_latency: Option<u64>,
    /// Delivered flits per node per cycle.
    pub accepted_flit_rate: f64,
    pub emu_hz: Option<f64>,
}

/// Nearest-rank percentile of ascending `sorted`: the sample at rank
/// `floor(p * n / 100) + 1`, i.e. the smallest value with strictly more than
/// `p` percent of the samples at or below it (the maximum for `p = 100`).
pub fn percentile(sorted: &[u64], p: u32) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = (p as usize * n / 100 + 1).min(n);
    Some(sorted[rank - 1])
}

pub fn summarize(records: &[LatencyRecord], nodes: usize, sim_cycles: u64, wall_seconds: f64) -> Summary {
    let mut lat: Vec<u64> = records.iter().map(LatencyRecord::latency).collect();
    lat.sort_unstable();
    let flits: u64 = records.iter().map(|r| r.len as u64).sum();
    let mean = (!lat.is_empty()).then(|| lat.iter().map(|&l| l as f64).sum::<f64>() / lat.len() as f64);
    let denom = sim_cycles as f64 * nodes as f64;
    Summary {
        packets: records.len(),
        flits_delivered: flits,
        max_latency: lat.last().copied(),
        min_latency: lat.first().copied(),
        mean_latency: mean,
        p50_latency: percentile(&lat, 50),
        p99_latency: percentile(&lat, 99),
        max_head_latency: records.iter().filter_map(LatencyRecord::head_latency).max(),
        accepted_flit_rate: if denom > 0.0 { flits as f64 / denom } else { 0.0 },
        emu_hz: (wall_seconds > 0.0).then(|| sim_cycles as f64 / wall_seconds),
    }
}

/// Summary of a finished run.
pub fn summarize_run(report: &RunReport) -> Summary {
    let mut s = summarize(
        &LatencyRecord::from_run(&report.per_packet),
        report.config.nodes(),
        report.cycles,
        report.wall_seconds,
    );
    s.emu_hz = report.emu_hz;
    s
}

#[derive(Serialize)]
struct ReportJson<'a> {
    packets: usize,
    received: usize,
    cycles: u64,
    wall_seconds: f64,
    emu_hz: Option<f64>,
    stop_reason: StopReason,
    quanta: u64,
    flits_injected: u64,
    flits_ejected: u64,
    config: &'a NocConfig,
    summary: &'a Summary,
    safety: &'a SafetyReport,
    per_packet: &'a [PacketRecord],
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> MetricsError + '_ {
    move |source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn report_json(report: &RunReport, summary: &Summary) -> Result<String, MetricsError> {
    let doc = ReportJson {
        packets: report.packets,
        received: report.received,
        cycles: report.cycles,
        wall_seconds: report.wall_seconds,
        emu_hz: report.emu_hz,
        stop_reason: report.stop_reason,
        quanta: report.quanta,
        flits_injected: report.flits_injected,
        flits_ejected: report.flits_ejected,
        config: &report.config,
        summary,
        safety: &report.safety,
        per_packet: &report.per_packet,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// One row per packet. Undelivered packets leave the cycle columns empty.
pub fn write_csv<W: Write>(mut w: W, per_packet: &[PacketRecord]) -> std::io::Result<()> {
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    writeln!(w, "{CSV_HEADER}")?;
    for p in per_packet {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            p.id,
            p.src,
            p.dst,
            p.len,
            p.icyc,
            opt(p.injected),
            opt(p.arrived),
            opt(p.latency()),
            opt(p.head_latency())
        )?;
    }
    w.flush()
}

/// Writes the JSON summary and the per-packet CSV.
pub fn write_report(
    report: &RunReport,
    summary: &Summary,
    json_path: &Path,
    csv_path: &Path,
) -> Result<(), MetricsError> {
    std::fs::write(json_path, report_json(report, summary)?).map_err(io_err(json_path))?;
    let f = File::create(csv_path).map_err(io_err(csv_path))?;
    write_csv(BufWriter::new(f), &report.per_packet).map_err(io_err(csv_path))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::host::{run, RunOptions, TrafficEvent};

    fn rec(id: u32, latency: u64) -> LatencyRecord {
        LatencyRecord {
            packet_id: id,
            src: 0,
            dst: 1,
            len: 5,
            injected: 10,
            arrived: 10 + latency,
            head_arrived: Some(10 + latency - 4),
        }
    }

    #[test]
    fn single_record() {
        let s = summarize(&[rec(0, 12)], 4, 100, 0.5);
        assert_eq!((s.max_latency, s.p50_latency, s.p99_latency, s.min_latency), (Some(12), Some(12), Some(12), Some(12)));
        assert_eq!(s.mean_latency, Some(12.0));
        assert_eq!(s.max_head_latency, Some(8));
        assert_eq!(s.emu_hz, Some(200.0));
        assert_eq!(s.accepted_flit_rate, 5.0 / 400.0);
    }

    #[test]
    fn empty_records() {
        let s = summarize(&[], 25, 1000, 2.0);
        assert_eq!(s.packets, 0);
        assert!(s.max_latency.is_none() && s.mean_latency.is_none() && s.p99_latency.is_none());
        assert_eq!(s.emu_hz, Some(500.0));
        assert_eq!(s.accepted_flit_rate, 0.0);
        assert_eq!(summarize(&[], 25, 0, 0.0).emu_hz, None);
    }

    #[test]
    fn percentiles_of_one_to_hundred() {
        let v: Vec<u64> = (1..=100).collect();
        assert_eq!(percentile(&v, 99), Some(100));
        assert_eq!(percentile(&v, 50), Some(51));
        assert_eq!(percentile(&v, 100), Some(100));
        assert_eq!(percentile(&v, 0), Some(1));
        assert_eq!(percentile(&[7], 99), Some(7));
        assert_eq!(percentile(&[], 50), None);
        let odd: Vec<u64> = (1..=5).collect();
        assert_eq!(percentile(&odd, 50), Some(3));
    }

    /// Definition check: the chosen sample has more than p% of the data at
    /// or below it, and the one before it does not.
    fn brute_percentile(sorted: &[u64], p: u32) -> u64 {
        let n = sorted.len() as u64;
        (0..sorted.len())
            .find(|&i| 100 * (i as u64 + 1) > p as u64 * n || i + 1 == sorted.len())
            .map(|i| sorted[i])
            .unwrap()
    }

    proptest! {
        #[test]
        fn ordering_of_stats(lat in prop::collection::vec(0u64..500, 1..200)) {
            let records: Vec<_> = lat.iter().enumerate().map(|(i, &l)| rec(i as u32, l + 4)).collect();
            let s = summarize(&records, 9, 1000, 1.0);
            let (max, p99, p50, min) = (s.max_latency.unwrap(), s.p99_latency.unwrap(), s.p50_latency.unwrap(), s.min_latency.unwrap());
            prop_assert!(max >= p99 && p99 >= p50 && p50 >= min);
            let mean = s.mean_latency.unwrap();
            prop_assert!(mean <= max as f64 && mean >= min as f64);
        }

        #[test]
        fn percentile_matches_definition(mut v in prop::collection::vec(0u64..50, 1..120), p in 0u32..=100) {
            v.sort_unstable();
            prop_assert_eq!(percentile(&v, p), Some(brute_percentile(&v, p)));
        }
    }

    fn small_run() -> RunReport {
        let cfg = NocConfig::mesh(3, 3);
        let events = vec![
            TrafficEvent::new(0, 0, 0, 8, 5),
            TrafficEvent::new(1, 3, 2, 6, 2).with_deps([0]),
            TrafficEvent::new(2, 4, 4, 5, 1),
        ];
        run(events, &cfg, RunOptions { record_timing: false, ..Default::default() }).unwrap()
    }

    #[test]
    fn report_files() {
        let r = small_run();
        let s = summarize_run(&r);
        assert_eq!(s.packets, 3);
        assert!(s.emu_hz.is_none());
        let dir = tempfile::tempdir().unwrap();
        let (j, c) = (dir.path().join("s.json"), dir.path().join("p.csv"));
        write_report(&r, &s, &j, &c).unwrap();
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
        for key in ["packets", "cycles", "wall_seconds", "emu_hz", "stop_reason", "summary", "safety", "per_packet"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["per_packet"].as_array().unwrap().len(), 3);
        assert_eq!(json["stop_reason"], "completed");
        let csv = std::fs::read_to_string(&c).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        for (line, p) in lines[1..].iter().zip(&r.per_packet) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 9);
            assert_eq!(cols[7], p.latency().unwrap().to_string());
        }
    }

    #[test]
    fn empty_run_report() {
        let r = run(vec![], &NocConfig::mesh(2, 2), RunOptions::default()).unwrap();
        let s = summarize_run(&r);
        let json: serde_json::Value = serde_json::from_str(&report_json(&r, &s).unwrap()).unwrap();
        assert_eq!(json["packets"], 0);
        assert_eq!(json["summary"]["packets"], 0);
        assert!(json["summary"]["max_latency"].is_null());
        let mut buf = vec![];
        write_csv(&mut buf, &r.per_packet).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn io_errors_name_the_path() {
        let r = small_run();
        let s = summarize_run(&r);
        let bad = Path::new("/nonexistent-dir/x/summary.json");
        let err = write_report(&r, &s, bad, Path::new("/tmp/ignored.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x/summary.json"), "{err}");
    }
}
