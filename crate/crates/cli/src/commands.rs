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

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use emunoc::host::{run_with_link, RunOptions, RunReport, TrafficEvent};
use emunoc::metrics::{summarize_run, write_report, Summary};
use emunoc::noc::NocConfig;
use emunoc::traffic::{
    cnn_traffic, load_mapping, load_trace, locality_mapping, save_trace, snake_mapping, uniform_random, CnnMapping,
    Trace,
};
use emunoc::transactor::{FrameLog, InProcessLink, RecordingLink};

use crate::config::{cnn_rates, Experiment, MappingSpec, TrafficSpec};

pub const SUMMARY_FILE: &str = "summary.json";
pub const PACKETS_FILE: &str = "packets.csv";
pub const INJECTION_LOG_FILE: &str = "injection_frames.bin";
pub const EJECTION_LOG_FILE: &str = "ejection_frames.bin";

pub fn build_mapping(
    spec: &MappingSpec,
    noc: &NocConfig,
    framerate: Option<f64>,
    frequency: Option<f64>,
) -> Result<CnnMapping> {
    let mut m = match spec {
        MappingSpec::Snake { layers, neurons_per_core } => {
            snake_mapping(layers, noc.width, noc.height, *neurons_per_core).context("building snake mapping")?
        }
        MappingSpec::Locality { layers, neurons_per_core } => {
            locality_mapping(layers, noc.width, noc.height, *neurons_per_core).context("building locality mapping")?
        }
        MappingSpec::File(path) => {
            let m = load_mapping(path, noc.nodes()).with_context(|| format!("loading mapping {}", path.display()))?;
            // The file's own rates stand unless the config overrides them.
            let (fr, fq) = (framerate.unwrap_or(m.framerate), frequency.unwrap_or(m.noc_frequency));
            return Ok(CnnMapping {
                framerate: fr,
                noc_frequency: fq,
                ..m
            });
        }
    };
    (m.framerate, m.noc_frequency) = cnn_rates(framerate, frequency);
    Ok(m)
}

fn packet_len(noc: &NocConfig) -> Result<u16> {
    u16::try_from(noc.packet_len).context("`noc.packet_len` does not fit in 16 bits")
}

/// The traffic an experiment describes, generated or loaded.
pub fn build_events(exp: &Experiment) -> Result<Vec<TrafficEvent>> {
    match &exp.traffic {
        TrafficSpec::Uniform { flit_rate, duration } => {
            Ok(uniform_random(&exp.noc, *flit_rate, *duration, exp.seed).context("generating uniform traffic")?)
        }
        TrafficSpec::Trace { path } => {
            let trace = load_trace(path).with_context(|| format!("loading trace {}", path.display()))?;
            if trace.nodes != exp.noc.nodes() {
                bail!(
                    "trace {} is for {} nodes but the mesh has {}",
                    path.display(),
                    trace.nodes,
                    exp.noc.nodes()
                );
            }
            Ok(trace.events)
        }
        TrafficSpec::Cnn {
            mapping,
            sparsity,
            duration,
            framerate,
            frequency,
        } => {
            let m = build_mapping(mapping, &exp.noc, *framerate, *frequency)?;
            Ok(cnn_traffic(&m, *sparsity, *duration, exp.seed, packet_len(&exp.noc)?).context("generating CNN traffic")?)
        }
    }
}

pub struct RunOutcome {
    pub report: RunReport,
    pub summary: Summary,
    pub log: FrameLog,
    /// Wall time of the emulation, measured even when the report omits it.
    pub elapsed: Duration,
}

impl RunOutcome {
    pub fn emu_hz(&self) -> Option<f64> {
        let secs = self.elapsed.as_secs_f64();
        (secs > 0.0).then(|| self.report.cycles as f64 / secs)
    }

    pub fn one_line(&self) -> String {
        let r = &self.report;
        let s = &self.summary;
        let opt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        format!(
            "{:?}: {}/{} packets, {} cycles, latency max {} mean {} p99 {}, accepted {:.4} flits/node/cycle, {}",
            r.stop_reason,
            r.received,
            r.packets,
            r.cycles,
            opt(s.max_latency),
            s.mean_latency.map_or("-".to_string(), |m| format!("{m:.2}")),
            opt(s.p99_latency),
            s.accepted_flit_rate,
            self.emu_hz().map_or("emu n/a".to_string(), |hz| format!("emu {hz:.3e} Hz")),
        )
    }
}

pub fn run_experiment(exp: &Experiment) -> Result<RunOutcome> {
    let events = build_events(exp)?;
    let mut link = RecordingLink::new(InProcessLink::new(exp.noc.clone())?);
    let opts = RunOptions {
        max_cycle: exp.max_cycle,
        record_timing: exp.record_timing,
    };
    let start = Instant::now();
    let report = run_with_link(events, &exp.noc, opts, &mut link).context("running emulation")?;
    let elapsed = start.elapsed();
    let summary = summarize_run(&report);
    let (_, log) = link.into_parts();
    Ok(RunOutcome {
        report,
        summary,
        log,
        elapsed,
    })
}

/// Writes the JSON summary, per-packet CSV and both frame logs into `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_report(
        &outcome.report,
        &outcome.summary,
        &dir.join(SUMMARY_FILE),
        &dir.join(PACKETS_FILE),
    )?;
    for (name, bytes) in [
        (INJECTION_LOG_FILE, &outcome.log.injection),
        (EJECTION_LOG_FILE, &outcome.log.ejection),
    ] {
        let path = dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Uniform,
    Cnn,
}

/// Sweep point label with float noise rounded away.
pub fn point_label(v: f64) -> String {
    format!("{}", (v * 1e9).round() / 1e9)
}

/// Generates traces. Without `sparsities` the result is the single file
/// `out`; with them `out` is a directory holding one trace per point.
pub fn generate_traces(exp: &Experiment, kind: GenKind, out: &Path, sparsities: Option<&[f64]>) -> Result<Vec<PathBuf>> {
    let nodes = exp.noc.nodes();
    let write = |path: &Path, events: Vec<TrafficEvent>| -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        Ok(save_trace(path, &Trace { nodes, events })?)
    };
    match (kind, &exp.traffic, sparsities) {
        (GenKind::Uniform, _, Some(_)) => bail!("--sparsity-sweep applies to cnn traces only"),
        (GenKind::Uniform, TrafficSpec::Uniform { flit_rate, duration }, None) => {
            write(out, uniform_random(&exp.noc, *flit_rate, *duration, exp.seed)?)?;
            Ok(vec![out.to_path_buf()])
        }
        (
            GenKind::Cnn,
            TrafficSpec::Cnn {
                mapping,
                sparsity,
                duration,
                framerate,
                frequency,
            },
            points,
        ) => {
            let m = build_mapping(mapping, &exp.noc, *framerate, *frequency)?;
            let len = packet_len(&exp.noc)?;
            match points {
                None => {
                    write(out, cnn_traffic(&m, *sparsity, *duration, exp.seed, len)?)?;
                    Ok(vec![out.to_path_buf()])
                }
                Some(points) => points
                    .iter()
                    .map(|&s| {
                        let path = out.join(format!("cnn_sparsity_{}.trace", point_label(s)));
                        write(&path, cnn_traffic(&m, s, *duration, exp.seed, len).with_context(|| format!("sparsity {s}"))?)?;
                        Ok(path)
                    })
                    .collect(),
            }
        }
        (GenKind::Uniform, other, _) | (GenKind::Cnn, other, _) => bail!(
            "`traffic.kind` is {} but {:?} traces were requested; set the matching traffic keys",
            other.kind(),
            kind
        ),
    }
}
