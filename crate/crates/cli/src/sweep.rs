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

//! Parameter sweeps over independent runs.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use crate::commands::{point_label, run_experiment};
use crate::config::{Experiment, TrafficSpec};

pub const SWEEP_CSV_HEADER: &str =
    "point,max_latency,mean_latency,p50_latency,p99_latency,packets,accepted_flit_rate,emu_hz,status";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    Sparsity,
    FlitRate,
    MeshSize,
}

impl std::str::FromStr for SweepVariable {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sparsity" => SweepVariable::Sparsity,
            "flit_rate" => SweepVariable::FlitRate,
            "mesh_size" => SweepVariable::MeshSize,
            _ => bail!("sweep variable must be sparsity, flit_rate or mesh_size, found `{s}`"),
        })
    }
}

/// Parses `a,b,c` or the inclusive range `start:stop:step`.
pub fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        bail!("empty sweep list");
    }
    let num = |s: &str| -> Result<f64> { s.trim().parse().with_context(|| format!("bad sweep value `{s}`")) };
    if let Some((start, rest)) = spec.split_once(':') {
        let (stop, step) = rest
            .split_once(':')
            .with_context(|| format!("range `{spec}` must be start:stop:step"))?;
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            bail!("range `{spec}` needs a positive step and stop >= start");
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..n).map(|i| start + i as f64 * step).collect());
    }
    spec.split(',').map(num).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub point: String,
    pub max_latency: Option<u64>,
    pub mean_latency: Option<f64>,
    pub p50_latency: Option<u64>,
    pub p99_latency: Option<u64>,
    pub packets: usize,
    pub accepted_flit_rate: f64,
    pub emu_hz: Option<f64>,
    /// `ok`, or the error that ended the point.
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn apply_point(base: &Experiment, var: SweepVariable, v: f64) -> Result<Experiment> {
    let mut exp = base.clone();
    match (var, &mut exp.traffic) {
        (SweepVariable::Sparsity, TrafficSpec::Cnn { sparsity, .. }) => *sparsity = v,
        (SweepVariable::FlitRate, TrafficSpec::Uniform { flit_rate, .. }) => *flit_rate = v,
        (SweepVariable::MeshSize, _) => {
            if v.fract() != 0.0 || v < 1.0 {
                bail!("mesh size {v} is not a positive integer");
            }
            exp.noc.width = v as usize;
            exp.noc.height = v as usize;
        }
        (SweepVariable::Sparsity, t) => bail!("sparsity sweeps need cnn traffic, not {}", t.kind()),
        (SweepVariable::FlitRate, t) => bail!("flit_rate sweeps need uniform traffic, not {}", t.kind()),
    }
    Ok(exp)
}

fn run_point(base: &Experiment, var: SweepVariable, v: f64) -> SweepRow {
    let point = point_label(v);
    let outcome = apply_point(base, var, v).and_then(|exp| {
        exp.noc.validate()?;
        run_experiment(&exp)
    });
    match outcome {
        Ok(o) => SweepRow {
            point,
            max_latency: o.summary.max_latency,
            mean_latency: o.summary.mean_latency,
            p50_latency: o.summary.p50_latency,
            p99_latency: o.summary.p99_latency,
            packets: o.summary.packets,
            accepted_flit_rate: o.summary.accepted_flit_rate,
            emu_hz: o.summary.emu_hz,
            status: "ok".into(),
        },
        Err(e) => SweepRow {
            point,
            max_latency: None,
            mean_latency: None,
            p50_latency: None,
            p99_latency: None,
            packets: 0,
            accepted_flit_rate: 0.0,
            emu_hz: None,
            status: format!("error: {e:#}").replace([',', '\n'], ";"),
        },
    }
}

/// Runs every point in parallel. Rows come back in `points` order.
pub fn run_sweep(base: &Experiment, var: SweepVariable, points: &[f64]) -> Result<Vec<SweepRow>> {
    if points.is_empty() {
        bail!("empty sweep list");
    }
    // Reject a sweep that cannot apply to this traffic before running anything.
    apply_point(base, var, points[0])?;
    Ok(points.par_iter().map(|&v| run_point(base, var, v)).collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_CSV_HEADER}\n");
    let u = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    let f = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.point,
            u(r.max_latency),
            f(r.mean_latency),
            u(r.p50_latency),
            u(r.p99_latency),
            r.packets,
            r.accepted_flit_rate,
            f(r.emu_hz),
            r.status
        );
    }
    s
}
