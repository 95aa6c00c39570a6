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

//! Workload generators and trace files.

use std::path::PathBuf;

use thiserror::Error;

use crate::host::TrafficEvent;
use crate::noc::NocConfig;

mod cnn;
mod mapping;
mod trace;
mod uniform;

pub use cnn::{
    cnn_irate, cnn_traffic, format_mapping, load_mapping, parse_mapping, save_mapping, CnnMapping, CoreLoad,
    DEFAULT_FRAMERATE, DEFAULT_NOC_FREQUENCY,
};
pub use mapping::{inter_layer_distance, locality_mapping, snake_mapping, snake_order, weighted_hop_count};
pub use trace::{format_trace, load_trace, parse_trace, save_trace, Trace, TRACE_MAGIC, TRACE_VERSION};
pub use uniform::uniform_random;

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("injection probability {0} outside [0, 1]")]
    InvalidRate(f64),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: packet {packet_id} depends on undeclared id {dep}")]
    DanglingDep { line: usize, packet_id: u32, dep: u32 },
    #[error("line {line}: packet {packet_id} depends on {dep}, which is declared later")]
    NotTopological { line: usize, packet_id: u32, dep: u32 },
    #[error("dependency cycle through packets {0:?}")]
    CyclicDeps(Vec<u32>),
    #[error("mapping needs {needed} cores but the grid has {available}")]
    GridTooSmall { needed: usize, available: usize },
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
    #[error("trace has {trace} nodes but the mesh has {mesh}")]
    NodeCountMismatch { trace: usize, mesh: usize },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrafficSource {
    Uniform { flit_rate: f64, duration: u64 },
    Trace(Trace),
    Cnn { mapping: CnnMapping, sparsity: f64, duration: u64 },
}

/// Events for `config`'s mesh. Random sources draw from `seed`.
pub fn generate(source: &TrafficSource, config: &NocConfig, seed: u64) -> Result<Vec<TrafficEvent>, TrafficError> {
    match source {
        TrafficSource::Uniform { flit_rate, duration } => uniform_random(config, *flit_rate, *duration, seed),
        TrafficSource::Trace(t) => {
            if t.nodes != config.nodes() {
                return Err(TrafficError::NodeCountMismatch {
                    trace: t.nodes,
                    mesh: config.nodes(),
                });
            }
            Ok(t.events.clone())
        }
        TrafficSource::Cnn {
            mapping,
            sparsity,
            duration,
        } => {
            if mapping.nodes() != config.nodes() {
                return Err(TrafficError::NodeCountMismatch {
                    trace: mapping.nodes(),
                    mesh: config.nodes(),
                });
            }
            let len = u16::try_from(config.packet_len).unwrap_or(u16::MAX);
            cnn_traffic(mapping, *sparsity, *duration, seed, len)
        }
    }
}
