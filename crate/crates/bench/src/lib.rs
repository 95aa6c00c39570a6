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

//! Fixed workloads shared by the benchmarks.

use emunoc::host::TrafficEvent;
use emunoc::noc::NocConfig;
use emunoc::traffic::uniform_random;

/// Uniform traffic on a `k`x`k` mesh with 2 VCs and 8-flit buffers.
pub fn uniform_workload(k: usize, flit_rate: f64, duration: u64) -> (NocConfig, Vec<TrafficEvent>) {
    let cfg = NocConfig::mesh(k, k).with_vcs(2).with_buffer_depth(8);
    let events = uniform_random(&cfg, flit_rate, duration, 1).expect("valid rate");
    (cfg, events)
}
