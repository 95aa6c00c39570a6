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

use serde::{Deserialize, Serialize};

use crate::noc::NodeId;

/// One packet as the software side schedules it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrafficEvent {
    pub packet_id: u32,
    /// Requested injection cycle.
    pub icyc: u64,
    pub src: NodeId,
    pub dst: NodeId,
    pub len: u16,
    /// Packets that must be received before this one may be injected.
    pub deps: Vec<u32>,
}

impl TrafficEvent {
    pub fn new(packet_id: u32, icyc: u64, src: NodeId, dst: NodeId, len: u16) -> Self {
        Self {
            packet_id,
            icyc,
            src,
            dst,
            len,
            deps: Vec::new(),
        }
    }

    pub fn with_deps(mut self, deps: impl IntoIterator<Item = u32>) -> Self {
        self.deps = deps.into_iter().collect();
        self
    }
}
