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

//! Cycle-accurate model of the emulated network-on-chip.

mod config;
mod endpoint;
mod flit;
mod network;
mod routing;

use thiserror::Error;

pub use config::{neighbor, Coord, NocConfig, NodeId, Port, DEFAULT_PACKET_LEN, DEFAULT_ROUTER_DELAY, MAX_NODES};
pub use endpoint::{EjectedPacket, EjectionNi, InjectionPe};
pub use flit::{Flit, FlitKind, PacketHeader};
pub use network::{Completion, Injection, Network, StepEvents};
pub use routing::route_xy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NocError {
    #[error("invalid NoC configuration: {0}")]
    InvalidConfig(String),
    #[error("injection without credit at node {node} vc {vc}")]
    InjectionWithoutCredit { node: usize, vc: usize },
    #[error("invalid injection: {0}")]
    InvalidInjection(String),
    #[error("no complete packet to drain at node {node} vc {vc}")]
    DrainWhenEmpty { node: usize, vc: usize },
    #[error("wormhole ordering violated at node {node} vc {vc} (packet {packet_id}): {reason}")]
    WormholeViolation {
        node: usize,
        vc: usize,
        packet_id: u32,
        reason: String,
    },
    #[error("network holds flits; cannot skip cycles")]
    NotIdle,
}
