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

//! The software side: virtual hardware buffer, dependency tracking and the
//! quantum loop that drives the hardware through the transactor.

mod buffer;
mod event;
mod run;

use thiserror::Error;

pub use buffer::{send_quantum, Decision, EntryState, Selection, StopReason, VirtualBuffer, VirtualBufferEntry};
pub use event::TrafficEvent;
pub use run::{run, run_with_link, PacketRecord, RunOptions, RunReport, DEFAULT_MAX_CYCLE};

use crate::transactor::TransactorError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HostError {
    #[error("packet {packet_id}: {reason}")]
    InvalidEvent { packet_id: u32, reason: String },
    #[error("packet id {0} appears twice")]
    DuplicatePacket(u32),
    #[error("arrival of unknown packet {0}")]
    UnknownPacket(u32),
    #[error("packet {0} arrived twice")]
    DuplicateArrival(u32),
    #[error("packet {packet_id}: {reason}")]
    ArrivalMismatch { packet_id: u32, reason: String },
    #[error("packet {packet_id} arrived at {arrival}, before its zero-load bound {bound}")]
    Causality { packet_id: u32, arrival: u64, bound: u64 },
    #[error("dependency deadlock: network idle and packets {0:?} can never be injected")]
    DependencyDeadlock(Vec<u32>),
    #[error(transparent)]
    Transactor(#[from] TransactorError),
}
