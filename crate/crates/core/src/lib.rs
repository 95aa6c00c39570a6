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

//! Software model of a hybrid NoC emulation platform.
//!
//! The hardware side ([`noc`]) is a cycle-accurate mesh of wormhole routers.
//! The software side ([`host`]) generates traffic, tracks dependencies and
//! decides how far emulated time may advance. The two meet only at the
//! [`transactor`], which exchanges binary frames and gates the emulated clock.

pub mod noc;
pub mod transactor;
pub mod host;
pub mod traffic;
pub mod metrics;

pub use host::{run, run_with_link, PacketRecord, RunOptions, RunReport, StopReason, TrafficEvent};
pub use metrics::{summarize, summarize_run, LatencyRecord, Summary};
pub use noc::{Network, NocConfig, NocError, NodeId};
pub use traffic::{CnnMapping, Trace, TrafficError, TrafficSource};
pub use transactor::{FrameLog, InProcessLink, Link, RecordingLink, SafetyReport, ThreadedLink};
