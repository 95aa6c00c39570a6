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

//! Synchronisation boundary between host and emulated NoC.

mod arbiter;
mod frame;
mod halter;
mod hardware;
mod injector;
mod link;

use thiserror::Error;

pub use arbiter::RoundRobinArbiter;
pub use frame::{Arrival, Descriptor, EjectionFrame, FrameError, InjectionFrame};
pub use halter::ClockHalter;
pub use hardware::{HardwareSide, HardwareStats, SafetyReport};
pub use injector::Injector;
pub use link::{FrameLog, InProcessLink, Link, RecordingLink, ThreadedLink};

use crate::noc::NocError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransactorError {
    #[error("quantum {requested} does not advance past stored injection cycle {current}")]
    NonMonotoneQuantum { current: u64, requested: u64 },
    #[error("malformed injection frame: {0}")]
    MalformedFrame(String),
    #[error(transparent)]
    Noc(#[from] NocError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("transactor link disconnected")]
    Disconnected,
}
