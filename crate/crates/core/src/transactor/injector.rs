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

use std::collections::BTreeMap;

use super::frame::{Descriptor, InjectionFrame};
use super::TransactorError;
use crate::noc::PacketHeader;

/// Serial-to-parallel injector: holds descriptors until the emulated clock
/// reaches their injection cycle, then hands them out as head flits for the
/// source PE FIFOs.
#[derive(Clone, Debug)]
pub struct Injector {
    pending: BTreeMap<u64, Vec<Descriptor>>,
    nodes: usize,
    max_len: usize,
    last_cycle: u64,
}

impl Injector {
    pub fn new(nodes: usize, max_len: usize) -> Self {
        Self {
            pending: BTreeMap::new(),
            nodes,
            max_len,
            last_cycle: 0,
        }
    }

    pub fn validate(&self, frame: &InjectionFrame) -> Result<(), TransactorError> {
        if frame.injection_cycle <= self.last_cycle {
            return Err(TransactorError::NonMonotoneQuantum {
                current: self.last_cycle,
                requested: frame.injection_cycle,
            });
        }
        for d in &frame.descriptors {
            let malformed = |why: String| Err(TransactorError::MalformedFrame(format!("packet {}: {why}", d.packet_id)));
            if d.src as usize >= self.nodes || d.dst as usize >= self.nodes {
                return malformed(format!("src {} / dst {} outside {} nodes", d.src, d.dst, self.nodes));
            }
            if d.len == 0 {
                return malformed("zero-length packet".into());
            }
            if d.len as usize > self.max_len {
                return malformed(format!("{} flits exceed the {}-flit ejection FIFO", d.len, self.max_len));
            }
        }
        Ok(())
    }

    pub fn accept(&mut self, frame: &InjectionFrame) -> Result<(), TransactorError> {
        self.validate(frame)?;
        self.last_cycle = frame.injection_cycle;
        if !frame.descriptors.is_empty() {
            self.pending
                .entry(frame.injection_cycle)
                .or_default()
                .extend_from_slice(&frame.descriptors);
        }
        Ok(())
    }

    /// Earliest cycle with descriptors still waiting.
    pub fn next_due(&self) -> Option<u64> {
        self.pending.keys().next().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Convert every descriptor due at or before `counter` into a header,
    /// in frame order.
    pub fn take_due(&mut self, counter: u64) -> Vec<PacketHeader> {
        let mut out = vec![];
        while let Some(entry) = self.pending.first_entry() {
            if *entry.key() > counter {
                break;
            }
            out.extend(entry.remove().into_iter().map(Descriptor::to_header));
        }
        out
    }
}
