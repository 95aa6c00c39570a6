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

//! The virtual hardware buffer: every packet the host knows about, its
//! lifecycle state and its dependency bookkeeping.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::event::TrafficEvent;
use super::HostError;
use crate::noc::NocConfig;
use crate::transactor::{Descriptor, EjectionFrame, InjectionFrame, Link};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EntryState {
    Blocked,
    Eligible,
    Sent,
    Received,
}

#[derive(Clone, Debug)]
pub struct VirtualBufferEntry {
    pub event: TrafficEvent,
    pub state: EntryState,
    pub actual_injection_cycle: Option<u64>,
    pub arrival_cycle: Option<u64>,
    missing_deps: usize,
    /// Earliest cycle allowed by received dependencies.
    release: u64,
    /// Earliest cycle the packet can possibly arrive once sent.
    arrival_bound: u64,
}

/// Packets to inject at one cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub cycle: u64,
    pub packet_ids: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Every packet was received.
    Completed,
    /// The next quantum would pass the configured maximum cycle.
    MaxCycle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Continue(Selection),
    Stop(StopReason),
}

pub struct VirtualBuffer {
    config: NocConfig,
    entries: Vec<VirtualBufferEntry>,
    index: HashMap<u32, usize>,
    dependents: Vec<Vec<usize>>,
    /// (max(icyc, release), entry)
    eligible: BTreeSet<(u64, usize)>,
    /// (arrival bound, entry) for everything sent and not yet received.
    inflight: BTreeSet<(u64, usize)>,
    /// Subset of `inflight` that some blocked entry waits on.
    gating: BTreeSet<(u64, usize)>,
    received: usize,
}

impl VirtualBuffer {
    pub fn new(events: Vec<TrafficEvent>, config: &NocConfig) -> Result<Self, HostError> {
        let nodes = config.nodes();
        let mut index = HashMap::with_capacity(events.len());
        for (i, e) in events.iter().enumerate() {
            let invalid = |reason: String| HostError::InvalidEvent { packet_id: e.packet_id, reason };
            if e.src >= nodes || e.dst >= nodes {
                return Err(invalid(format!("src {} / dst {} outside {nodes} nodes", e.src, e.dst)));
            }
            if e.len == 0 || e.len as usize > config.packet_len {
                return Err(invalid(format!(
                    "length {} outside 1..={} (ejection FIFO depth)",
                    e.len, config.packet_len
                )));
            }
            if index.insert(e.packet_id, i).is_some() {
                return Err(HostError::DuplicatePacket(e.packet_id));
            }
        }

        let mut dependents = vec![Vec::new(); events.len()];
        let mut entries = Vec::with_capacity(events.len());
        let mut eligible = BTreeSet::new();
        for (i, mut event) in events.into_iter().enumerate() {
            event.deps.sort_unstable();
            event.deps.dedup();
            for d in &event.deps {
                if let Some(&j) = index.get(d) {
                    dependents[j].push(i);
                }
            }
            let missing_deps = event.deps.len();
            let state = if missing_deps == 0 {
                eligible.insert((event.icyc, i));
                EntryState::Eligible
            } else {
                EntryState::Blocked
            };
            entries.push(VirtualBufferEntry {
                event,
                state,
                actual_injection_cycle: None,
                arrival_cycle: None,
                missing_deps,
                release: 0,
                arrival_bound: 0,
            });
        }
        Ok(Self {
            config: config.clone(),
            entries,
            index,
            dependents,
            eligible,
            inflight: BTreeSet::new(),
            gating: BTreeSet::new(),
            received: 0,
        })
    }

    pub fn entries(&self) -> &[VirtualBufferEntry] {
        &self.entries
    }

    pub fn entry(&self, packet_id: u32) -> Option<&VirtualBufferEntry> {
        self.index.get(&packet_id).map(|&i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn received(&self) -> usize {
        self.received
    }

    pub fn in_flight(&self) -> usize {
        self.inflight.len()
    }

    /// Earliest effective injection cycle among eligible entries, and every
    /// eligible entry sharing it. An entry's effective cycle is
    /// `max(icyc, last dependency arrival + 1, now + 1)`.
    pub fn select_earliest(&self, now: u64) -> Option<Selection> {
        let &(floor, _) = self.eligible.first()?;
        let cycle = floor.max(now + 1);
        let mut idx: Vec<usize> = self.eligible.range(..=(cycle, usize::MAX)).map(|&(_, i)| i).collect();
        idx.sort_unstable();
        Some(Selection {
            cycle,
            packet_ids: idx.into_iter().map(|i| self.entries[i].event.packet_id).collect(),
        })
    }

    /// Decide the next quantum.
    ///
    /// The quantum never passes the earliest cycle at which an in-flight
    /// packet that others depend on could arrive, so a dependency arrival
    /// is always seen at the end of the quantum in which it happens and its
    /// dependents can go out on the very next cycle. When nothing is left
    /// to inject, quanta follow the arrival bounds of the remaining
    /// in-flight packets until the network drains.
    pub fn advance(&self, now: u64, max_cycle: u64) -> Result<Decision, HostError> {
        let gate = self.gating.first().map(|&(b, _)| b.max(now + 1));
        // Injections past the horizon are dropped, but what is already in
        // flight keeps draining up to it.
        let earliest = self.select_earliest(now).filter(|s| s.cycle <= max_cycle);
        let next = match (earliest, gate) {
            (Some(sel), Some(g)) if g < sel.cycle => Selection { cycle: g, packet_ids: vec![] },
            (Some(sel), _) => sel,
            (None, _) => match self.inflight.first() {
                Some(&(b, _)) => Selection {
                    cycle: b.max(now + 1),
                    packet_ids: vec![],
                },
                None if self.received == self.entries.len() => return Ok(Decision::Stop(StopReason::Completed)),
                None if !self.eligible.is_empty() => return Ok(Decision::Stop(StopReason::MaxCycle)),
                None => {
                    let stuck = self
                        .entries
                        .iter()
                        .filter(|e| e.state != EntryState::Received)
                        .map(|e| e.event.packet_id)
                        .collect();
                    return Err(HostError::DependencyDeadlock(stuck));
                }
            },
        };
        if next.cycle > max_cycle {
            return Ok(Decision::Stop(StopReason::MaxCycle));
        }
        Ok(Decision::Continue(next))
    }

    /// Build the injection frame for a selection and mark its entries sent.
    pub fn take_frame(&mut self, sel: &Selection) -> Result<InjectionFrame, HostError> {
        let mut descriptors = Vec::with_capacity(sel.packet_ids.len());
        for &id in &sel.packet_ids {
            let i = *self.index.get(&id).ok_or(HostError::UnknownPacket(id))?;
            let e = &mut self.entries[i];
            if e.state != EntryState::Eligible {
                return Err(HostError::ArrivalMismatch {
                    packet_id: id,
                    reason: format!("cannot send a {:?} packet", e.state),
                });
            }
            let floor = e.event.icyc.max(e.release);
            self.eligible.remove(&(floor, i));
            e.state = EntryState::Sent;
            e.actual_injection_cycle = Some(sel.cycle);
            e.arrival_bound = sel.cycle + self.config.zero_load_latency(e.event.src, e.event.dst, e.event.len as usize);
            self.inflight.insert((e.arrival_bound, i));
            if !self.dependents[i].is_empty() {
                self.gating.insert((e.arrival_bound, i));
            }
            descriptors.push(
                Descriptor::new(id, e.event.src, e.event.dst, e.event.len as usize).map_err(|err| {
                    HostError::InvalidEvent {
                        packet_id: id,
                        reason: err.to_string(),
                    }
                })?,
            );
        }
        Ok(InjectionFrame {
            injection_cycle: sel.cycle,
            descriptors,
        })
    }

    /// Match an ejection frame against sent packets, release dependents
    /// and return the ids received.
    pub fn match_received(&mut self, frame: &EjectionFrame) -> Result<Vec<u32>, HostError> {
        let mut ids = Vec::with_capacity(frame.arrivals.len());
        for a in &frame.arrivals {
            let id = a.packet_id;
            let i = *self.index.get(&id).ok_or(HostError::UnknownPacket(id))?;
            let e = &mut self.entries[i];
            match e.state {
                EntryState::Sent => {}
                EntryState::Received => return Err(HostError::DuplicateArrival(id)),
                s => {
                    return Err(HostError::ArrivalMismatch {
                        packet_id: id,
                        reason: format!("arrived while {s:?}"),
                    })
                }
            }
            if (a.src as usize, a.dst as usize, a.len) != (e.event.src, e.event.dst, e.event.len) {
                return Err(HostError::ArrivalMismatch {
                    packet_id: id,
                    reason: format!("header ({}, {}, {}) does not match the sent packet", a.src, a.dst, a.len),
                });
            }
            if frame.halt_cycle < e.arrival_bound {
                return Err(HostError::Causality {
                    packet_id: id,
                    arrival: frame.halt_cycle,
                    bound: e.arrival_bound,
                });
            }
            e.state = EntryState::Received;
            e.arrival_cycle = Some(frame.halt_cycle);
            let bound = e.arrival_bound;
            self.inflight.remove(&(bound, i));
            self.gating.remove(&(bound, i));
            self.received += 1;
            for k in 0..self.dependents[i].len() {
                let j = self.dependents[i][k];
                let dep = &mut self.entries[j];
                dep.missing_deps -= 1;
                dep.release = dep.release.max(frame.halt_cycle + 1);
                if dep.missing_deps == 0 {
                    dep.state = EntryState::Eligible;
                    self.eligible.insert((dep.event.icyc.max(dep.release), j));
                }
            }
            ids.push(id);
        }
        Ok(ids)
    }
}

/// Send one quantum's frame over the link and mark its packets sent.
pub fn send_quantum(buffer: &mut VirtualBuffer, sel: &Selection, link: &mut impl Link) -> Result<(), HostError> {
    let frame = buffer.take_frame(sel)?;
    link.send(frame)?;
    Ok(())
}
