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

//! The hardware side as seen through the transactor: NoC, endpoint PEs,
//! clock halter, injector and ejector.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::arbiter::RoundRobinArbiter;
use super::frame::{Arrival, Descriptor, EjectionFrame, InjectionFrame};
use super::halter::ClockHalter;
use super::injector::Injector;
use super::TransactorError;
use crate::noc::{Injection, InjectionPe, Network, NocConfig};

/// Counters from the instrumentation around the clock halter. Every field
/// other than `quanta` and `drain_bursts` counts a violation and must stay
/// zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafetyReport {
    pub quanta: u64,
    pub drain_bursts: u64,
    /// Counter observed above the stored injection cycle.
    pub quantum_overruns: u64,
    /// Packet completion cycle differing from the frame's halt cycle.
    pub halt_mismatches: u64,
    /// Emulated clock advanced while a drain burst held `halt`.
    pub drain_clock_changes: u64,
}

impl SafetyReport {
    pub fn violations(&self) -> u64 {
        self.quantum_overruns + self.halt_mismatches + self.drain_clock_changes
    }

    pub fn merge(&mut self, other: &SafetyReport) {
        self.quanta += other.quanta;
        self.drain_bursts += other.drain_bursts;
        self.quantum_overruns += other.quantum_overruns;
        self.halt_mismatches += other.halt_mismatches;
        self.drain_clock_changes += other.drain_clock_changes;
    }
}

/// End-of-run instrumentation read back from the hardware side. Not part
/// of the frame protocol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HardwareStats {
    pub safety: SafetyReport,
    /// Cycle each packet's head entered its ejection NI.
    pub head_cycles: BTreeMap<u32, u64>,
    pub cycle: u64,
    pub flits_injected: u64,
    pub flits_ejected: u64,
    pub resident_flits: u64,
}

pub struct HardwareSide {
    net: Network,
    pes: Vec<InjectionPe>,
    halter: ClockHalter,
    injector: Injector,
    arbiter: RoundRobinArbiter,
    safety: SafetyReport,
    head_cycles: BTreeMap<u32, u64>,
    ready: Vec<bool>,
    injections: Vec<Injection>,
}

impl HardwareSide {
    pub fn new(config: NocConfig) -> Result<Self, TransactorError> {
        let net = Network::new(config)?;
        let cfg = net.config();
        let nodes = cfg.nodes();
        Ok(Self {
            pes: vec![InjectionPe::new(); nodes],
            halter: ClockHalter::new(),
            injector: Injector::new(nodes, cfg.packet_len),
            arbiter: RoundRobinArbiter::new(nodes * cfg.num_vcs),
            safety: SafetyReport::default(),
            head_cycles: BTreeMap::new(),
            ready: vec![false; cfg.num_vcs],
            injections: Vec::with_capacity(nodes),
            net,
        })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn halter(&self) -> &ClockHalter {
        &self.halter
    }

    pub fn arbiter_mut(&mut self) -> &mut RoundRobinArbiter {
        &mut self.arbiter
    }

    pub fn safety(&self) -> SafetyReport {
        self.safety
    }

    pub fn stats(&self) -> HardwareStats {
        HardwareStats {
            safety: self.safety,
            head_cycles: self.head_cycles.clone(),
            cycle: self.halter.counter(),
            flits_injected: self.net.flits_injected(),
            flits_ejected: self.net.flits_ejected(),
            resident_flits: self.net.resident_flits(),
        }
    }

    /// Handle one injection frame: latch its quantum and run up to it.
    pub fn process(&mut self, frame: &InjectionFrame) -> Result<Vec<EjectionFrame>, TransactorError> {
        self.accept(frame)?;
        self.run_quantum()
    }

    /// Register the frame's descriptors and store its cycle in the halter.
    pub fn accept(&mut self, frame: &InjectionFrame) -> Result<(), TransactorError> {
        self.injector.validate(frame)?;
        self.halter.store(frame.injection_cycle)?;
        self.injector.accept(frame)
    }

    /// Execute cycles until the halter stops at the stored quantum.
    pub fn run_quantum(&mut self) -> Result<Vec<EjectionFrame>, TransactorError> {
        let mut frames = vec![];
        self.release_due();
        loop {
            if self.quiescent() {
                self.halter.fast_forward();
                self.net.fast_forward(self.halter.counter())?;
                self.release_due();
            }
            if !self.halter.tick() {
                break;
            }
            if self.halter.counter() > self.halter.injection_cycle() {
                self.safety.quantum_overruns += 1;
            }
            self.inject_and_step()?;
            if let Some(frame) = self.ejector_poll()? {
                frames.push(frame);
            }
            self.release_due();
        }
        self.safety.quanta += 1;
        Ok(frames)
    }

    /// Nothing can happen before the quantum bound: no flits, no queued
    /// packets, nothing due before the bound.
    fn quiescent(&self) -> bool {
        self.net.is_idle()
            && self.pes.iter().all(InjectionPe::is_empty)
            && self.injector.next_due().is_none_or(|c| c >= self.halter.injection_cycle())
    }

    fn release_due(&mut self) {
        for header in self.injector.take_due(self.halter.counter()) {
            self.pes[header.src].enqueue(header);
        }
    }

    fn inject_and_step(&mut self) -> Result<(), TransactorError> {
        self.injections.clear();
        for (node, pe) in self.pes.iter_mut().enumerate() {
            if pe.is_empty() {
                continue;
            }
            for (v, r) in self.ready.iter_mut().enumerate() {
                *r = self.net.has_credit(node, v);
            }
            if let Some((vc, flit)) = pe.next_injection(&self.ready) {
                self.injections.push(Injection { node, vc, flit });
            }
        }
        self.net.step(&self.injections)?;
        debug_assert_eq!(self.net.cycle(), self.halter.counter());
        Ok(())
    }

    /// Drain every complete packet, halting the emulated clock for the
    /// whole burst.
    pub fn ejector_poll(&mut self) -> Result<Option<EjectionFrame>, TransactorError> {
        if self.net.complete_count() == 0 {
            return Ok(None);
        }
        let halt_cycle = self.halter.counter();
        self.halter.set_halt(true);
        let nv = self.net.config().num_vcs;
        let net = &self.net;
        let order = self.arbiter.grant_order(|s| net.packet_complete(s / nv, s % nv));
        let mut arrivals = Vec::with_capacity(order.len());
        for &slot in &order {
            // Each FIFO read takes a global clock edge; the emulated clock
            // must stay gated through all of them.
            if self.halter.tick() {
                self.safety.drain_clock_changes += 1;
            }
            let packet = self.net.drain_ejection(slot / nv, slot % nv)?;
            if packet.arrival_cycle != halt_cycle {
                self.safety.halt_mismatches += 1;
            }
            self.head_cycles.insert(packet.header.packet_id, packet.head_cycle);
            let d = Descriptor::from_header(&packet.header);
            arrivals.push(Arrival {
                packet_id: d.packet_id,
                src: d.src,
                dst: d.dst,
                len: d.len,
                arrival_cycle: packet.arrival_cycle,
            });
        }
        if let Some(&last) = order.last() {
            self.arbiter.complete_burst(last);
        }
        self.halter.set_halt(false);
        if self.halter.counter() != halt_cycle {
            self.safety.drain_clock_changes += 1;
        }
        self.safety.drain_bursts += 1;
        Ok(Some(EjectionFrame { halt_cycle, arrivals }))
    }
}
