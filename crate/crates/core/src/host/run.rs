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

use std::time::Instant;

use log::debug;
use serde::Serialize;

use super::buffer::{send_quantum, Decision, StopReason, VirtualBuffer};
use super::event::TrafficEvent;
use super::HostError;
use crate::noc::{NocConfig, NodeId};
use crate::transactor::{InProcessLink, Link, SafetyReport};

/// Run-to-drain default for the maximum cycle.
pub const DEFAULT_MAX_CYCLE: u64 = (1 << 63) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_cycle: u64,
    /// Measure wall-clock time. When off, the report carries zero seconds
    /// and no emulation frequency so that it is reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_cycle: DEFAULT_MAX_CYCLE,
            record_timing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PacketRecord {
    pub id: u32,
    pub src: NodeId,
    pub dst: NodeId,
    pub len: u16,
    pub icyc: u64,
    pub injected: Option<u64>,
    pub arrived: Option<u64>,
    /// Cycle the head flit reached the destination NI.
    pub head_arrived: Option<u64>,
}

impl PacketRecord {
    pub fn latency(&self) -> Option<u64> {
        Some(self.arrived? - self.injected?)
    }

    pub fn head_latency(&self) -> Option<u64> {
        Some(self.head_arrived? - self.injected?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: NocConfig,
    pub packets: usize,
    pub received: usize,
    /// Emulated cycles executed.
    pub cycles: u64,
    pub wall_seconds: f64,
    pub emu_hz: Option<f64>,
    pub stop_reason: StopReason,
    pub quanta: u64,
    pub flits_injected: u64,
    pub flits_ejected: u64,
    pub safety: SafetyReport,
    pub per_packet: Vec<PacketRecord>,
}

/// Run `events` on a fresh in-process hardware side.
pub fn run(events: Vec<TrafficEvent>, config: &NocConfig, opts: RunOptions) -> Result<RunReport, HostError> {
    let mut link = InProcessLink::new(config.clone())?;
    run_with_link(events, config, opts, &mut link)
}

/// The host loop: pick the earliest eligible packets, send them with their
/// quantum, match what comes back, repeat until done.
pub fn run_with_link<L: Link>(
    events: Vec<TrafficEvent>,
    config: &NocConfig,
    opts: RunOptions,
    link: &mut L,
) -> Result<RunReport, HostError> {
    let start = Instant::now();
    let mut buffer = VirtualBuffer::new(events, config)?;
    let mut now = 0;
    let mut quanta = 0;
    let stop_reason = loop {
        let sel = match buffer.advance(now, opts.max_cycle)? {
            Decision::Stop(reason) => break reason,
            Decision::Continue(sel) => sel,
        };
        send_quantum(&mut buffer, &sel, link)?;
        for frame in link.receive()? {
            buffer.match_received(&frame)?;
        }
        now = sel.cycle;
        quanta += 1;
    };
    let stats = link.stats()?;
    debug!(
        "run stopped ({stop_reason:?}) at cycle {now} after {quanta} quanta, {}/{} received",
        buffer.received(),
        buffer.len()
    );

    let per_packet = buffer
        .entries()
        .iter()
        .map(|e| PacketRecord {
            id: e.event.packet_id,
            src: e.event.src,
            dst: e.event.dst,
            len: e.event.len,
            icyc: e.event.icyc,
            injected: e.actual_injection_cycle,
            arrived: e.arrival_cycle,
            head_arrived: e.arrival_cycle.and(stats.head_cycles.get(&e.event.packet_id).copied()),
        })
        .collect();
    let (wall_seconds, emu_hz) = if opts.record_timing {
        let secs = start.elapsed().as_secs_f64();
        (secs, (secs > 0.0).then(|| now as f64 / secs))
    } else {
        (0.0, None)
    };
    Ok(RunReport {
        config: config.clone(),
        packets: buffer.len(),
        received: buffer.received(),
        cycles: now,
        wall_seconds,
        emu_hz,
        stop_reason,
        quanta,
        flits_injected: stats.flits_injected,
        flits_ejected: stats.flits_ejected,
        safety: stats.safety,
        per_packet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transactor::ThreadedLink;

    #[test]
    fn empty_run() {
        let r = run(vec![], &NocConfig::mesh(3, 3), RunOptions::default()).unwrap();
        assert_eq!((r.packets, r.cycles, r.quanta), (0, 0, 0));
        assert_eq!(r.stop_reason, StopReason::Completed);
    }

    #[test]
    fn single_packet_zero_load() {
        let cfg = NocConfig::mesh(2, 2);
        let r = run(vec![TrafficEvent::new(0, 10, 0, 3, 5)], &cfg, RunOptions::default()).unwrap();
        let p = &r.per_packet[0];
        assert_eq!(p.injected, Some(10));
        assert_eq!(p.arrived, Some(10 + cfg.zero_load_latency(0, 3, 5)));
        // head is len-1 cycles ahead of the tail at zero load
        assert_eq!(p.head_arrived, Some(p.arrived.unwrap() - 4));
        assert_eq!(r.cycles, p.arrived.unwrap());
        assert_eq!(r.safety.violations(), 0);
    }

    #[test]
    fn chain_is_strictly_ordered() {
        let cfg = NocConfig::mesh(3, 3);
        let events = vec![
            TrafficEvent::new(0, 1, 0, 8, 5),
            TrafficEvent::new(1, 1, 8, 2, 5).with_deps([0]),
            TrafficEvent::new(2, 1, 2, 6, 5).with_deps([1]),
        ];
        let r = run(events, &cfg, RunOptions::default()).unwrap();
        let p = &r.per_packet;
        assert_eq!(p[1].injected.unwrap(), p[0].arrived.unwrap() + 1);
        assert_eq!(p[2].injected.unwrap(), p[1].arrived.unwrap() + 1);
    }

    #[test]
    fn max_cycle_truncates() {
        let cfg = NocConfig::mesh(3, 3);
        let events = vec![TrafficEvent::new(0, 5, 0, 8, 5), TrafficEvent::new(1, 2000, 0, 8, 5)];
        let r = run(events, &cfg, RunOptions { max_cycle: 1000, record_timing: false }).unwrap();
        assert_eq!(r.stop_reason, StopReason::MaxCycle);
        assert_eq!(r.received, 1);
        assert_eq!(Some(r.cycles), r.per_packet[0].arrived);
        assert_eq!(r.per_packet[1].injected, None);
        assert_eq!(r.emu_hz, None);
    }

    #[test]
    fn cyclic_dependencies_deadlock() {
        let cfg = NocConfig::mesh(2, 2);
        let events = vec![
            TrafficEvent::new(0, 1, 0, 1, 1),
            TrafficEvent::new(1, 1, 0, 1, 1).with_deps([2]),
            TrafficEvent::new(2, 1, 0, 1, 1).with_deps([1]),
        ];
        match run(events, &cfg, RunOptions::default()) {
            Err(HostError::DependencyDeadlock(ids)) => assert_eq!(ids, [1, 2]),
            other => panic!("expected deadlock, got {other:?}"),
        }
    }

    #[test]
    fn threaded_link_gives_same_report() {
        let cfg = NocConfig::mesh(3, 3);
        let events: Vec<_> = (0..30)
            .map(|i| TrafficEvent::new(i, 1 + (i as u64 * 7) % 40, (i % 9) as usize, ((i * 4 + 1) % 9) as usize, 5))
            .map(|e| if e.packet_id > 3 { let d = e.packet_id - 3; e.with_deps([d]) } else { e })
            .collect();
        let opts = RunOptions { record_timing: false, ..Default::default() };
        let a = run(events.clone(), &cfg, opts).unwrap();
        let mut link = ThreadedLink::spawn(cfg.clone()).unwrap();
        let b = run_with_link(events, &cfg, opts, &mut link).unwrap();
        assert_eq!(a.per_packet, b.per_packet);
        assert_eq!(a.cycles, b.cycles);
    }
}
