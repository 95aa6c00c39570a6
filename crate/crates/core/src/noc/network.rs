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

//! The router grid and its cycle semantics.
//!
//! Every call to [`Network::step`] executes one emulated cycle in two
//! phases. Phase one reads only pre-cycle flit and credit state and decides
//! route computation, VC allocation and switch allocation for every router.
//! Phase two commits the chosen flit moves and returns credits. A flit that
//! lands in a buffer during cycle `t` may leave it at the earliest during
//! cycle `t + router_delay`.

use std::collections::VecDeque;

use super::config::{neighbor, NocConfig, NodeId, Port, NUM_PORTS};
use super::endpoint::{EjectedPacket, EjectionNi};
use super::flit::{Flit, PacketHeader};
use super::routing::route_xy;
use super::NocError;

/// One flit offered by a PE to its router's local input port.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Injection {
    pub node: NodeId,
    pub vc: usize,
    pub flit: Flit,
}

/// A packet whose final flit entered an ejection NI during the step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Completion {
    pub node: NodeId,
    pub vc: usize,
    pub header: PacketHeader,
    pub arrival_cycle: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepEvents {
    pub completions: Vec<Completion>,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    flit: Flit,
    ready_at: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VcState {
    Idle,
    Routed(Port),
    Active { out: Port, out_vc: usize },
}

#[derive(Clone, Debug)]
struct InputVc {
    buf: VecDeque<Slot>,
    state: VcState,
}

#[derive(Clone, Debug)]
struct OutputPort {
    /// Free slots in each downstream VC buffer.
    credits: Vec<usize>,
    /// Downstream VC currently held by a packet.
    owned: Vec<bool>,
    /// Next downstream VC to try when allocating.
    vc_ptr: usize,
    /// Next input slot (port * vcs + vc) to consider for VC allocation.
    va_ptr: usize,
    /// Next input port to consider for the crossbar.
    sw_ptr: usize,
}

#[derive(Clone, Debug)]
struct Router {
    /// Indexed by `port * num_vcs + vc`.
    inputs: Vec<InputVc>,
    outputs: Vec<OutputPort>,
    /// Per input port: next VC to offer to the switch allocator.
    in_ptr: [usize; NUM_PORTS],
    occupancy: usize,
}

#[derive(Clone, Copy, Debug)]
struct Move {
    node: NodeId,
    slot: usize,
    out: Port,
    out_vc: usize,
}

/// Mesh of input-buffered wormhole routers with per-node ejection NIs.
#[derive(Clone, Debug)]
pub struct Network {
    config: NocConfig,
    routers: Vec<Router>,
    neighbors: Vec<[Option<NodeId>; NUM_PORTS]>,
    /// Credits the injection NI holds for the local input port, per VC.
    injection_credits: Vec<Vec<usize>>,
    ejection: Vec<EjectionNi>,
    cycle: u64,
    flits_injected: u64,
    flits_ejected: u64,
    complete: usize,
    moves: Vec<Move>,
}

impl Network {
    pub fn new(config: NocConfig) -> Result<Self, NocError> {
        config.validate()?;
        let nv = config.num_vcs;
        let nodes = config.nodes();
        let router = Router {
            inputs: vec![
                InputVc {
                    buf: VecDeque::with_capacity(config.buffer_depth),
                    state: VcState::Idle,
                };
                NUM_PORTS * nv
            ],
            outputs: Port::ALL
                .iter()
                .map(|&p| OutputPort {
                    credits: vec![
                        if p == Port::Local { config.packet_len } else { config.buffer_depth };
                        nv
                    ],
                    owned: vec![false; nv],
                    vc_ptr: 0,
                    va_ptr: 0,
                    sw_ptr: 0,
                })
                .collect(),
            in_ptr: [0; NUM_PORTS],
            occupancy: 0,
        };
        let neighbors = (0..nodes)
            .map(|n| Port::ALL.map(|p| neighbor(&config, n, p)))
            .collect();
        Ok(Self {
            routers: vec![router; nodes],
            neighbors,
            injection_credits: vec![vec![config.buffer_depth; nv]; nodes],
            ejection: vec![EjectionNi::new(nv, config.packet_len); nodes],
            cycle: 0,
            flits_injected: 0,
            flits_ejected: 0,
            complete: 0,
            moves: Vec::new(),
            config,
        })
    }

    pub fn config(&self) -> &NocConfig {
        &self.config
    }

    /// Emulated cycles executed so far.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn flits_injected(&self) -> u64 {
        self.flits_injected
    }

    pub fn flits_ejected(&self) -> u64 {
        self.flits_ejected
    }

    /// No flit anywhere in routers or ejection NIs.
    pub fn is_idle(&self) -> bool {
        self.flits_injected == self.flits_ejected
    }

    /// Complete packets waiting in ejection NIs.
    pub fn complete_count(&self) -> usize {
        self.complete
    }

    pub fn has_credit(&self, node: NodeId, vc: usize) -> bool {
        self.injection_credits[node][vc] > 0
    }

    /// Per-VC mask: true where the local input VC of `node` has a credit.
    pub fn inject_ready(&self, node: NodeId) -> Vec<bool> {
        self.injection_credits[node].iter().map(|&c| c > 0).collect()
    }

    pub fn packet_complete(&self, node: NodeId, vc: usize) -> bool {
        self.ejection[node].packet_complete(vc)
    }

    /// Remove a completed packet from an ejection NI and return the credits
    /// its flits occupied to the router's local output.
    pub fn drain_ejection(&mut self, node: NodeId, vc: usize) -> Result<EjectedPacket, NocError> {
        if node >= self.config.nodes() || vc >= self.config.num_vcs {
            return Err(NocError::DrainWhenEmpty { node, vc });
        }
        let packet = self.ejection[node].drain(node, vc)?;
        let len = packet.header.len as usize;
        self.routers[node].outputs[Port::Local.index()].credits[vc] += len;
        self.flits_ejected += len as u64;
        self.complete -= 1;
        Ok(packet)
    }

    /// Jump the cycle counter forward. Only legal while the network is idle,
    /// where stepping would change nothing else.
    pub fn fast_forward(&mut self, to: u64) -> Result<(), NocError> {
        if !self.is_idle() {
            return Err(NocError::NotIdle);
        }
        self.cycle = self.cycle.max(to);
        Ok(())
    }

    /// Advance exactly one emulated cycle.
    pub fn step(&mut self, injections: &[Injection]) -> Result<StepEvents, NocError> {
        let now = self.cycle + 1;
        self.check_injections(injections)?;

        // Phase 1: decisions from pre-cycle state.
        let mut moves = std::mem::take(&mut self.moves);
        moves.clear();
        for node in 0..self.routers.len() {
            if self.routers[node].occupancy > 0 {
                self.allocate(node, now, &mut moves)?;
            }
        }

        // Phase 2: commit.
        let mut events = StepEvents::default();
        let nv = self.config.num_vcs;
        let delay = self.config.router_delay;
        for m in &moves {
            let router = &mut self.routers[m.node];
            let input = &mut router.inputs[m.slot];
            let slot = input.buf.pop_front().expect("allocated an empty VC");
            router.occupancy -= 1;
            let out = &mut router.outputs[m.out.index()];
            out.credits[m.out_vc] -= 1;
            if slot.flit.is_tail() {
                input.state = VcState::Idle;
                out.owned[m.out_vc] = false;
            }

            let in_port = Port::from_index(m.slot / nv);
            let in_vc = m.slot % nv;
            match in_port {
                Port::Local => self.injection_credits[m.node][in_vc] += 1,
                p => {
                    let up = self.neighbors[m.node][p.index()].expect("flit came from outside the mesh");
                    self.routers[up].outputs[p.opposite().index()].credits[in_vc] += 1;
                }
            }

            match m.out {
                Port::Local => {
                    if self.ejection[m.node].accept(m.node, m.out_vc, slot.flit, now)? {
                        self.complete += 1;
                        events.completions.push(Completion {
                            node: m.node,
                            vc: m.out_vc,
                            header: self.ejection[m.node].vcs[m.out_vc]
                                .header
                                .expect("completed without header"),
                            arrival_cycle: now,
                        });
                    }
                }
                p => {
                    let down = self.neighbors[m.node][p.index()].expect("routed off the mesh");
                    let router = &mut self.routers[down];
                    router.inputs[p.opposite().index() * nv + m.out_vc].buf.push_back(Slot {
                        flit: slot.flit,
                        ready_at: now + delay,
                    });
                    router.occupancy += 1;
                }
            }
        }
        self.moves = moves;

        for inj in injections {
            let router = &mut self.routers[inj.node];
            router.inputs[Port::Local.index() * nv + inj.vc].buf.push_back(Slot {
                flit: inj.flit,
                ready_at: now + delay,
            });
            router.occupancy += 1;
            self.injection_credits[inj.node][inj.vc] -= 1;
            self.flits_injected += 1;
        }

        self.cycle = now;
        Ok(events)
    }

    fn check_injections(&self, injections: &[Injection]) -> Result<(), NocError> {
        let nodes = self.config.nodes();
        for (i, inj) in injections.iter().enumerate() {
            if inj.node >= nodes || inj.vc >= self.config.num_vcs {
                return Err(NocError::InvalidInjection(format!(
                    "node {} vc {} outside the mesh",
                    inj.node, inj.vc
                )));
            }
            if injections[..i].iter().any(|o| o.node == inj.node) {
                return Err(NocError::InvalidInjection(format!(
                    "node {} offered more than one flit in one cycle",
                    inj.node
                )));
            }
            if self.injection_credits[inj.node][inj.vc] == 0 {
                return Err(NocError::InjectionWithoutCredit {
                    node: inj.node,
                    vc: inj.vc,
                });
            }
        }
        Ok(())
    }

    /// Route computation, VC allocation and switch allocation for one
    /// router. Allocation state changes here; flits and credits do not.
    fn allocate(&mut self, node: NodeId, now: u64, moves: &mut Vec<Move>) -> Result<(), NocError> {
        let nv = self.config.num_vcs;
        let slots = NUM_PORTS * nv;
        let eject_depth = self.config.packet_len;
        let config = &self.config;
        let router = &mut self.routers[node];

        let mut wants = [false; NUM_PORTS];
        for input in router.inputs.iter_mut() {
            let Some(front) = input.buf.front() else { continue };
            if input.state == VcState::Idle {
                if !front.flit.is_head() {
                    return Err(NocError::WormholeViolation {
                        node,
                        vc: 0,
                        packet_id: front.flit.packet_id,
                        reason: "non-head flit at the front of an idle VC".into(),
                    });
                }
                input.state = VcState::Routed(route_xy(node, front.flit.dst, config));
            }
            if let VcState::Routed(out) = input.state {
                if front.ready_at <= now {
                    wants[out.index()] = true;
                }
            }
        }

        // VC allocation: per output port, requesters in round-robin order,
        // each granted the next free downstream VC round-robin.
        for out_port in Port::ALL {
            if !wants[out_port.index()] {
                continue;
            }
            let out = &mut router.outputs[out_port.index()];
            let start = out.va_ptr;
            for k in 0..slots {
                let s = (start + k) % slots;
                let input = &mut router.inputs[s];
                if input.state != VcState::Routed(out_port) {
                    continue;
                }
                if !input.buf.front().is_some_and(|f| f.ready_at <= now) {
                    continue;
                }
                let free = (0..nv).map(|j| (out.vc_ptr + j) % nv).find(|&v| {
                    !out.owned[v] && (out_port != Port::Local || out.credits[v] == eject_depth)
                });
                let Some(v) = free else { break };
                out.owned[v] = true;
                out.vc_ptr = (v + 1) % nv;
                out.va_ptr = (s + 1) % slots;
                input.state = VcState::Active { out: out_port, out_vc: v };
            }
        }

        // Switch allocation, separable: each input port nominates one ready
        // VC, then each output port grants one nominating input port.
        let mut requests: [Option<(usize, Port, usize)>; NUM_PORTS] = [None; NUM_PORTS];
        for (p, request) in requests.iter_mut().enumerate() {
            for k in 0..nv {
                let v = (router.in_ptr[p] + k) % nv;
                let input = &router.inputs[p * nv + v];
                let VcState::Active { out, out_vc } = input.state else { continue };
                if !input.buf.front().is_some_and(|f| f.ready_at <= now) {
                    continue;
                }
                if router.outputs[out.index()].credits[out_vc] == 0 {
                    continue;
                }
                *request = Some((v, out, out_vc));
                break;
            }
        }
        for out_port in Port::ALL {
            let o = out_port.index();
            let start = router.outputs[o].sw_ptr;
            for k in 0..NUM_PORTS {
                let p = (start + k) % NUM_PORTS;
                let Some((v, out, out_vc)) = requests[p] else { continue };
                if out != out_port {
                    continue;
                }
                router.outputs[o].sw_ptr = (p + 1) % NUM_PORTS;
                router.in_ptr[p] = (v + 1) % nv;
                moves.push(Move {
                    node,
                    slot: p * nv + v,
                    out,
                    out_vc,
                });
                break;
            }
        }
        Ok(())
    }

    /// Flits currently held in router buffers and ejection NIs, counted by
    /// walking every buffer.
    pub fn resident_flits(&self) -> u64 {
        let in_routers: usize = self
            .routers
            .iter()
            .flat_map(|r| r.inputs.iter())
            .map(|i| i.buf.len())
            .sum();
        let in_nis: usize = self
            .ejection
            .iter()
            .flat_map(|ni| (0..self.config.num_vcs).map(move |v| ni.occupancy(v)))
            .sum();
        (in_routers + in_nis) as u64
    }

    /// Walk all buffers and check buffer bounds, credit conservation on
    /// every (link, VC) and flit conservation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let cfg = &self.config;
        let nv = cfg.num_vcs;
        let depth = cfg.buffer_depth;
        for (n, router) in self.routers.iter().enumerate() {
            for port in Port::ALL {
                for v in 0..nv {
                    let occ = router.inputs[port.index() * nv + v].buf.len();
                    if occ > depth {
                        return Err(format!("node {n} {port:?} vc {v}: {occ} flits exceed depth {depth}"));
                    }
                    let upstream = match port {
                        Port::Local => Some(self.injection_credits[n][v]),
                        p => self.neighbors[n][p.index()]
                            .map(|up| self.routers[up].outputs[p.opposite().index()].credits[v]),
                    };
                    if let Some(credits) = upstream {
                        if credits + occ != depth {
                            return Err(format!(
                                "node {n} {port:?} vc {v}: credits {credits} + occupancy {occ} != {depth}"
                            ));
                        }
                    } else if occ != 0 {
                        return Err(format!("node {n} {port:?} vc {v}: flits on an edge port"));
                    }
                }
            }
            for v in 0..nv {
                let credits = router.outputs[Port::Local.index()].credits[v];
                let occ = self.ejection[n].occupancy(v);
                if credits + occ != cfg.packet_len {
                    return Err(format!(
                        "node {n} ejection vc {v}: credits {credits} + occupancy {occ} != {}",
                        cfg.packet_len
                    ));
                }
            }
            let occ: usize = router.inputs.iter().map(|i| i.buf.len()).sum();
            if occ != router.occupancy {
                return Err(format!("node {n}: occupancy counter {} != {occ}", router.occupancy));
            }
        }
        let resident = self.resident_flits();
        if self.flits_injected - self.flits_ejected != resident {
            return Err(format!(
                "injected {} - ejected {} != resident {resident}",
                self.flits_injected, self.flits_ejected
            ));
        }
        Ok(())
    }
}
