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

//! Per-node traffic endpoints: the injection PE with its NI, and the
//! ejection NI that reassembles packets for the ejector.

use std::collections::VecDeque;

use super::flit::{Flit, FlitKind, PacketHeader};
use super::NocError;

#[derive(Clone, Debug)]
struct Outgoing {
    header: PacketHeader,
    vc: usize,
    next_seq: u16,
}

/// Source PE plus its NI. Holds whole packets in a FIFO and emits at most
/// one flit per cycle; every packet goes out on a single VC picked
/// round-robin among those with credit when its head leaves.
#[derive(Clone, Debug, Default)]
pub struct InjectionPe {
    queue: VecDeque<PacketHeader>,
    current: Option<Outgoing>,
    vc_ptr: usize,
}

impl InjectionPe {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enqueue(&mut self, header: PacketHeader) {
        self.queue.push_back(header);
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty() && self.current.is_none()
    }

    /// Packets not yet fully injected, including the one in progress.
    pub fn backlog(&self) -> usize {
        self.queue.len() + usize::from(self.current.is_some())
    }

    /// Pick the flit to inject this cycle given the per-VC credit mask of
    /// the local router port. The returned flit is considered sent.
    pub fn next_injection(&mut self, ready: &[bool]) -> Option<(usize, Flit)> {
        if self.current.is_none() {
            let header = *self.queue.front()?;
            let n = ready.len();
            let vc = (0..n).map(|k| (self.vc_ptr + k) % n).find(|&v| ready[v])?;
            self.queue.pop_front();
            self.vc_ptr = (vc + 1) % n;
            self.current = Some(Outgoing { header, vc, next_seq: 0 });
        }
        let out = self.current.as_mut()?;
        if !ready[out.vc] {
            return None;
        }
        let flit = Flit::nth(&out.header, out.next_seq);
        let vc = out.vc;
        out.next_seq += 1;
        if out.next_seq == out.header.len {
            self.current = None;
        }
        Some((vc, flit))
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct EjectionVc {
    pub header: Option<PacketHeader>,
    pub received: usize,
    pub head_at: u64,
    pub complete_at: Option<u64>,
}

/// Ejection NI: one FIFO per VC, each deep enough for a whole packet. A
/// comparator flags the VC complete once the flit count reaches the head's
/// length field.
#[derive(Clone, Debug)]
pub struct EjectionNi {
    pub(crate) vcs: Vec<EjectionVc>,
    depth: usize,
}

/// A packet removed from an ejection NI. Only the head is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EjectedPacket {
    pub header: PacketHeader,
    /// Cycle the last flit entered the NI.
    pub arrival_cycle: u64,
    /// Cycle the head flit entered the NI.
    pub head_cycle: u64,
}

impl EjectionNi {
    pub fn new(num_vcs: usize, depth: usize) -> Self {
        Self {
            vcs: vec![EjectionVc::default(); num_vcs],
            depth,
        }
    }

    pub fn occupancy(&self, vc: usize) -> usize {
        self.vcs[vc].received
    }

    pub fn packet_complete(&self, vc: usize) -> bool {
        self.vcs[vc].complete_at.is_some()
    }

    /// Accept a flit from the router's local output. Returns true when this
    /// flit completed its packet.
    pub(crate) fn accept(&mut self, node: usize, vc: usize, flit: Flit, cycle: u64) -> Result<bool, NocError> {
        let depth = self.depth;
        let slot = &mut self.vcs[vc];
        let violation = |why: &str| NocError::WormholeViolation {
            node,
            vc,
            packet_id: flit.packet_id,
            reason: why.to_string(),
        };
        if slot.received >= depth {
            return Err(violation("ejection FIFO overflow"));
        }
        match slot.header {
            None => {
                if flit.kind != FlitKind::Head {
                    return Err(violation("packet does not start with a head flit"));
                }
                slot.header = Some(flit.header());
                slot.head_at = cycle;
            }
            Some(h) => {
                if slot.complete_at.is_some() {
                    return Err(violation("flit arrived behind a completed packet"));
                }
                if h.packet_id != flit.packet_id {
                    return Err(violation("foreign flit interleaved in packet"));
                }
                let expect_tail = slot.received + 1 == h.len as usize;
                let ok = match flit.kind {
                    FlitKind::Head => false,
                    FlitKind::Body => !expect_tail,
                    FlitKind::Tail => expect_tail,
                };
                if !ok {
                    return Err(violation("flit out of order"));
                }
            }
        }
        slot.received += 1;
        let len = slot.header.map(|h| h.len as usize).unwrap_or(0);
        if slot.received == len {
            slot.complete_at = Some(cycle);
            return Ok(true);
        }
        Ok(false)
    }

    pub(crate) fn drain(&mut self, node: usize, vc: usize) -> Result<EjectedPacket, NocError> {
        let slot = &mut self.vcs[vc];
        let (Some(header), Some(arrival_cycle)) = (slot.header, slot.complete_at) else {
            return Err(NocError::DrainWhenEmpty { node, vc });
        };
        let packet = EjectedPacket {
            header,
            arrival_cycle,
            head_cycle: slot.head_at,
        };
        *slot = EjectionVc::default();
        Ok(packet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(id: u32, len: u16) -> PacketHeader {
        PacketHeader { packet_id: id, src: 0, dst: 1, len }
    }

    #[test]
    fn pe_sends_one_packet_on_one_vc() {
        let mut pe = InjectionPe::new();
        pe.enqueue(header(1, 3));
        let mut sent = vec![];
        while let Some((vc, f)) = pe.next_injection(&[true, true]) {
            sent.push((vc, f.kind));
        }
        assert_eq!(
            sent,
            [(0, FlitKind::Head), (0, FlitKind::Body), (0, FlitKind::Tail)]
        );
        assert!(pe.is_empty());
    }

    #[test]
    fn pe_round_robins_vcs_and_waits_for_credit() {
        let mut pe = InjectionPe::new();
        pe.enqueue(header(1, 1));
        pe.enqueue(header(2, 2));
        assert_eq!(pe.next_injection(&[true, true]).unwrap().0, 0);
        assert_eq!(pe.next_injection(&[true, true]).unwrap().0, 1);
        // second packet is bound to VC1 now
        assert!(pe.next_injection(&[true, false]).is_none());
        assert_eq!(pe.next_injection(&[false, true]).unwrap().0, 1);
        assert!(pe.is_empty());
        // nothing ready: head waits
        pe.enqueue(header(3, 1));
        assert!(pe.next_injection(&[false, false]).is_none());
        assert_eq!(pe.backlog(), 1);
    }

    #[test]
    fn comparator_flags_completion() {
        let mut ni = EjectionNi::new(2, 5);
        let h = header(9, 5);
        for s in 0..4 {
            assert!(!ni.accept(0, 1, Flit::nth(&h, s), 10 + s as u64).unwrap());
            assert!(!ni.packet_complete(1));
        }
        assert!(ni.accept(0, 1, Flit::nth(&h, 4), 14).unwrap());
        assert!(ni.packet_complete(1));
        assert!(!ni.packet_complete(0));
        let p = ni.drain(0, 1).unwrap();
        assert_eq!(p.header, h);
        assert_eq!((p.head_cycle, p.arrival_cycle), (10, 14));
        assert!(!ni.packet_complete(1));
        assert_eq!(ni.occupancy(1), 0);
    }

    #[test]
    fn drain_when_empty_is_an_error() {
        let mut ni = EjectionNi::new(1, 5);
        assert!(matches!(ni.drain(3, 0), Err(NocError::DrainWhenEmpty { node: 3, vc: 0 })));
        // incomplete packet is not drainable either
        ni.accept(3, 0, Flit::nth(&header(1, 2), 0), 1).unwrap();
        assert!(ni.drain(3, 0).is_err());
    }

    #[test]
    fn foreign_flit_is_rejected() {
        let mut ni = EjectionNi::new(1, 5);
        ni.accept(0, 0, Flit::nth(&header(1, 3), 0), 1).unwrap();
        let err = ni.accept(0, 0, Flit::nth(&header(2, 3), 1), 2).unwrap_err();
        assert!(matches!(err, NocError::WormholeViolation { .. }));
        let mut ni = EjectionNi::new(1, 5);
        assert!(ni.accept(0, 0, Flit::nth(&header(1, 3), 1), 1).is_err());
    }
}
