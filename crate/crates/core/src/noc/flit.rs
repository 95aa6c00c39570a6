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

use super::config::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlitKind {
    Head,
    Body,
    Tail,
}

/// What the software side knows about a packet. Travels in the head flit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PacketHeader {
    pub packet_id: u32,
    pub src: NodeId,
    pub dst: NodeId,
    pub len: u16,
}

/// Flow-control unit. Body and tail flits carry no payload; they repeat the
/// routing fields of their head only so the model can check ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Flit {
    pub packet_id: u32,
    pub kind: FlitKind,
    pub src: NodeId,
    pub dst: NodeId,
    /// Packet length in flits. Only meaningful on the head.
    pub len: u16,
}

impl Flit {
    pub fn head(header: &PacketHeader) -> Self {
        Self {
            packet_id: header.packet_id,
            kind: FlitKind::Head,
            src: header.src,
            dst: header.dst,
            len: header.len,
        }
    }

    /// The `seq`-th flit (0-based) of the packet described by `header`.
    pub fn nth(header: &PacketHeader, seq: u16) -> Self {
        let kind = if seq == 0 {
            FlitKind::Head
        } else if seq + 1 == header.len {
            FlitKind::Tail
        } else {
            FlitKind::Body
        };
        Self {
            kind,
            len: if seq == 0 { header.len } else { 0 },
            ..Self::head(header)
        }
    }

    pub fn is_head(&self) -> bool {
        self.kind == FlitKind::Head
    }

    /// True for the last flit of a packet. A one-flit packet is a head that
    /// closes itself.
    pub fn is_tail(&self) -> bool {
        match self.kind {
            FlitKind::Tail => true,
            FlitKind::Head => self.len == 1,
            FlitKind::Body => false,
        }
    }

    pub fn header(&self) -> PacketHeader {
        PacketHeader {
            packet_id: self.packet_id,
            src: self.src,
            dst: self.dst,
            len: self.len,
        }
    }
}
