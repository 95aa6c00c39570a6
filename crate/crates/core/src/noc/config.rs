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

use serde::{Deserialize, Serialize};

use super::NocError;

/// Index of a node in row-major order (`y * width + x`).
pub type NodeId = usize;

/// Position of a router in the mesh. Row 0 is the northmost row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Coord) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

/// Static parameters of the emulated mesh.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NocConfig {
    pub width: usize,
    pub height: usize,
    /// Virtual channels per physical link.
    pub num_vcs: usize,
    /// Flits per VC input buffer.
    pub buffer_depth: usize,
    /// Cycles from a flit landing in an input buffer to it landing in the
    /// next buffer downstream.
    pub router_delay: u64,
    /// Longest packet the ejection NIs can hold; also the default packet
    /// length used by the synthetic generators.
    pub packet_len: usize,
    pub seed: u64,
}

pub const DEFAULT_ROUTER_DELAY: u64 = 2;
pub const DEFAULT_PACKET_LEN: usize = 5;

/// Node indices travel as 16-bit fields in the frame format.
pub const MAX_NODES: usize = 1 << 16;

impl Default for NocConfig {
    fn default() -> Self {
        Self {
            width: 5,
            height: 5,
            num_vcs: 2,
            buffer_depth: 8,
            router_delay: DEFAULT_ROUTER_DELAY,
            packet_len: DEFAULT_PACKET_LEN,
            seed: 0,
        }
    }
}

impl NocConfig {
    pub fn mesh(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            ..Self::default()
        }
    }

    pub fn with_vcs(mut self, num_vcs: usize) -> Self {
        self.num_vcs = num_vcs;
        self
    }

    pub fn with_buffer_depth(mut self, depth: usize) -> Self {
        self.buffer_depth = depth;
        self
    }

    pub fn with_router_delay(mut self, delay: u64) -> Self {
        self.router_delay = delay;
        self
    }

    pub fn with_packet_len(mut self, len: usize) -> Self {
        self.packet_len = len;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), NocError> {
        let positive = [
            ("width", self.width as u64),
            ("height", self.height as u64),
            ("num_vcs", self.num_vcs as u64),
            ("buffer_depth", self.buffer_depth as u64),
            ("router_delay", self.router_delay),
            ("packet_len", self.packet_len as u64),
        ];
        for (field, value) in positive {
            if value == 0 {
                return Err(NocError::InvalidConfig(format!("{field} must be at least 1")));
            }
        }
        if self.width.saturating_mul(self.height) > MAX_NODES {
            return Err(NocError::InvalidConfig(format!(
                "{}x{} mesh exceeds {MAX_NODES} addressable nodes",
                self.width, self.height
            )));
        }
        if self.packet_len > u16::MAX as usize {
            return Err(NocError::InvalidConfig(format!(
                "packet_len {} does not fit the 16-bit length field",
                self.packet_len
            )));
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.width * self.height
    }

    pub fn coord(&self, node: NodeId) -> Coord {
        Coord::new(node % self.width, node / self.width)
    }

    pub fn node(&self, coord: Coord) -> NodeId {
        coord.y * self.width + coord.x
    }

    /// Router-to-router hops on the XY path.
    pub fn hops(&self, src: NodeId, dst: NodeId) -> usize {
        self.coord(src).manhattan(self.coord(dst))
    }

    /// Cycles from a packet entering its source PE FIFO to its last flit
    /// entering the destination ejection NI, in an otherwise empty network.
    ///
    /// The head enters the source router one cycle after the PE receives it,
    /// then spends `router_delay` in each of the `hops + 1` routers on its
    /// path (the last one forwards into the NI). The remaining `len - 1`
    /// flits follow one per cycle.
    pub fn zero_load_latency(&self, src: NodeId, dst: NodeId, len: usize) -> u64 {
        self.hops(src, dst) as u64 * self.router_delay
            + (len as u64).saturating_sub(1)
            + self.pipeline_constant()
    }

    /// Fixed part of the zero-load latency: PE-to-router injection plus the
    /// traversal of the destination router into its ejection NI.
    pub fn pipeline_constant(&self) -> u64 {
        1 + self.router_delay
    }
}

/// Router ports. `East` is +x, `South` is +y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Local = 0,
    East = 1,
    West = 2,
    North = 3,
    South = 4,
}

pub const NUM_PORTS: usize = 5;

impl Port {
    pub const ALL: [Port; NUM_PORTS] = [Port::Local, Port::East, Port::West, Port::North, Port::South];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Port {
        Self::ALL[index]
    }

    /// The input port on the neighbour that this output port feeds.
    pub fn opposite(self) -> Port {
        match self {
            Port::Local => Port::Local,
            Port::East => Port::West,
            Port::West => Port::East,
            Port::North => Port::South,
            Port::South => Port::North,
        }
    }
}

/// Neighbour reached through `port`, if it exists.
pub fn neighbor(config: &NocConfig, node: NodeId, port: Port) -> Option<NodeId> {
    let c = config.coord(node);
    let n = match port {
        Port::Local => return None,
        Port::East if c.x + 1 < config.width => Coord::new(c.x + 1, c.y),
        Port::West if c.x > 0 => Coord::new(c.x - 1, c.y),
        Port::North if c.y > 0 => Coord::new(c.x, c.y - 1),
        Port::South if c.y + 1 < config.height => Coord::new(c.x, c.y + 1),
        _ => return None,
    };
    Some(config.node(n))
}
