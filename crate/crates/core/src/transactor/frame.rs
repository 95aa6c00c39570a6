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

//! Wire messages between host and hardware side.
//!
//! All integers are little-endian.
//!
//! ```text
//! InjectionFrame: u64 injection_cycle, u32 count,
//!                 count x (u32 id, u16 src, u16 dst, u16 len, u16 pad = 0)
//! EjectionFrame:  u64 halt_cycle, u32 count,
//!                 count x (u32 id, u16 src, u16 dst, u16 len, u16 pad = 0, u64 arrival_cycle)
//! ```
//!
//! A frame log is a plain concatenation of frames of one kind.

use thiserror::Error;

use crate::noc::PacketHeader;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("frame truncated at byte {offset}: need {needed} more bytes")]
    Truncated { offset: usize, needed: usize },
    #[error("nonzero padding in record {record}")]
    BadPadding { record: usize },
    #[error("value {value} of {field} does not fit in 16 bits")]
    FieldOverflow { field: &'static str, value: usize },
}

/// One packet as the software side describes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Descriptor {
    pub packet_id: u32,
    pub src: u16,
    pub dst: u16,
    pub len: u16,
}

impl Descriptor {
    pub fn new(packet_id: u32, src: usize, dst: usize, len: usize) -> Result<Self, FrameError> {
        let narrow = |field, value: usize| u16::try_from(value).map_err(|_| FrameError::FieldOverflow { field, value });
        Ok(Self {
            packet_id,
            src: narrow("src", src)?,
            dst: narrow("dst", dst)?,
            len: narrow("len", len)?,
        })
    }

    /// Convert into the head-flit header ("conv").
    pub fn to_header(self) -> PacketHeader {
        PacketHeader {
            packet_id: self.packet_id,
            src: self.src as usize,
            dst: self.dst as usize,
            len: self.len,
        }
    }

    /// Inverse of [`Descriptor::to_header`] ("iconv").
    pub fn from_header(h: &PacketHeader) -> Self {
        Self {
            packet_id: h.packet_id,
            src: h.src as u16,
            dst: h.dst as u16,
            len: h.len,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionFrame {
    pub injection_cycle: u64,
    pub descriptors: Vec<Descriptor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arrival {
    pub packet_id: u32,
    pub src: u16,
    pub dst: u16,
    pub len: u16,
    pub arrival_cycle: u64,
}

impl Arrival {
    pub fn descriptor(&self) -> Descriptor {
        Descriptor {
            packet_id: self.packet_id,
            src: self.src,
            dst: self.dst,
            len: self.len,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EjectionFrame {
    pub halt_cycle: u64,
    pub arrivals: Vec<Arrival>,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], FrameError> {
        let end = self.pos + N;
        let bytes = self.buf.get(self.pos..end).ok_or_else(|| FrameError::Truncated {
            offset: self.pos,
            needed: end - self.buf.len(),
        })?;
        self.pos = end;
        Ok(bytes.try_into().expect("slice length"))
    }

    fn u16(&mut self) -> Result<u16, FrameError> {
        self.take().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32, FrameError> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, FrameError> {
        self.take().map(u64::from_le_bytes)
    }

    fn descriptor(&mut self, record: usize) -> Result<Descriptor, FrameError> {
        let d = Descriptor {
            packet_id: self.u32()?,
            src: self.u16()?,
            dst: self.u16()?,
            len: self.u16()?,
        };
        if self.u16()? != 0 {
            return Err(FrameError::BadPadding { record });
        }
        Ok(d)
    }
}

fn put_descriptor(out: &mut Vec<u8>, d: &Descriptor) {
    out.extend_from_slice(&d.packet_id.to_le_bytes());
    out.extend_from_slice(&d.src.to_le_bytes());
    out.extend_from_slice(&d.dst.to_le_bytes());
    out.extend_from_slice(&d.len.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
}

impl InjectionFrame {
    pub fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.injection_cycle.to_le_bytes());
        out.extend_from_slice(&(self.descriptors.len() as u32).to_le_bytes());
        for d in &self.descriptors {
            put_descriptor(out, d);
        }
    }

    /// Decode one frame from the front of `buf`, returning it and the
    /// number of bytes consumed.
    pub fn decode(buf: &[u8]) -> Result<(Self, usize), FrameError> {
        let mut r = Reader { buf, pos: 0 };
        let injection_cycle = r.u64()?;
        let count = r.u32()? as usize;
        let descriptors = (0..count).map(|i| r.descriptor(i)).collect::<Result<_, _>>()?;
        Ok((Self { injection_cycle, descriptors }, r.pos))
    }

    pub fn decode_all(mut buf: &[u8]) -> Result<Vec<Self>, FrameError> {
        let mut frames = vec![];
        while !buf.is_empty() {
            let (f, used) = Self::decode(buf)?;
            frames.push(f);
            buf = &buf[used..];
        }
        Ok(frames)
    }
}

impl EjectionFrame {
    pub fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.halt_cycle.to_le_bytes());
        out.extend_from_slice(&(self.arrivals.len() as u32).to_le_bytes());
        for a in &self.arrivals {
            put_descriptor(out, &a.descriptor());
            out.extend_from_slice(&a.arrival_cycle.to_le_bytes());
        }
    }

    pub fn decode(buf: &[u8]) -> Result<(Self, usize), FrameError> {
        let mut r = Reader { buf, pos: 0 };
        let halt_cycle = r.u64()?;
        let count = r.u32()? as usize;
        let mut arrivals = Vec::with_capacity(count.min(1 << 16));
        for i in 0..count {
            let d = r.descriptor(i)?;
            arrivals.push(Arrival {
                packet_id: d.packet_id,
                src: d.src,
                dst: d.dst,
                len: d.len,
                arrival_cycle: r.u64()?,
            });
        }
        Ok((Self { halt_cycle, arrivals }, r.pos))
    }

    pub fn decode_all(mut buf: &[u8]) -> Result<Vec<Self>, FrameError> {
        let mut frames = vec![];
        while !buf.is_empty() {
            let (f, used) = Self::decode(buf)?;
            frames.push(f);
            buf = &buf[used..];
        }
        Ok(frames)
    }
}
