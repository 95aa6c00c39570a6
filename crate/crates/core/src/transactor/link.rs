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

//! Channels between the host and the hardware side.
//!
//! A link carries one injection frame per quantum toward the hardware and
//! the resulting ejection frames back, in order and without loss.

use std::sync::mpsc::{channel, Receiver, Sender};
use std::thread::JoinHandle;

use super::frame::{EjectionFrame, InjectionFrame};
use super::hardware::{HardwareSide, HardwareStats};
use super::TransactorError;
use crate::noc::NocConfig;

pub trait Link {
    fn send(&mut self, frame: InjectionFrame) -> Result<(), TransactorError>;

    /// Ejection frames produced by the quantum of the last sent frame.
    fn receive(&mut self) -> Result<Vec<EjectionFrame>, TransactorError>;

    /// Instrumentation snapshot from the hardware side.
    fn stats(&mut self) -> Result<HardwareStats, TransactorError>;
}

/// Hardware side driven synchronously on the caller's thread.
pub struct InProcessLink {
    hw: HardwareSide,
    reply: Option<Result<Vec<EjectionFrame>, TransactorError>>,
}

impl InProcessLink {
    pub fn new(config: NocConfig) -> Result<Self, TransactorError> {
        Ok(Self {
            hw: HardwareSide::new(config)?,
            reply: None,
        })
    }

    pub fn hardware(&self) -> &HardwareSide {
        &self.hw
    }
}

impl Link for InProcessLink {
    fn send(&mut self, frame: InjectionFrame) -> Result<(), TransactorError> {
        self.reply = Some(self.hw.process(&frame));
        Ok(())
    }

    fn receive(&mut self) -> Result<Vec<EjectionFrame>, TransactorError> {
        self.reply.take().unwrap_or(Err(TransactorError::Disconnected))
    }

    fn stats(&mut self) -> Result<HardwareStats, TransactorError> {
        Ok(self.hw.stats())
    }
}

enum Request {
    Quantum(InjectionFrame),
    Stats,
}

enum Reply {
    Frames(Result<Vec<EjectionFrame>, TransactorError>),
    Stats(Box<HardwareStats>),
}

/// Hardware side on its own thread, reached over a pair of FIFO channels.
pub struct ThreadedLink {
    tx: Option<Sender<Request>>,
    rx: Receiver<Reply>,
    worker: Option<JoinHandle<()>>,
}

impl ThreadedLink {
    pub fn spawn(config: NocConfig) -> Result<Self, TransactorError> {
        let mut hw = HardwareSide::new(config)?;
        let (req_tx, req_rx) = channel::<Request>();
        let (rep_tx, rep_rx) = channel::<Reply>();
        let worker = std::thread::Builder::new()
            .name("emunoc-hw".into())
            .spawn(move || {
                for req in req_rx {
                    let reply = match req {
                        Request::Quantum(frame) => Reply::Frames(hw.process(&frame)),
                        Request::Stats => Reply::Stats(Box::new(hw.stats())),
                    };
                    if rep_tx.send(reply).is_err() {
                        break;
                    }
                }
            })
            .map_err(|_| TransactorError::Disconnected)?;
        Ok(Self {
            tx: Some(req_tx),
            rx: rep_rx,
            worker: Some(worker),
        })
    }

    fn request(&self, req: Request) -> Result<(), TransactorError> {
        self.tx
            .as_ref()
            .ok_or(TransactorError::Disconnected)?
            .send(req)
            .map_err(|_| TransactorError::Disconnected)
    }
}

impl Link for ThreadedLink {
    fn send(&mut self, frame: InjectionFrame) -> Result<(), TransactorError> {
        self.request(Request::Quantum(frame))
    }

    fn receive(&mut self) -> Result<Vec<EjectionFrame>, TransactorError> {
        match self.rx.recv() {
            Ok(Reply::Frames(r)) => r,
            _ => Err(TransactorError::Disconnected),
        }
    }

    fn stats(&mut self) -> Result<HardwareStats, TransactorError> {
        self.request(Request::Stats)?;
        match self.rx.recv() {
            Ok(Reply::Stats(s)) => Ok(*s),
            _ => Err(TransactorError::Disconnected),
        }
    }
}

impl Drop for ThreadedLink {
    fn drop(&mut self) {
        self.tx.take();
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

/// Binary logs of everything that crossed a link.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrameLog {
    pub injection: Vec<u8>,
    pub ejection: Vec<u8>,
}

/// Wraps a link and appends every frame, encoded, to a [`FrameLog`].
pub struct RecordingLink<L> {
    inner: L,
    log: FrameLog,
}

impl<L: Link> RecordingLink<L> {
    pub fn new(inner: L) -> Self {
        Self {
            inner,
            log: FrameLog::default(),
        }
    }

    pub fn log(&self) -> &FrameLog {
        &self.log
    }

    pub fn into_parts(self) -> (L, FrameLog) {
        (self.inner, self.log)
    }
}

impl<L: Link> Link for RecordingLink<L> {
    fn send(&mut self, frame: InjectionFrame) -> Result<(), TransactorError> {
        frame.encode(&mut self.log.injection);
        self.inner.send(frame)
    }

    fn receive(&mut self) -> Result<Vec<EjectionFrame>, TransactorError> {
        let frames = self.inner.receive()?;
        for f in &frames {
            f.encode(&mut self.log.ejection);
        }
        Ok(frames)
    }

    fn stats(&mut self) -> Result<HardwareStats, TransactorError> {
        self.inner.stats()
    }
}
