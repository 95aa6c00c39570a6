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

use super::TransactorError;

/// Gates the emulated clock. The counter advances on a tick only while
/// `halt` is low and the counter is still below the stored injection cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockHalter {
    counter: u64,
    injection_cycle: u64,
    halt: bool,
    stopped: bool,
}

impl Default for ClockHalter {
    fn default() -> Self {
        Self::new()
    }
}

impl ClockHalter {
    pub fn new() -> Self {
        Self {
            counter: 0,
            injection_cycle: 0,
            halt: false,
            stopped: true,
        }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn injection_cycle(&self) -> u64 {
        self.injection_cycle
    }

    pub fn is_halted(&self) -> bool {
        self.halt
    }

    pub fn is_stopped(&self) -> bool {
        self.stopped
    }

    /// Write-enable: latch a new quantum bound. Bounds must strictly grow.
    pub fn store(&mut self, quantum: u64) -> Result<(), TransactorError> {
        if quantum <= self.injection_cycle {
            return Err(TransactorError::NonMonotoneQuantum {
                current: self.injection_cycle,
                requested: quantum,
            });
        }
        self.injection_cycle = quantum;
        self.stopped = self.counter == quantum;
        Ok(())
    }

    pub fn set_halt(&mut self, halt: bool) {
        self.halt = halt;
    }

    /// One edge of the global clock. Returns whether the halting clock was
    /// enabled, i.e. whether the emulated design executed a cycle.
    pub fn tick(&mut self) -> bool {
        if self.halt || self.stopped {
            return false;
        }
        self.counter += 1;
        self.stopped = self.counter == self.injection_cycle;
        true
    }

    /// Run the counter straight to the bound. Equivalent to ticking until
    /// stopped when nothing in the design can change. Returns the number of
    /// cycles skipped.
    pub fn fast_forward(&mut self) -> u64 {
        if self.halt || self.stopped {
            return 0;
        }
        let skipped = self.injection_cycle - self.counter;
        self.counter = self.injection_cycle;
        self.stopped = true;
        skipped
    }
}
