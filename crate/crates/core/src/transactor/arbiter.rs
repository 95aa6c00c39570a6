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

/// Round-robin selection over the ejection FIFOs, one slot per
/// (node, VC) in row-major node order, then VC order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRobinArbiter {
    pointer: usize,
    width: usize,
}

impl RoundRobinArbiter {
    pub fn new(width: usize) -> Self {
        assert!(width > 0, "arbiter needs at least one input");
        Self { pointer: 0, width }
    }

    pub fn pointer(&self) -> usize {
        self.pointer
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn set_pointer(&mut self, pointer: usize) {
        self.pointer = pointer % self.width;
    }

    /// Every requesting slot, starting at the pointer and wrapping.
    pub fn grant_order(&self, mut requesting: impl FnMut(usize) -> bool) -> Vec<usize> {
        (0..self.width)
            .map(|k| (self.pointer + k) % self.width)
            .filter(|&s| requesting(s))
            .collect()
    }

    /// Called once the burst is over: the slot after the last one served
    /// gets top priority next time.
    pub fn complete_burst(&mut self, last_granted: usize) {
        self.pointer = (last_granted + 1) % self.width;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force reference: priority of slot s is its distance from the
    /// pointer going forward.
    fn reference(pointer: usize, width: usize, set: &[usize]) -> Vec<usize> {
        let mut v = set.to_vec();
        v.sort_by_key(|&s| (s + width - pointer) % width);
        v
    }

    #[test]
    fn wraps_from_pointer() {
        let mut a = RoundRobinArbiter::new(10);
        a.set_pointer(5);
        assert_eq!(a.grant_order(|s| s == 3 || s == 7), [7, 3]);
    }

    #[test]
    fn matches_reference_for_every_pointer() {
        let width = 6;
        for mask in 0u32..(1 << width) {
            let set: Vec<usize> = (0..width).filter(|s| mask & (1 << s) != 0).collect();
            for p in 0..width {
                let mut a = RoundRobinArbiter::new(width);
                a.set_pointer(p);
                assert_eq!(a.grant_order(|s| set.contains(&s)), reference(p, width, &set));
            }
        }
    }

    #[test]
    fn pointer_moves_past_last_grant() {
        let mut a = RoundRobinArbiter::new(4);
        a.complete_burst(3);
        assert_eq!(a.pointer(), 0);
        a.complete_burst(1);
        assert_eq!(a.pointer(), 2);
    }
}
