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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TrafficError;
use crate::host::TrafficEvent;
use crate::noc::NocConfig;

/// Bernoulli packet sources at every node.
///
/// Each node starts a packet of `config.packet_len` flits in each cycle with
/// probability `flit_rate / packet_len`, so the offered load is `flit_rate`
/// flits per node per cycle. Destinations are uniform over the other nodes.
/// Events come out ordered by cycle, then source, with ids dense from 0.
pub fn uniform_random(
    config: &NocConfig,
    flit_rate: f64,
    duration: u64,
    seed: u64,
) -> Result<Vec<TrafficEvent>, TrafficError> {
    if !(0.0..=1.0).contains(&flit_rate) {
        return Err(TrafficError::InvalidRate(flit_rate));
    }
    let nodes = config.nodes();
    let len = config.packet_len;
    let p = flit_rate / len as f64;
    let mut events = vec![];
    if p == 0.0 || nodes < 2 {
        return Ok(events);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cycle in 0..duration {
        for src in 0..nodes {
            if !rng.gen_bool(p) {
                continue;
            }
            let mut dst = rng.gen_range(0..nodes - 1);
            if dst >= src {
                dst += 1;
            }
            events.push(TrafficEvent::new(events.len() as u32, cycle, src, dst, len as u16));
        }
    }
    Ok(events)
}
