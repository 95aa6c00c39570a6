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

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrafficError;
use crate::host::TrafficEvent;
use crate::noc::NodeId;

pub const DEFAULT_FRAMERATE: f64 = 30.0;
pub const DEFAULT_NOC_FREQUENCY: f64 = 1e9;

/// Packet injections per NoC cycle for one core.
///
/// `sparsity` is the fraction of activations that are zero and never sent.
pub fn cnn_irate(map_neurons: u64, sparsity: f64, framerate: f64, noc_frequency: f64) -> f64 {
    // Distributed as n*f - n*f*s so that whole-number products divide exactly.
    let rate = map_neurons as f64 * framerate;
    (rate - rate * sparsity) / noc_frequency
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoreLoad {
    pub neurons: u64,
    /// Cores holding the next layer. Empty for output-layer and idle cores.
    pub dests: Vec<NodeId>,
}

/// Neurons per core and where each core sends its activations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnnMapping {
    /// Indexed by node.
    pub cores: Vec<CoreLoad>,
    pub framerate: f64,
    pub noc_frequency: f64,
}

impl CnnMapping {
    pub fn idle(nodes: usize) -> Self {
        Self {
            cores: vec![CoreLoad::default(); nodes],
            framerate: DEFAULT_FRAMERATE,
            noc_frequency: DEFAULT_NOC_FREQUENCY,
        }
    }

    pub fn nodes(&self) -> usize {
        self.cores.len()
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        let bad = |m: String| Err(TrafficError::InvalidMapping(m));
        if !(self.noc_frequency > 0.0 && self.noc_frequency.is_finite()) {
            return bad(format!("noc frequency must be positive, got {}", self.noc_frequency));
        }
        if !(self.framerate >= 0.0 && self.framerate.is_finite()) {
            return bad(format!("framerate must be non-negative, got {}", self.framerate));
        }
        let n = self.cores.len();
        for (node, core) in self.cores.iter().enumerate() {
            if let Some(d) = core.dests.iter().find(|&&d| d >= n || d == node) {
                return bad(format!("node {node}: destination {d} is not another node of {n}"));
            }
        }
        Ok(())
    }

    /// Total neurons across all cores.
    pub fn neurons(&self) -> u64 {
        self.cores.iter().map(|c| c.neurons).sum()
    }
}

/// Bernoulli packet starts at every core that has both neurons and
/// destinations. The destination is uniform over that core's list.
pub fn cnn_traffic(
    mapping: &CnnMapping,
    sparsity: f64,
    duration: u64,
    seed: u64,
    packet_len: u16,
) -> Result<Vec<TrafficEvent>, TrafficError> {
    mapping.validate()?;
    if !(0.0..=1.0).contains(&sparsity) {
        return Err(TrafficError::InvalidMapping(format!("sparsity {sparsity} outside [0, 1]")));
    }
    if packet_len == 0 {
        return Err(TrafficError::InvalidMapping("packet length must be positive".into()));
    }
    let sources: Vec<(NodeId, f64)> = mapping
        .cores
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.dests.is_empty())
        .map(|(n, c)| (n, cnn_irate(c.neurons, sparsity, mapping.framerate, mapping.noc_frequency)))
        .filter(|&(_, p)| p > 0.0)
        .collect();
    if let Some(&(_, p)) = sources.iter().find(|&&(_, p)| p > 1.0) {
        return Err(TrafficError::InvalidRate(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = vec![];
    for cycle in 0..duration {
        for &(src, p) in &sources {
            if rng.gen_bool(p) {
                let dests = &mapping.cores[src].dests;
                let dst = dests[rng.gen_range(0..dests.len())];
                events.push(TrafficEvent::new(events.len() as u32, cycle, src, dst, packet_len));
            }
        }
    }
    Ok(events)
}

/// Reads the mapping text format. Nodes that are not listed stay idle.
pub fn parse_mapping(text: &str, nodes: usize) -> Result<CnnMapping, TrafficError> {
    let mut m = CnnMapping::idle(nodes);
    let mut seen = vec![false; nodes];
    let perr = |line: usize, reason: String| TrafficError::Parse { line, reason };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut node = None;
        let mut neurons = None;
        let mut dests = None;
        for tok in content.split_whitespace() {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| perr(line, format!("expected key=value, found `{tok}`")))?;
            let num = |v: &str| v.parse::<u64>().map_err(|_| perr(line, format!("bad {key}: `{v}`")));
            let real = |v: &str| v.parse::<f64>().map_err(|_| perr(line, format!("bad {key}: `{v}`")));
            match key {
                "framerate" => m.framerate = real(value)?,
                "frequency" => m.noc_frequency = real(value)?,
                "node" => node = Some(num(value)? as usize),
                "neurons" => neurons = Some(num(value)?),
                "dests" => {
                    dests = Some(
                        value
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(|s| num(s).map(|d| d as usize))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                _ => return Err(perr(line, format!("unknown key `{key}`"))),
            }
        }
        match (node, neurons, dests) {
            (None, None, None) => {}
            (Some(n), nb, ds) => {
                if n >= nodes {
                    return Err(perr(line, format!("node {n} outside {nodes} nodes")));
                }
                if std::mem::replace(&mut seen[n], true) {
                    return Err(perr(line, format!("node {n} listed twice")));
                }
                m.cores[n] = CoreLoad {
                    neurons: nb.unwrap_or(0),
                    dests: ds.unwrap_or_default(),
                };
            }
            _ => return Err(perr(line, "neurons/dests given without node=".into())),
        }
    }
    m.validate()?;
    Ok(m)
}

/// Canonical text: rates first, then every node with neurons or dests.
pub fn format_mapping(m: &CnnMapping) -> String {
    let mut s = format!("framerate={}\nfrequency={}\n", m.framerate, m.noc_frequency);
    for (node, c) in m.cores.iter().enumerate() {
        if c.neurons == 0 && c.dests.is_empty() {
            continue;
        }
        let dests: Vec<String> = c.dests.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "node={node} neurons={} dests={}", c.neurons, dests.join(","));
    }
    s
}

pub fn load_mapping(path: impl AsRef<Path>, nodes: usize) -> Result<CnnMapping, TrafficError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TrafficError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mapping(&text, nodes)
}

pub fn save_mapping(path: impl AsRef<Path>, m: &CnnMapping) -> Result<(), TrafficError> {
    let path = path.as_ref();
    std::fs::write(path, format_mapping(m)).map_err(|source| TrafficError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irate_values() {
        assert_eq!(cnn_irate(1000, 0.9, 30.0, 1e9), 3e-6);
        assert_eq!(cnn_irate(1000, 1.0, 30.0, 1e9), 0.0);
        assert_eq!(cnn_irate(1_000_000, 0.0, 30.0, 1e9), 0.03);
        assert_eq!(cnn_irate(0, 0.3, 30.0, 1e9), 0.0);
    }

    #[test]
    fn irate_decreases_with_sparsity() {
        let rates: Vec<f64> = (0..=20).map(|i| cnn_irate(1_500_000, i as f64 / 20.0, 30.0, 1e9)).collect();
        assert!(rates.windows(2).all(|w| w[0] > w[1]));
    }

    fn single_source(neurons: u64, dests: Vec<NodeId>) -> CnnMapping {
        let mut m = CnnMapping::idle(9);
        m.cores[4] = CoreLoad { neurons, dests };
        m
    }

    #[test]
    fn idle_mapping_is_silent() {
        assert!(cnn_traffic(&CnnMapping::idle(9), 0.0, 10_000, 1, 5).unwrap().is_empty());
    }

    #[test]
    fn one_neighbour_means_one_hop() {
        let ev = cnn_traffic(&single_source(1_000_000, vec![5]), 0.5, 5_000, 2, 5).unwrap();
        assert!(!ev.is_empty());
        assert!(ev.iter().all(|e| e.src == 4 && e.dst == 5 && e.len == 5 && e.deps.is_empty()));
    }

    #[test]
    fn sparsity_ratio_matches_expectation() {
        // (1 - 0.5) / (1 - 0.9) = 5. p = 0.015 and 0.003 over 2e5 cycles.
        let m = single_source(1_000_000, vec![1, 3, 5, 7]);
        let n = 200_000;
        let hi = cnn_traffic(&m, 0.5, n, 11, 5).unwrap().len() as f64;
        let lo = cnn_traffic(&m, 0.9, n, 12, 5).unwrap().len() as f64;
        let (p_hi, p_lo) = (0.015, 0.003);
        let sd = |p: f64| (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hi - n as f64 * p_hi).abs() <= 3.0 * sd(p_hi), "{hi}");
        assert!((lo - n as f64 * p_lo).abs() <= 3.0 * sd(p_lo), "{lo}");
        let ratio = hi / lo;
        assert!((4.0..6.25).contains(&ratio), "{ratio}");
    }

    #[test]
    fn destinations_are_spread() {
        let ev = cnn_traffic(&single_source(10_000_000, vec![1, 3]), 0.0, 2_000, 3, 2).unwrap();
        let to1 = ev.iter().filter(|e| e.dst == 1).count();
        assert!(to1 > ev.len() / 3 && to1 < 2 * ev.len() / 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = single_source(1000, vec![4]);
        assert!(matches!(cnn_traffic(&m, 0.5, 10, 1, 5), Err(TrafficError::InvalidMapping(_))));
        let m = single_source(1000, vec![9]);
        assert!(cnn_traffic(&m, 0.5, 10, 1, 5).is_err());
        let m = single_source(1000, vec![5]);
        assert!(cnn_traffic(&m, 1.5, 10, 1, 5).is_err());
        assert!(cnn_traffic(&m, 0.5, 10, 1, 0).is_err());
        let m = single_source(100_000_000, vec![5]);
        assert!(matches!(cnn_traffic(&m, 0.0, 10, 1, 5), Err(TrafficError::InvalidRate(_))));
    }

    #[test]
    fn mapping_text_round_trip() {
        let mut m = CnnMapping::idle(6);
        m.cores[0] = CoreLoad { neurons: 1500, dests: vec![2, 3] };
        m.cores[2] = CoreLoad { neurons: 700, dests: vec![5] };
        m.cores[5] = CoreLoad { neurons: 12, dests: vec![] };
        m.framerate = 60.0;
        let text = format_mapping(&m);
        assert_eq!(
            text,
            "framerate=60\nfrequency=1000000000\nnode=0 neurons=1500 dests=2,3\nnode=2 neurons=700 dests=5\nnode=5 neurons=12 dests=\n"
        );
        assert_eq!(parse_mapping(&text, 6).unwrap(), m);
        let dir = tempfile::tempdir().unwrap();
        save_mapping(dir.path().join("m"), &m).unwrap();
        assert_eq!(load_mapping(dir.path().join("m"), 6).unwrap(), m);
    }

    #[test]
    fn mapping_parse_errors() {
        for (text, line) in [
            ("node=9 neurons=1 dests=0\n", 1),
            ("# hi\nnode=0 neurons=x\n", 2),
            ("node=0\nnode=0\n", 2),
            ("neurons=5\n", 1),
            ("colour=red\n", 1),
            ("bogus\n", 1),
        ] {
            match parse_mapping(text, 4) {
                Err(TrafficError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse_mapping("frequency=0\n", 4), Err(TrafficError::InvalidMapping(_))));
    }
}
