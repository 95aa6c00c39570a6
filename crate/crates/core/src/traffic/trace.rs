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

//! Line-oriented trace files with a dependency DAG.
//!
//! ```text
//! emunoc-trace v1 nodes=<N> packets=<P>
//! <id> <icyc> <src> <dst> <len> [dep_id ...]
//! ```
//!
//! Text after `#` is a comment. Ids are dense (`0..P`) and unique, and a
//! packet may only depend on packets declared above it.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use super::TrafficError;
use crate::host::TrafficEvent;

pub const TRACE_MAGIC: &str = "emunoc-trace";
pub const TRACE_VERSION: &str = "v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub nodes: usize,
    pub events: Vec<TrafficEvent>,
}

fn parse_err(line: usize, reason: impl Into<String>) -> TrafficError {
    TrafficError::Parse {
        line,
        reason: reason.into(),
    }
}

fn header_field(tok: Option<&str>, key: &str, line: usize) -> Result<usize, TrafficError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("header is missing `{key}=`")))?;
    let value = tok
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected `{key}=<n>`, found `{tok}`")))?;
    value
        .parse()
        .map_err(|_| parse_err(line, format!("bad value for {key}: `{value}`")))
}

fn field<T: std::str::FromStr>(tok: Option<&str>, name: &str, line: usize) -> Result<T, TrafficError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {name}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {name}: `{tok}`")))
}

pub fn parse_trace(text: &str) -> Result<Trace, TrafficError> {
    let mut header = None;
    let mut records: Vec<(usize, TrafficEvent)> = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let Some((nodes, packets)) = header else {
            if toks.next() != Some(TRACE_MAGIC) || toks.next() != Some(TRACE_VERSION) {
                return Err(parse_err(line, format!("expected `{TRACE_MAGIC} {TRACE_VERSION}` header")));
            }
            let nodes = header_field(toks.next(), "nodes", line)?;
            let packets = header_field(toks.next(), "packets", line)?;
            if let Some(extra) = toks.next() {
                return Err(parse_err(line, format!("unexpected `{extra}` in header")));
            }
            header = Some((nodes, packets));
            continue;
        };
        let packet_id: u32 = field(toks.next(), "id", line)?;
        let icyc = field(toks.next(), "icyc", line)?;
        let src: usize = field(toks.next(), "src", line)?;
        let dst: usize = field(toks.next(), "dst", line)?;
        let len: u16 = field(toks.next(), "len", line)?;
        let deps = toks.map(|t| field(Some(t), "dep id", line)).collect::<Result<Vec<u32>, _>>()?;
        if src >= nodes || dst >= nodes {
            return Err(parse_err(line, format!("src {src} / dst {dst} outside {nodes} nodes")));
        }
        if len == 0 {
            return Err(parse_err(line, "zero-length packet"));
        }
        if packet_id as usize >= packets {
            return Err(parse_err(line, format!("id {packet_id} not below packet count {packets}")));
        }
        records.push((line, TrafficEvent::new(packet_id, icyc, src, dst, len).with_deps(deps)));
    }
    let Some((nodes, packets)) = header else {
        return Err(parse_err(1, "empty file, missing header"));
    };
    if records.len() != packets {
        return Err(parse_err(1, format!("header declares {packets} packets, found {}", records.len())));
    }

    let mut position = HashMap::with_capacity(records.len());
    for (pos, (line, e)) in records.iter().enumerate() {
        if position.insert(e.packet_id, pos).is_some() {
            return Err(parse_err(*line, format!("duplicate id {}", e.packet_id)));
        }
    }
    for (line, e) in &records {
        if let Some(&dep) = e.deps.iter().find(|d| !position.contains_key(d)) {
            return Err(TrafficError::DanglingDep {
                line: *line,
                packet_id: e.packet_id,
                dep,
            });
        }
    }
    let cyclic = find_cycle_members(&records, &position);
    if !cyclic.is_empty() {
        return Err(TrafficError::CyclicDeps(cyclic));
    }
    for (pos, (line, e)) in records.iter().enumerate() {
        if let Some(&dep) = e.deps.iter().find(|d| position[d] >= pos) {
            return Err(TrafficError::NotTopological {
                line: *line,
                packet_id: e.packet_id,
                dep,
            });
        }
    }
    Ok(Trace {
        nodes,
        events: records.into_iter().map(|(_, e)| e).collect(),
    })
}

/// Ids left over after Kahn's algorithm, i.e. on or behind a cycle.
fn find_cycle_members(records: &[(usize, TrafficEvent)], position: &HashMap<u32, usize>) -> Vec<u32> {
    let n = records.len();
    let mut indegree = vec![0usize; n];
    let mut out = vec![vec![]; n];
    for (pos, (_, e)) in records.iter().enumerate() {
        for d in &e.deps {
            out[position[d]].push(pos);
            indegree[pos] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = queue.pop_front() {
        for &j in &out[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                queue.push_back(j);
            }
        }
    }
    let mut ids: Vec<u32> = (0..n).filter(|&i| indegree[i] > 0).map(|i| records[i].1.packet_id).collect();
    ids.sort_unstable();
    ids
}

/// Canonical text form: header, then one record per line, single spaces.
pub fn format_trace(trace: &Trace) -> String {
    let mut s = format!(
        "{TRACE_MAGIC} {TRACE_VERSION} nodes={} packets={}\n",
        trace.nodes,
        trace.events.len()
    );
    for e in &trace.events {
        let _ = write!(s, "{} {} {} {} {}", e.packet_id, e.icyc, e.src, e.dst, e.len);
        for d in &e.deps {
            let _ = write!(s, " {d}");
        }
        s.push('\n');
    }
    s
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Trace, TrafficError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TrafficError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_trace(&text)
}

pub fn save_trace(path: impl AsRef<Path>, trace: &Trace) -> Result<(), TrafficError> {
    let path = path.as_ref();
    std::fs::write(path, format_trace(trace)).map_err(|source| TrafficError::Io {
        path: path.to_path_buf(),
        source,
    })
}
