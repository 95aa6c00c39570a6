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

//! Placement of CNN layers onto mesh cores.

use super::cnn::{CnnMapping, CoreLoad};
use super::TrafficError;
use crate::noc::NodeId;

/// Nodes in boustrophedon order: even rows west to east, odd rows back.
pub fn snake_order(width: usize, height: usize) -> Vec<NodeId> {
    (0..height)
        .flat_map(|y| {
            let row = (0..width).map(move |x| y * width + x);
            let row: Vec<NodeId> = if y % 2 == 0 { row.collect() } else { row.rev().collect() };
            row
        })
        .collect()
}

/// Neuron count per core when a layer is cut into `neurons_per_core` chunks.
fn split_layer(size: u64, neurons_per_core: u64) -> Vec<u64> {
    let full = size / neurons_per_core;
    let mut out = vec![neurons_per_core; full as usize];
    if !size.is_multiple_of(neurons_per_core) {
        out.push(size % neurons_per_core);
    }
    out
}

fn layer_chunks(
    layer_sizes: &[u64],
    width: usize,
    height: usize,
    neurons_per_core: u64,
) -> Result<Vec<Vec<u64>>, TrafficError> {
    if neurons_per_core == 0 {
        return Err(TrafficError::InvalidMapping("neurons_per_core must be positive".into()));
    }
    if let Some(i) = layer_sizes.iter().position(|&s| s == 0) {
        return Err(TrafficError::InvalidMapping(format!("layer {i} has no neurons")));
    }
    let chunks: Vec<Vec<u64>> = layer_sizes.iter().map(|&s| split_layer(s, neurons_per_core)).collect();
    let needed: usize = chunks.iter().map(Vec::len).sum();
    let available = width * height;
    if needed > available {
        return Err(TrafficError::GridTooSmall { needed, available });
    }
    Ok(chunks)
}

/// Turns per-layer core lists into a mapping where every core of layer `i`
/// sends to every core of layer `i + 1`.
fn assemble(layers: &[Vec<(NodeId, u64)>], nodes: usize) -> CnnMapping {
    let mut m = CnnMapping::idle(nodes);
    for (i, layer) in layers.iter().enumerate() {
        let mut dests: Vec<NodeId> = layers.get(i + 1).map(|l| l.iter().map(|&(n, _)| n).collect()).unwrap_or_default();
        dests.sort_unstable();
        for &(node, neurons) in layer {
            m.cores[node] = CoreLoad {
                neurons,
                dests: dests.clone(),
            };
        }
    }
    m
}

/// Consecutive layers on consecutive cores along the snake order.
pub fn snake_mapping(
    layer_sizes: &[u64],
    width: usize,
    height: usize,
    neurons_per_core: u64,
) -> Result<CnnMapping, TrafficError> {
    let chunks = layer_chunks(layer_sizes, width, height, neurons_per_core)?;
    let mut order = snake_order(width, height).into_iter();
    let layers: Vec<Vec<(NodeId, u64)>> = chunks
        .iter()
        .map(|c| c.iter().map(|&n| (order.next().expect("checked grid size"), n)).collect())
        .collect();
    Ok(assemble(&layers, width * height))
}

fn manhattan(a: NodeId, b: NodeId, width: usize) -> u64 {
    ((a % width).abs_diff(b % width) + (a / width).abs_diff(b / width)) as u64
}

/// Greedy placement that keeps neighbouring layers close.
///
/// The layer with the most cores in its adjacent layers is placed first,
/// grown out from the grid centre. The rest follow in order of layer
/// distance from it. Each core takes the free node with the lowest
/// (distance to placed cores of adjacent layers, distance to placed cores of
/// its own layer, distance to centre, node index). A pairwise swap pass then
/// removes any remaining local improvements in total inter-layer distance.
pub fn locality_mapping(
    layer_sizes: &[u64],
    width: usize,
    height: usize,
    neurons_per_core: u64,
) -> Result<CnnMapping, TrafficError> {
    if layer_sizes.len() <= 1 {
        return snake_mapping(layer_sizes, width, height, neurons_per_core);
    }
    let chunks = layer_chunks(layer_sizes, width, height, neurons_per_core)?;
    let nl = chunks.len();
    let adjacent = |i: usize| -> usize {
        let before = if i > 0 { chunks[i - 1].len() } else { 0 };
        before + chunks.get(i + 1).map_or(0, Vec::len)
    };
    let seed = (0..nl).max_by_key(|&i| (adjacent(i), std::cmp::Reverse(i))).unwrap_or(0);
    let mut order: Vec<usize> = (0..nl).collect();
    order.sort_by_key(|&i| (i.abs_diff(seed), i));

    let nodes = width * height;
    let centre = (height - 1) / 2 * width + (width - 1) / 2;
    // (layer, neurons) per node
    let mut slot: Vec<Option<(usize, u64)>> = vec![None; nodes];
    for &l in &order {
        for &neurons in &chunks[l] {
            let cost = |v: NodeId| {
                let (mut inter, mut intra) = (0u64, 0u64);
                for (u, s) in slot.iter().enumerate() {
                    match *s {
                        Some((k, _)) if k == l => intra += manhattan(u, v, width),
                        Some((k, _)) if k.abs_diff(l) == 1 => inter += manhattan(u, v, width),
                        _ => {}
                    }
                }
                (inter, intra, manhattan(v, centre, width), v)
            };
            let best = (0..nodes)
                .filter(|&v| slot[v].is_none())
                .min_by_key(|&v| cost(v))
                .expect("checked grid size");
            slot[best] = Some((l, neurons));
        }
    }
    refine_by_swaps(&mut slot, width);

    let mut layers: Vec<Vec<(NodeId, u64)>> = vec![vec![]; nl];
    for (node, s) in slot.iter().enumerate() {
        if let Some((l, neurons)) = *s {
            layers[l].push((node, neurons));
        }
    }
    Ok(assemble(&layers, nodes))
}

/// Distance from `v` to every node holding a layer adjacent to `v`'s.
fn edge_cost(slot: &[Option<(usize, u64)>], v: NodeId, width: usize) -> u64 {
    let Some((l, _)) = slot[v] else { return 0 };
    slot.iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, Some((k, _)) if k.abs_diff(l) == 1))
        .map(|(u, _)| manhattan(u, v, width))
        .sum()
}

/// First-improvement pairwise swaps until no swap lowers the total
/// inter-layer distance. Pairs are visited in node-index order.
fn refine_by_swaps(slot: &mut [Option<(usize, u64)>], width: usize) {
    let n = slot.len();
    loop {
        let mut improved = false;
        for a in 0..n {
            for b in a + 1..n {
                let same = match (slot[a], slot[b]) {
                    (None, None) => true,
                    (Some((x, _)), Some((y, _))) => x == y,
                    _ => false,
                };
                if same {
                    continue;
                }
                let before = edge_cost(slot, a, width) + edge_cost(slot, b, width);
                slot.swap(a, b);
                let after = edge_cost(slot, a, width) + edge_cost(slot, b, width);
                if after < before {
                    improved = true;
                } else {
                    slot.swap(a, b);
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// Sum of Manhattan distances over every (core, destination) pair.
pub fn inter_layer_distance(mapping: &CnnMapping, width: usize) -> u64 {
    mapping
        .cores
        .iter()
        .enumerate()
        .flat_map(|(a, c)| c.dests.iter().map(move |&b| manhattan(a, b, width)))
        .sum()
}

/// Expected hops per frame: each core's neurons times the mean distance to
/// its destinations.
pub fn weighted_hop_count(mapping: &CnnMapping, width: usize) -> f64 {
    mapping
        .cores
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.dests.is_empty())
        .map(|(a, c)| {
            let hops: u64 = c.dests.iter().map(|&b| manhattan(a, b, width)).sum();
            c.neurons as f64 * hops as f64 / c.dests.len() as f64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer_of(m: &CnnMapping) -> Vec<Option<usize>> {
        // Recover layers by following dests from sources nobody sends to.
        let n = m.cores.len();
        let used: Vec<bool> = m.cores.iter().map(|c| c.neurons > 0).collect();
        let mut targeted = vec![false; n];
        for c in &m.cores {
            for &d in &c.dests {
                targeted[d] = true;
            }
        }
        let mut label = vec![None; n];
        let mut frontier: Vec<usize> = (0..n).filter(|&i| used[i] && !targeted[i]).collect();
        let mut depth = 0;
        while !frontier.is_empty() {
            for &i in &frontier {
                label[i] = Some(depth);
            }
            let mut next = m.cores[frontier[0]].dests.clone();
            next.sort_unstable();
            frontier = next;
            depth += 1;
        }
        label
    }

    #[test]
    fn snake_order_3x3() {
        assert_eq!(snake_order(3, 3), [0, 1, 2, 5, 4, 3, 6, 7, 8]);
        assert_eq!(snake_order(1, 3), [0, 1, 2]);
    }

    #[test]
    fn single_layer_single_core() {
        let m = snake_mapping(&[10], 2, 2, 10).unwrap();
        assert_eq!(m.cores[0], CoreLoad { neurons: 10, dests: vec![] });
        assert!(m.cores[1..].iter().all(|c| c.neurons == 0 && c.dests.is_empty()));
        assert_eq!(locality_mapping(&[10], 2, 2, 10).unwrap(), m);
    }

    #[test]
    fn chain_on_a_row() {
        let m = snake_mapping(&[5, 5, 5], 3, 1, 5).unwrap();
        let dests: Vec<_> = m.cores.iter().map(|c| c.dests.clone()).collect();
        assert_eq!(dests, [vec![1], vec![2], vec![]]);
    }

    #[test]
    fn snake_wraps_rows_in_reverse() {
        // Layers of 2, 3, 2 cores on 3x3 by hand:
        //   row 0: L0 L0 L1
        //   row 1: L2 L1 L1   (walked east to west: 5 then 4, then 3)
        //   row 2: L2 .  .
        let m = snake_mapping(&[20, 25, 12], 3, 3, 10).unwrap();
        let expect = [
            (10, vec![2, 4, 5]),
            (10, vec![2, 4, 5]),
            (10, vec![3, 6]),
            (10, vec![]),
            (5, vec![3, 6]),
            (10, vec![3, 6]),
            (2, vec![]),
            (0, vec![]),
            (0, vec![]),
        ];
        for (node, (neurons, dests)) in expect.into_iter().enumerate() {
            assert_eq!(m.cores[node], CoreLoad { neurons, dests }, "node {node}");
        }
    }

    #[test]
    fn grid_too_small() {
        let err = snake_mapping(&[30, 30], 2, 2, 10).unwrap_err();
        assert!(matches!(err, TrafficError::GridTooSmall { needed: 6, available: 4 }));
        assert!(locality_mapping(&[30, 30], 2, 2, 10).is_err());
        assert!(snake_mapping(&[30, 0], 5, 5, 10).is_err());
        assert!(snake_mapping(&[30], 5, 5, 0).is_err());
    }

    #[test]
    fn two_single_core_layers_are_adjacent() {
        for (w, h) in [(2, 1), (3, 3), (5, 5), (4, 2)] {
            let m = locality_mapping(&[4, 4], w, h, 4).unwrap();
            assert_eq!(inter_layer_distance(&m, w), 1);
        }
    }

    #[test]
    fn locality_places_every_core_once() {
        let m = locality_mapping(&[80, 80, 40], 5, 5, 10).unwrap();
        let labels = layer_of(&m);
        let count = |k| labels.iter().filter(|&&l| l == Some(k)).count();
        assert_eq!((count(0), count(1), count(2)), (8, 8, 4));
        assert_eq!(m.neurons(), 200);
        m.validate().unwrap();
    }

    /// Smallest inter-layer distance over every assignment of layer labels
    /// to nodes.
    fn optimal_distance(cores: &[usize], width: usize, height: usize) -> u64 {
        fn rec(node: usize, left: &mut Vec<usize>, label: &mut Vec<Option<usize>>, w: usize, best: &mut u64) {
            if node == label.len() {
                if left.iter().all(|&c| c == 0) {
                    let mut d = 0;
                    for a in 0..label.len() {
                        for b in 0..label.len() {
                            if let (Some(x), Some(y)) = (label[a], label[b]) {
                                if y == x + 1 {
                                    d += manhattan(a, b, w);
                                }
                            }
                        }
                    }
                    *best = (*best).min(d);
                }
                return;
            }
            let remaining_nodes = label.len() - node;
            if left.iter().sum::<usize>() < remaining_nodes {
                label[node] = None;
                rec(node + 1, left, label, w, best);
            }
            for l in 0..left.len() {
                if left[l] > 0 {
                    left[l] -= 1;
                    label[node] = Some(l);
                    rec(node + 1, left, label, w, best);
                    left[l] += 1;
                }
            }
            label[node] = None;
        }
        let mut best = u64::MAX;
        rec(0, &mut cores.to_vec(), &mut vec![None; width * height], width, &mut best);
        best
    }

    #[test]
    fn locality_against_snake_and_optimum_3x3() {
        for cores in [[1, 1, 1], [2, 3, 2], [3, 3, 3], [1, 4, 2], [2, 2, 1], [4, 1, 4]] {
            let sizes: Vec<u64> = cores.iter().map(|&c| c as u64 * 10).collect();
            let loc = inter_layer_distance(&locality_mapping(&sizes, 3, 3, 10).unwrap(), 3);
            let snake = inter_layer_distance(&snake_mapping(&sizes, 3, 3, 10).unwrap(), 3);
            let opt = optimal_distance(&cores, 3, 3);
            assert!(opt <= loc && loc <= snake, "{cores:?}: opt {opt} loc {loc} snake {snake}");
        }
    }

    #[test]
    fn locality_beats_snake_on_5x5() {
        let sizes = [8 * 1_500_000, 8 * 1_500_000, 4 * 1_500_000];
        let loc = locality_mapping(&sizes, 5, 5, 1_500_000).unwrap();
        let snake = snake_mapping(&sizes, 5, 5, 1_500_000).unwrap();
        let (l, s) = (weighted_hop_count(&loc, 5), weighted_hop_count(&snake, 5));
        assert!(l < s, "locality {l} snake {s}");
    }

    #[test]
    fn weighted_hops_by_hand() {
        let mut m = CnnMapping::idle(4);
        m.cores[0] = CoreLoad { neurons: 10, dests: vec![1, 3] };
        m.cores[2] = CoreLoad { neurons: 4, dests: vec![1] };
        // 2x2: d(0,1)=1, d(0,3)=2, d(2,1)=2
        assert_eq!(weighted_hop_count(&m, 2), 10.0 * 1.5 + 4.0 * 2.0);
        assert_eq!(inter_layer_distance(&m, 2), 5);
    }
}
