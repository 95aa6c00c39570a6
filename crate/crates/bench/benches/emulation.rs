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

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use emunoc::host::{run, RunOptions};
use emunoc::traffic::{locality_mapping, snake_mapping};
use emunoc::transactor::{Descriptor, InjectionFrame};
use emunoc_bench::uniform_workload;

const CYCLES: u64 = 5_000;

fn quiet() -> RunOptions {
    RunOptions {
        record_timing: false,
        ..Default::default()
    }
}

// Emulated cycles per second against mesh size and load.
fn emulation_rate(c: &mut Criterion) {
    let mut g = c.benchmark_group("emulation");
    g.sample_size(10);
    for k in [5, 8, 13] {
        for rate in [0.005, 0.05] {
            let (cfg, events) = uniform_workload(k, rate, CYCLES);
            g.throughput(Throughput::Elements(CYCLES));
            g.bench_with_input(BenchmarkId::new(format!("{k}x{k}"), rate), &events, |b, ev| {
                b.iter(|| run(ev.clone(), &cfg, quiet()).unwrap())
            });
        }
    }
    g.finish();
}

fn frame_codec(c: &mut Criterion) {
    let frame = InjectionFrame {
        injection_cycle: 123_456,
        descriptors: (0..64).map(|i| Descriptor { packet_id: i, src: 3, dst: 60, len: 5 }).collect(),
    };
    let mut buf = Vec::new();
    frame.encode(&mut buf);
    c.bench_function("injection_frame_encode", |b| {
        b.iter(|| {
            let mut out = Vec::with_capacity(buf.len());
            frame.encode(&mut out);
            out
        })
    });
    c.bench_function("injection_frame_decode", |b| b.iter(|| InjectionFrame::decode(&buf).unwrap()));
}

fn mappings(c: &mut Criterion) {
    let layers = [9_000_000, 9_000_000, 9_000_000];
    c.bench_function("snake_mapping_5x5", |b| b.iter(|| snake_mapping(&layers, 5, 5, 1_500_000).unwrap()));
    c.bench_function("locality_mapping_5x5", |b| {
        b.iter(|| locality_mapping(&layers, 5, 5, 1_500_000).unwrap())
    });
}

criterion_group!(benches, emulation_rate, frame_codec, mappings);
criterion_main!(benches);
