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

//! Experiment runner built on the `emunoc` model.

pub mod cli;
pub mod commands;
pub mod config;
pub mod sweep;

pub use cli::{execute, Cli, Command};
pub use commands::{build_events, build_mapping, run_experiment, write_outputs, RunOutcome};
pub use config::{Experiment, MappingSpec, TrafficSpec};
pub use sweep::{parse_points, run_sweep, SweepRow, SweepVariable};
