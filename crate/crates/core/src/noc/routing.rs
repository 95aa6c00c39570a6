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

use super::config::{NocConfig, NodeId, Port};

/// Dimension-ordered routing: resolve X completely, then Y.
pub fn route_xy(current: NodeId, dst: NodeId, config: &NocConfig) -> Port {
    let here = config.coord(current);
    let there = config.coord(dst);
    if there.x > here.x {
        Port::East
    } else if there.x < here.x {
        Port::West
    } else if there.y > here.y {
        Port::South
    } else if there.y < here.y {
        Port::North
    } else {
        Port::Local
    }
}
