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

//! Experiment configuration: a TOML file with `noc`, `traffic`, `run` and
//! `output` sections, plus `key=value` overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use emunoc::host::DEFAULT_MAX_CYCLE;
use emunoc::noc::{NocConfig, DEFAULT_PACKET_LEN, DEFAULT_ROUTER_DELAY};
use emunoc::traffic::{DEFAULT_FRAMERATE, DEFAULT_NOC_FREQUENCY};
use toml::{Table, Value};

pub const DEFAULT_OUT_DIR: &str = "emunoc-out";

const KNOWN_KEYS: &[&str] = &[
    "noc.width",
    "noc.height",
    "noc.num_vcs",
    "noc.buffer_depth",
    "noc.router_delay",
    "noc.packet_len",
    "traffic.kind",
    "traffic.flit_rate",
    "traffic.duration",
    "traffic.path",
    "traffic.mapping",
    "traffic.mapping_file",
    "traffic.layers",
    "traffic.neurons_per_core",
    "traffic.sparsity",
    "traffic.framerate",
    "traffic.frequency",
    "run.seed",
    "run.max_cycle",
    "run.record_timing",
    "output.dir",
];

/// Keys holding paths that are resolved against the config file's directory.
const FILE_RELATIVE_KEYS: &[&str] = &["traffic.path", "traffic.mapping_file"];

#[derive(Clone, Debug, PartialEq)]
pub enum MappingSpec {
    Snake { layers: Vec<u64>, neurons_per_core: u64 },
    Locality { layers: Vec<u64>, neurons_per_core: u64 },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrafficSpec {
    Uniform {
        flit_rate: f64,
        duration: u64,
    },
    Trace {
        path: PathBuf,
    },
    Cnn {
        mapping: MappingSpec,
        sparsity: f64,
        duration: u64,
        framerate: Option<f64>,
        frequency: Option<f64>,
    },
}

impl TrafficSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TrafficSpec::Uniform { .. } => "uniform",
            TrafficSpec::Trace { .. } => "trace",
            TrafficSpec::Cnn { .. } => "cnn",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub noc: NocConfig,
    pub traffic: TrafficSpec,
    pub seed: u64,
    pub max_cycle: u64,
    pub record_timing: bool,
    pub out_dir: PathBuf,
}

/// Reads `path` into a table. Relative trace and mapping paths are made
/// relative to the file's directory.
pub fn load_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut table: Table = text.parse().with_context(|| format!("parsing config {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for key in FILE_RELATIVE_KEYS {
        if let Some(Value::String(p)) = lookup(&table, key) {
            let resolved = base.join(p);
            set_key(&mut table, key, Value::String(resolved.to_string_lossy().into_owned()))?;
        }
    }
    Ok(table)
}

fn lookup<'a>(table: &'a Table, key: &str) -> Option<&'a Value> {
    let (section, name) = key.split_once('.')?;
    table.get(section)?.as_table()?.get(name)
}

pub fn set_key(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let (section, name) = key
        .split_once('.')
        .ok_or_else(|| anyhow!("`{key}`: keys take the form section.name"))?;
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    let sec = entry
        .as_table_mut()
        .ok_or_else(|| anyhow!("`{section}` is not a section"))?;
    sec.insert(name.to_string(), value);
    Ok(())
}

/// Applies one `key=value` override. The value is read as a TOML value and
/// falls back to a bare string.
pub fn apply_override(table: &mut Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("--set `{spec}`: expected key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    set_key(table, key, value).with_context(|| format!("--set `{spec}`"))
}

fn check_known(table: &Table) -> Result<()> {
    for (section, v) in table {
        let sec = v
            .as_table()
            .ok_or_else(|| anyhow!("`{section}`: expected a section"))?;
        for name in sec.keys() {
            let key = format!("{section}.{name}");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("unknown key `{key}`");
            }
        }
    }
    Ok(())
}

struct Keys<'a>(&'a Table);

impl Keys<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        lookup(self.0, key)
    }

    fn uint(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(v) => bail!("`{key}`: expected a non-negative integer, found {v}"),
        }
    }

    fn req_uint(&self, key: &str) -> Result<u64> {
        self.uint(key)?.ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.uint(key)?
            .map(|v| usize::try_from(v).map_err(|_| anyhow!("`{key}`: {v} is too large")))
            .transpose()
    }

    fn req_usize(&self, key: &str) -> Result<usize> {
        self.usize(key)?.ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => bail!("`{key}`: expected a number, found {v}"),
        }
    }

    fn req_float(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    fn string(&self, key: &str) -> Result<Option<&str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => bail!("`{key}`: expected a string, found {v}"),
        }
    }

    fn req_string(&self, key: &str) -> Result<&str> {
        self.string(key)?.ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => bail!("`{key}`: expected true or false, found {v}"),
        }
    }

    fn req_uint_list(&self, key: &str) -> Result<Vec<u64>> {
        match self.get(key) {
            None => bail!("missing required key `{key}`"),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as u64),
                    _ => bail!("`{key}`: expected non-negative integers, found {v}"),
                })
                .collect(),
            Some(v) => bail!("`{key}`: expected an array, found {v}"),
        }
    }
}

fn in_unit(key: &str, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        bail!("`{key}`: {v} is outside [0, 1]");
    }
    Ok(v)
}

impl Experiment {
    pub fn from_table(table: &Table) -> Result<Self> {
        check_known(table)?;
        let k = Keys(table);
        let noc = NocConfig {
            width: k.req_usize("noc.width")?,
            height: k.req_usize("noc.height")?,
            num_vcs: k.req_usize("noc.num_vcs")?,
            buffer_depth: k.req_usize("noc.buffer_depth")?,
            router_delay: k.uint("noc.router_delay")?.unwrap_or(DEFAULT_ROUTER_DELAY),
            packet_len: k.usize("noc.packet_len")?.unwrap_or(DEFAULT_PACKET_LEN),
            seed: k.uint("run.seed")?.unwrap_or(0),
        };
        noc.validate().context("`noc`")?;

        let traffic = match k.req_string("traffic.kind")? {
            "uniform" => TrafficSpec::Uniform {
                flit_rate: in_unit("traffic.flit_rate", k.req_float("traffic.flit_rate")?)?,
                duration: k.req_uint("traffic.duration")?,
            },
            "trace" => TrafficSpec::Trace {
                path: PathBuf::from(k.req_string("traffic.path")?),
            },
            "cnn" => {
                let layered = |make: fn(Vec<u64>, u64) -> MappingSpec| -> Result<MappingSpec> {
                    Ok(make(k.req_uint_list("traffic.layers")?, k.req_uint("traffic.neurons_per_core")?))
                };
                let mapping = match k.req_string("traffic.mapping")? {
                    "snake" => layered(|layers, neurons_per_core| MappingSpec::Snake { layers, neurons_per_core })?,
                    "locality" => layered(|layers, neurons_per_core| MappingSpec::Locality { layers, neurons_per_core })?,
                    "file" => MappingSpec::File(PathBuf::from(k.req_string("traffic.mapping_file")?)),
                    other => bail!("`traffic.mapping`: expected snake, locality or file, found `{other}`"),
                };
                TrafficSpec::Cnn {
                    mapping,
                    sparsity: in_unit("traffic.sparsity", k.req_float("traffic.sparsity")?)?,
                    duration: k.req_uint("traffic.duration")?,
                    framerate: k.float("traffic.framerate")?,
                    frequency: k.float("traffic.frequency")?,
                }
            }
            other => bail!("`traffic.kind`: expected uniform, trace or cnn, found `{other}`"),
        };

        Ok(Self {
            seed: noc.seed,
            noc,
            traffic,
            max_cycle: k.uint("run.max_cycle")?.unwrap_or(DEFAULT_MAX_CYCLE),
            record_timing: k.bool("run.record_timing")?.unwrap_or(true),
            out_dir: PathBuf::from(k.string("output.dir")?.unwrap_or(DEFAULT_OUT_DIR)),
        })
    }
}

/// Rates used for CNN traffic when the config does not set them.
pub fn cnn_rates(framerate: Option<f64>, frequency: Option<f64>) -> (f64, f64) {
    (framerate.unwrap_or(DEFAULT_FRAMERATE), frequency.unwrap_or(DEFAULT_NOC_FREQUENCY))
}
