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

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use emunoc::traffic::load_trace;
use log::info;
use toml::{Table, Value};

use crate::commands::{generate_traces, run_experiment, write_outputs, GenKind};
use crate::config::{apply_override, load_table, set_key, Experiment};
use crate::sweep::{parse_points, run_sweep, sweep_csv, SweepVariable};

#[derive(Debug, Parser)]
#[command(name = "emunoc", version, about = "Cycle-accurate hybrid NoC emulation experiments")]
pub struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Traffic seed; overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Last cycle at which packets may be injected; overrides `run.max_cycle`.
    #[arg(long, global = true)]
    pub max_cycle: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Override a config key, e.g. `--set noc.width=8`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Uniform,
    Cnn,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write its reports.
    Run,
    /// Write a trace file from the configured generator.
    Gen {
        /// Generator; defaults to `traffic.kind`.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Trace file, or a directory when sweeping.
        #[arg(long)]
        out: PathBuf,
        /// One CNN trace per sparsity: `a,b,c` or `start:stop:step`.
        #[arg(long)]
        sparsity_sweep: Option<String>,
    },
    /// Run one experiment per point and write a combined CSV.
    Sweep {
        /// sparsity, flit_rate or mesh_size.
        #[arg(long)]
        variable: SweepVariable,
        /// `a,b,c` or `start:stop:step`.
        #[arg(long)]
        values: String,
        /// CSV path; defaults to `<out-dir>/sweep.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a trace file and report its size.
    ValidateTrace { path: PathBuf },
}

impl Cli {
    /// Config file, then `--set` overrides, then the dedicated flags.
    pub fn experiment(&self) -> Result<Experiment> {
        let mut table = match &self.config {
            Some(p) => load_table(p)?,
            None => Table::new(),
        };
        for spec in &self.set {
            apply_override(&mut table, spec)?;
        }
        if let Some(seed) = self.seed {
            let seed = i64::try_from(seed).context("--seed must fit in 63 bits")?;
            set_key(&mut table, "run.seed", Value::Integer(seed))?;
        }
        if let Some(mc) = self.max_cycle {
            let mc = i64::try_from(mc).context("--max-cycle must fit in 63 bits")?;
            set_key(&mut table, "run.max_cycle", Value::Integer(mc))?;
        }
        if let Some(dir) = &self.out_dir {
            set_key(&mut table, "output.dir", Value::String(dir.to_string_lossy().into_owned()))?;
        }
        match &self.config {
            Some(p) => Experiment::from_table(&table).with_context(|| format!("config {}", p.display())),
            None => Experiment::from_table(&table),
        }
    }
}

pub fn execute(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Run => {
            let exp = cli.experiment()?;
            let outcome = run_experiment(&exp)?;
            write_outputs(&outcome, &exp.out_dir)?;
            println!("{}", outcome.one_line());
            info!("reports written to {}", exp.out_dir.display());
        }
        Command::Gen {
            kind,
            out,
            sparsity_sweep,
        } => {
            let exp = cli.experiment()?;
            let kind = match kind {
                Some(Kind::Uniform) => GenKind::Uniform,
                Some(Kind::Cnn) => GenKind::Cnn,
                None => match exp.traffic.kind() {
                    "uniform" => GenKind::Uniform,
                    "cnn" => GenKind::Cnn,
                    k => bail!("`traffic.kind` = {k} cannot be generated; use uniform or cnn"),
                },
            };
            let points = sparsity_sweep
                .as_deref()
                .map(parse_points)
                .transpose()
                .context("--sparsity-sweep")?;
            let files = generate_traces(&exp, kind, out, points.as_deref())?;
            for f in &files {
                println!("{}", f.display());
            }
        }
        Command::Sweep { variable, values, out } => {
            let exp = cli.experiment()?;
            let points = parse_points(values).context("--values")?;
            let rows = run_sweep(&exp, *variable, &points)?;
            let path = out.clone().unwrap_or_else(|| exp.out_dir.join("sweep.csv"));
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(&path, sweep_csv(&rows)).with_context(|| format!("writing {}", path.display()))?;
            let failed = rows.iter().filter(|r| !r.ok()).count();
            println!("{} points, {failed} failed, written to {}", rows.len(), path.display());
            if failed > 0 {
                for r in rows.iter().filter(|r| !r.ok()) {
                    eprintln!("point {}: {}", r.point, r.status);
                }
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::ValidateTrace { path } => {
            let t = load_trace(path).with_context(|| format!("trace {}", path.display()))?;
            let deps: usize = t.events.iter().map(|e| e.deps.len()).sum();
            println!("ok: {} packets, {} nodes, {deps} dependencies", t.events.len(), t.nodes);
        }
    }
    Ok(ExitCode::SUCCESS)
}
