// Copyright 2026 The clique-geom Authors.
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

//! Runs an algorithm over generated inputs and tabulates what it cost.
//!
//! Trial `t` of a spec with seed `s` uses seed `s + t`. Trials run
//! independently (in parallel when enabled) and are reported in trial
//! order, so output depends only on the experiment settings.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{map_range, EngineConfig, ExecMode, RunMetrics, TraceRecord};
use crate::error::{Error, Result};
use crate::generate::{generate, Generator};
use crate::log_hull::new_convex_hull;
use crate::oracles::{hull_oracle, triangulation_validator};
use crate::quick_hull::quick_convex_hull;
use crate::triangulation::triangulate_set;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    QuickHull,
    LogHull,
    Triangulate,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::QuickHull => "quickhull",
            Algorithm::LogHull => "loghull",
            Algorithm::Triangulate => "triangulate",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quickhull" => Ok(Algorithm::QuickHull),
            "loghull" => Ok(Algorithm::LogHull),
            "triangulate" => Ok(Algorithm::Triangulate),
            _ => Err(format!(
                "unknown algorithm `{s}` (quickhull, loghull, triangulate)"
            )),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format `{s}` (csv, json)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub n: usize,
    pub generator: Generator,
    pub seed: u64,
    pub trials: usize,
    /// Whether failed oracle checks should fail the experiment. Checks run
    /// either way.
    pub verify: bool,
    pub primitive_cost: u64,
    pub trace: bool,
    pub exec: ExecMode,
}

impl ExperimentSpec {
    pub fn new(algorithm: Algorithm, n: usize, generator: Generator) -> Self {
        ExperimentSpec {
            algorithm,
            n,
            generator,
            seed: 0,
            trials: 1,
            verify: false,
            primitive_cost: 1,
            trace: false,
            exec: ExecMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.algorithm == Algorithm::Triangulate && !self.n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.n));
        }
        Ok(())
    }
}

/// One row of the results table. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algo: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    pub seed: u64,
    pub h: usize,
    pub rounds: u64,
    pub primitives: u64,
    pub max_outdeg: u32,
    pub max_bits: u32,
    pub verified: bool,
}

/// A trial's record plus everything measured on the way.
#[derive(Clone, Debug)]
pub struct Trial {
    pub record: TrialRecord,
    pub metrics: RunMetrics,
    pub trace: Option<Vec<TraceRecord>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub rounds_min: u64,
    pub rounds_median: u64,
    pub rounds_max: u64,
    pub all_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(trials: Vec<TrialRecord>) -> Self {
        let mut rounds: Vec<u64> = trials.iter().map(|t| t.rounds).collect();
        rounds.sort_unstable();
        let summary = Summary {
            rounds_min: rounds.first().copied().unwrap_or(0),
            rounds_median: rounds.get(rounds.len() / 2).copied().unwrap_or(0),
            rounds_max: rounds.last().copied().unwrap_or(0),
            all_verified: trials.iter().all(|t| t.verified),
        };
        Report { trials, summary }
    }
}

/// Runs one trial with the given seed.
pub fn run_trial(spec: &ExperimentSpec, seed: u64) -> Result<Trial> {
    let general = spec.algorithm == Algorithm::Triangulate;
    let set = generate(&spec.generator, spec.n, seed, general)?;
    let points = set.points();
    let config = EngineConfig::new(spec.n)
        .with_coord_bits(set.coord_bits)
        .with_primitive_cost(spec.primitive_cost)
        .with_seed(seed)
        .with_exec(spec.exec)
        .with_trace(spec.trace);
    let (h, verified, metrics, trace) = match spec.algorithm {
        Algorithm::QuickHull | Algorithm::LogHull => {
            let run = if spec.algorithm == Algorithm::QuickHull {
                quick_convex_hull(config, set.batches)?
            } else {
                new_convex_hull(config, set.batches)?
            };
            let ok = run.output.vertices() == hull_oracle(&points)?;
            (run.output.len(), ok, run.metrics, run.trace)
        }
        Algorithm::Triangulate => {
            let run = triangulate_set(config, set.batches)?;
            let hull = hull_oracle(&points)?;
            let ok = triangulation_validator(&points, &run.triangles(), &hull).passed;
            (hull.len(), ok, run.metrics, run.trace)
        }
    };
    let record = TrialRecord {
        algo: spec.algorithm.name().into(),
        n: spec.n,
        points: points.len(),
        seed,
        h,
        rounds: metrics.rounds_total,
        primitives: metrics.primitive_total(),
        max_outdeg: metrics.max_out_degree(),
        max_bits: metrics.max_message_bits,
        verified: verified && metrics.is_compliant(spec.n),
    };
    Ok(Trial {
        record,
        metrics,
        trace,
    })
}

/// Runs every trial; the first failing trial's error is returned.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Trial>> {
    spec.validate()?;
    map_range(spec.exec, spec.trials, |t| {
        run_trial(spec, spec.seed + t as u64)
    })
    .into_iter()
    .collect()
}

/// Writes the table in the requested format.
pub fn emit<W: Write>(records: &[TrialRecord], format: OutputFormat, out: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no results to write".into()));
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &Report::new(records.to_vec()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// One trace line, tagged with its trial.
#[derive(Serialize)]
struct TraceLine<'a> {
    trial: usize,
    #[serde(flatten)]
    record: &'a TraceRecord,
}

/// Writes all traces as JSON lines.
pub fn emit_traces<W: Write>(trials: &[Trial], mut out: W) -> Result<()> {
    for (trial, t) in trials.iter().enumerate() {
        for record in t.trace.iter().flatten() {
            serde_json::to_writer(&mut out, &TraceLine { trial, record })?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(spec: &ExperimentSpec) -> Vec<TrialRecord> {
        run_experiment(spec)
            .unwrap()
            .into_iter()
            .map(|t| t.record)
            .collect()
    }

    #[test]
    fn quickhull_on_a_circle() {
        let spec = ExperimentSpec::new(Algorithm::QuickHull, 4, Generator::ConvexCircle);
        let r = &records(&spec)[0];
        assert!(r.verified);
        assert_eq!((r.h, r.points), (16, 16));
    }

    #[test]
    fn csv_has_the_documented_header() {
        let spec = ExperimentSpec::new(Algorithm::LogHull, 4, Generator::Uniform);
        let mut buf = Vec::new();
        emit(&records(&spec), OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("algo,n,N,seed,h,rounds,primitives,max_outdeg,max_bits,verified")
        );
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn json_round_trips() {
        let mut spec = ExperimentSpec::new(Algorithm::Triangulate, 4, Generator::GridJitter);
        spec.trials = 3;
        let rows = records(&spec);
        let mut buf = Vec::new();
        emit(&rows, OutputFormat::Json, &mut buf).unwrap();
        let back: Report = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back.trials, rows);
        assert!(back.summary.all_verified);
        assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [0, 1, 2]);
    }

    #[test]
    fn triangulate_needs_a_power_of_two() {
        let spec = ExperimentSpec::new(Algorithm::Triangulate, 3, Generator::Uniform);
        assert!(matches!(
            run_experiment(&spec),
            Err(Error::NotPowerOfTwo(3))
        ));
    }
}
