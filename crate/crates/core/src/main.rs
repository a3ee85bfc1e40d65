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

//! Command-line experiment runner.
//!
//! Exit status: 0 on success, 1 when `--verify` is set and some trial failed
//! its oracle check, 2 for usage and precondition errors, 3 when a run broke
//! the model's rules or an internal invariant.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use clique_geom::experiment::{
    emit, emit_traces, run_experiment, Algorithm, ExperimentSpec, OutputFormat,
};
use clique_geom::generate::Generator;
use clique_geom::{Error, ExecMode};

#[derive(Parser, Debug)]
#[command(
    name = "clique-geom",
    version,
    about = "Distributed hull and triangulation experiments"
)]
struct Args {
    /// quickhull, loghull or triangulate
    #[arg(long)]
    algo: Algorithm,
    /// Number of clique nodes; each holds n points.
    #[arg(long)]
    n: usize,
    /// uniform, convex-circle, parabola, grid-jitter or file:PATH
    #[arg(long = "gen", default_value = "uniform")]
    generator: Generator,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Exit with status 1 unless every trial passes its oracle check.
    #[arg(long)]
    verify: bool,
    /// Results file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Write every message of every trial to this file as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Rounds charged per sorting or routing invocation.
    #[arg(long, default_value_t = 1)]
    primitive_cost: u64,
    /// Run node handlers and trials on one thread.
    #[arg(long)]
    sequential: bool,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_model_violation() || matches!(e, Error::NoMateFound(_)) {
        3
    } else {
        2
    }
}

fn run(args: Args) -> Result<bool, Error> {
    let spec = ExperimentSpec {
        algorithm: args.algo,
        n: args.n,
        generator: args.generator,
        seed: args.seed,
        trials: args.trials,
        verify: args.verify,
        primitive_cost: args.primitive_cost,
        trace: args.trace.is_some(),
        exec: if args.sequential {
            ExecMode::Sequential
        } else {
            ExecMode::Parallel
        },
    };
    let trials = run_experiment(&spec)?;
    let records: Vec<_> = trials.iter().map(|t| t.record.clone()).collect();
    match &args.out {
        Some(path) => emit(&records, args.format, BufWriter::new(File::create(path)?))?,
        None => emit(&records, args.format, io::stdout().lock())?,
    }
    if let Some(path) = &args.trace {
        let mut w = BufWriter::new(File::create(path)?);
        emit_traces(&trials, &mut w)?;
        w.flush()?;
    }
    Ok(!spec.verify || records.iter().all(|r| r.verified))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
