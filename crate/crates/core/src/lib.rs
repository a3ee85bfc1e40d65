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

//! Congested-clique simulation of distributed planar convex hull and
//! triangulation algorithms.
//!
//! * [`engine`]: lockstep clique simulator with congestion and message-size
//!   accounting.
//! * [`comm`]: broadcast, all-gather, sorting and routing primitives.
//! * [`geometry`]: exact integer predicates and convex chains.
//! * [`quick_hull`]: output-sensitive hull, rounds linear in the hull size.
//! * [`log_hull`]: hull in a logarithmic number of rounds via pairwise bridges.
//! * [`triangulation`]: divide-and-conquer triangulation.
//! * [`oracles`]: sequential ground truth and validators.
//! * [`generate`] and [`experiment`]: the experiment harness behind the CLI.

pub mod comm;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod geometry;
pub mod hull;
pub mod log_hull;
pub mod oracles;
pub mod quick_hull;
pub mod triangulation;

pub use engine::{EngineConfig, ExecMode, NodeId, RunMetrics};
pub use error::{Error, Result};
pub use geometry::Point;
pub use hull::{HullOutput, HullRun};
