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

use thiserror::Error;

use crate::engine::EngineError;
use crate::geometry::{GeometryError, Point};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("triangulation needs n to be a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("points {0}, {1} and {2} are collinear")]
    CollinearTriple(Point, Point, Point),
    #[error("no mate found for corridor vertex {0}")]
    NoMateFound(Point),
    #[error("cannot draw {wanted} distinct points with {bits}-bit coordinates")]
    GenerationExhausted { wanted: usize, bits: u32 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for congestion, budget and routing failures: the simulated
    /// protocol broke the model's rules.
    pub fn is_model_violation(&self) -> bool {
        matches!(self, Error::Internal(_))
            || matches!(
                self,
                Error::Engine(
                    EngineError::CongestionViolation { .. }
                        | EngineError::BudgetViolation { .. }
                        | EngineError::InvalidDestination { .. }
                        | EngineError::InfeasibleRouting { .. }
                        | EngineError::NonTermination { .. }
                )
            )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
