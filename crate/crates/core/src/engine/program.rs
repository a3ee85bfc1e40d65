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

use super::{Clique, EngineConfig, EngineError, NodeCtx, NodeId, RunMetrics};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Continue,
    Halt,
}

/// A deterministic node program: the same code runs at every node and sees
/// only its own state and inbox.
pub trait NodeProgram: Sync {
    type Input;
    type State: Send;
    type Output;

    fn init(&self, id: NodeId, input: Self::Input) -> Self::State;

    /// One round of local computation. Messages queued on `ctx` arrive at
    /// their recipients' next step.
    fn step(&self, ctx: &mut NodeCtx<'_>, state: &mut Self::State) -> Status;

    fn output(&self, id: NodeId, state: Self::State) -> Self::Output;
}

/// Runs `program` on every node until all nodes halt.
///
/// A step counts as a round if any message was sent or any node is still
/// running afterwards; a final silent step in which everyone halts is free.
pub fn run_protocol<P: NodeProgram>(
    config: EngineConfig,
    program: &P,
    inputs: Vec<P::Input>,
) -> Result<(Vec<P::Output>, RunMetrics), EngineError> {
    if inputs.len() != config.n {
        return Err(EngineError::InputCount {
            expected: config.n,
            got: inputs.len(),
        });
    }
    let states = inputs
        .into_iter()
        .enumerate()
        .map(|(slot, input)| (program.init(NodeId::from_slot(slot), input), true))
        .collect();
    let mut clique = Clique::new(config, states)?;
    let mut steps = 0u64;
    while clique.states().iter().any(|(_, running)| *running) {
        steps += 1;
        if clique.n() == 1 && steps > clique.ceiling {
            // no rounds are ever charged without peers, so bound the steps
            return Err(EngineError::NonTermination {
                ceiling: clique.ceiling,
            });
        }
        clique.execute(
            |ctx, (state, running)| {
                if *running && program.step(ctx, state) == Status::Halt {
                    *running = false;
                }
            },
            |sent, states| sent > 0 || states.iter().any(|(_, running)| *running),
        )?;
    }
    let (states, metrics, _) = clique.into_parts();
    let outputs = states
        .into_iter()
        .enumerate()
        .map(|(slot, (s, _))| program.output(NodeId::from_slot(slot), s))
        .collect();
    Ok((outputs, metrics))
}
