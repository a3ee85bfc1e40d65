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

//! Lockstep simulator of an `n`-node congested clique.
//!
//! A run is a sequence of synchronous rounds. In each round every node's
//! handler sees its own state and the messages delivered to it at the end of
//! the previous round, and may queue at most one message per peer. Queued
//! messages become visible to recipients in the next round, sorted by sender.
//! Local computation is free; only rounds are counted.
//!
//! Handlers get no shared mutable state, so within a round they may run in
//! parallel (see [`ExecMode`]) without affecting results.

mod exec;
mod message;
mod program;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use exec::map_mut;
pub use exec::{map_range, ExecMode};
pub use message::{node_id_bits, Field, Message, Payload, PayloadReader, TAG_BITS};
pub use program::{run_protocol, NodeProgram, Status};

use crate::geometry::{Point, MAX_COORD_BITS};

/// A clique node, numbered from 1 to n.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        assert!(index >= 1, "node ids start at 1");
        NodeId(index as u32)
    }

    /// Node holding zero-based slot `slot`.
    pub fn from_slot(slot: usize) -> Self {
        NodeId(slot as u32 + 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Default coordinate width for a clique of `n` nodes: room for `n^2`
/// distinct points with two spare bits.
pub fn default_coord_bits(n: usize) -> u32 {
    let total = (n as u64).saturating_mul(n as u64).max(1);
    let log = 64 - (total - 1).leading_zeros();
    (log + 2).max(8)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub n: usize,
    pub coord_bits: u32,
    pub msg_bit_budget: u32,
    pub primitive_round_cost: u64,
    pub seed: u64,
    /// Abort once this many rounds have elapsed. `None` means the caller's
    /// default, which is `64 n` for plain protocols.
    pub round_ceiling: Option<u64>,
    pub exec: ExecMode,
    pub trace: bool,
}

impl EngineConfig {
    pub fn new(n: usize) -> Self {
        let coord_bits = default_coord_bits(n);
        EngineConfig {
            n,
            coord_bits,
            msg_bit_budget: 8 * coord_bits + 64,
            primitive_round_cost: 1,
            seed: 0,
            round_ceiling: None,
            exec: ExecMode::default(),
            trace: false,
        }
    }

    /// Sets the coordinate width and resets the budget to its default `8w + 64`.
    pub fn with_coord_bits(mut self, w: u32) -> Self {
        self.coord_bits = w;
        self.msg_bit_budget = 8 * w + 64;
        self
    }

    pub fn with_budget(mut self, bits: u32) -> Self {
        self.msg_bit_budget = bits;
        self
    }

    pub fn with_primitive_cost(mut self, cost: u64) -> Self {
        self.primitive_round_cost = cost;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_round_ceiling(mut self, ceiling: u64) -> Self {
        self.round_ceiling = Some(ceiling);
        self
    }

    pub fn with_exec(mut self, exec: ExecMode) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::Config(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.coord_bits < 2 || self.coord_bits > MAX_COORD_BITS {
            return bad(format!(
                "coordinate width {} outside [2, {MAX_COORD_BITS}]",
                self.coord_bits
            ));
        }
        if self.msg_bit_budget < 2 * self.coord_bits + 8 {
            return bad(format!(
                "message budget {} cannot hold one point and a tag",
                self.msg_bit_budget
            ));
        }
        if self.primitive_round_cost == 0 {
            return bad("primitive round cost must be at least 1".into());
        }
        Ok(())
    }

    pub fn ceiling_or(&self, default: u64) -> u64 {
        self.round_ceiling.unwrap_or(default)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    Sort,
    Route,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Congestion {
        round: u64,
        src: NodeId,
        dst: NodeId,
    },
    Budget {
        round: u64,
        src: NodeId,
        dst: NodeId,
        bits: u32,
        budget: u32,
    },
    InvalidDestination {
        round: u64,
        src: NodeId,
        dst: NodeId,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("expected {expected} node inputs, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("node {src} sent two messages to node {dst} in round {round}")]
    CongestionViolation {
        round: u64,
        src: NodeId,
        dst: NodeId,
    },
    #[error("message {src} -> {dst} in round {round} has {bits} bits, budget is {budget}")]
    BudgetViolation {
        round: u64,
        src: NodeId,
        dst: NodeId,
        bits: u32,
        budget: u32,
    },
    #[error("node {src} addressed invalid destination {dst} in round {round}")]
    InvalidDestination {
        round: u64,
        src: NodeId,
        dst: NodeId,
    },
    #[error("run exceeded the round ceiling of {ceiling}")]
    NonTermination { ceiling: u64 },
    #[error("duplicate input point {0}")]
    DuplicatePoint(Point),
    #[error("routing instance infeasible: node {node} {role} {load} messages, limit {limit}")]
    InfeasibleRouting {
        node: NodeId,
        role: &'static str,
        load: usize,
        limit: usize,
    },
    #[error("node {node} holds {got} points, expected {expected}")]
    BatchSize {
        node: NodeId,
        got: usize,
        expected: usize,
    },
}

impl From<&Violation> for EngineError {
    fn from(v: &Violation) -> Self {
        match *v {
            Violation::Congestion { round, src, dst } => {
                EngineError::CongestionViolation { round, src, dst }
            }
            Violation::Budget {
                round,
                src,
                dst,
                bits,
                budget,
            } => EngineError::BudgetViolation {
                round,
                src,
                dst,
                bits,
                budget,
            },
            Violation::InvalidDestination { round, src, dst } => {
                EngineError::InvalidDestination { round, src, dst }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub rounds_total: u64,
    /// `per_round_out_degree[r][v]`: messages sent by node `v + 1` in
    /// communication round `r + 1`. Rounds charged to primitives have no row.
    #[serde(skip)]
    pub per_round_out_degree: Vec<Vec<u32>>,
    pub max_message_bits: u32,
    pub messages_total: u64,
    pub primitive_invocations: BTreeMap<PrimitiveKind, u64>,
    /// Largest per-node source or sink load seen by any routing invocation.
    pub max_route_load: usize,
    pub violations: Vec<Violation>,
}

impl RunMetrics {
    pub fn max_out_degree(&self) -> u32 {
        self.per_round_out_degree
            .iter()
            .flat_map(|row| row.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn primitive_total(&self) -> u64 {
        self.primitive_invocations.values().sum()
    }

    pub fn is_compliant(&self, n: usize) -> bool {
        self.violations.is_empty() && self.max_out_degree() as usize <= n.saturating_sub(1)
    }
}

/// One line of the optional engine trace.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub round: u64,
    pub src: NodeId,
    pub dst: NodeId,
    pub bits: u32,
    pub tag: u8,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.round, self.src, self.dst, self.bits, self.tag
        )
    }
}

/// Per-node view during one round: identity, inbox and outgoing queue.
pub struct NodeCtx<'a> {
    id: NodeId,
    n: usize,
    round: u64,
    coord_bits: u32,
    budget: u32,
    inbox: &'a [Message],
    sent_to: Vec<bool>,
    outgoing: Vec<Message>,
    violation: Option<Violation>,
}

impl<'a> NodeCtx<'a> {
    fn new(id: NodeId, config: &EngineConfig, round: u64, inbox: &'a [Message]) -> Self {
        NodeCtx {
            id,
            n: config.n,
            round,
            coord_bits: config.coord_bits,
            budget: config.msg_bit_budget,
            inbox,
            sent_to: Vec::new(),
            outgoing: Vec::new(),
            violation: None,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The round being executed, counting from 1.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn inbox(&self) -> &'a [Message] {
        self.inbox
    }

    /// Queues `payload` for `dst`. A second message to the same peer in one
    /// round, an oversized payload or an invalid destination is recorded as a
    /// violation and fails the round.
    pub fn send(&mut self, dst: NodeId, payload: Payload) {
        if self.violation.is_some() {
            return;
        }
        let (round, src) = (self.round, self.id);
        if dst == src || dst.index() > self.n {
            self.violation = Some(Violation::InvalidDestination { round, src, dst });
            return;
        }
        if self.sent_to.is_empty() {
            self.sent_to = vec![false; self.n];
        }
        if std::mem::replace(&mut self.sent_to[dst.slot()], true) {
            self.violation = Some(Violation::Congestion { round, src, dst });
            return;
        }
        let bits = payload.bit_size(self.coord_bits, self.n);
        if bits > self.budget {
            self.violation = Some(Violation::Budget {
                round,
                src,
                dst,
                bits,
                budget: self.budget,
            });
            return;
        }
        self.outgoing.push(Message {
            src,
            dst,
            payload,
            bit_size: bits,
        });
    }

    /// Sends the same payload to every other node.
    pub fn send_all(&mut self, payload: Payload) {
        for slot in 0..self.n {
            let dst = NodeId::from_slot(slot);
            if dst != self.id {
                self.send(dst, payload.clone());
            }
        }
    }

    /// Sends `payload` to every node of `nodes` except this one.
    pub fn send_each(&mut self, nodes: impl IntoIterator<Item = NodeId>, payload: &Payload) {
        for dst in nodes {
            if dst != self.id {
                self.send(dst, payload.clone());
            }
        }
    }
}

struct RoundOutput {
    outgoing: Vec<Message>,
    violation: Option<Violation>,
}

/// Engine state: per-node states, inboxes and metrics.
pub struct Clique<S> {
    config: EngineConfig,
    ceiling: u64,
    states: Vec<S>,
    inboxes: Vec<Vec<Message>>,
    metrics: RunMetrics,
    trace: Option<Vec<TraceRecord>>,
}

impl<S: Send> Clique<S> {
    /// Builds an engine whose round ceiling defaults to `64 n`.
    pub fn new(config: EngineConfig, states: Vec<S>) -> Result<Self, EngineError> {
        let ceiling = config.ceiling_or(64 * config.n as u64);
        Self::with_ceiling(config, states, ceiling)
    }

    pub fn with_ceiling(
        config: EngineConfig,
        states: Vec<S>,
        ceiling: u64,
    ) -> Result<Self, EngineError> {
        config.validate()?;
        if states.len() != config.n {
            return Err(EngineError::InputCount {
                expected: config.n,
                got: states.len(),
            });
        }
        let trace = config.trace.then(Vec::new);
        Ok(Clique {
            inboxes: vec![Vec::new(); config.n],
            config,
            ceiling,
            states,
            metrics: RunMetrics::default(),
            trace,
        })
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn metrics(&self) -> &RunMetrics {
        &self.metrics
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn state(&self, id: NodeId) -> &S {
        &self.states[id.slot()]
    }

    pub fn into_parts(self) -> (Vec<S>, RunMetrics, Option<Vec<TraceRecord>>) {
        (self.states, self.metrics, self.trace)
    }

    pub fn trace(&self) -> Option<&[TraceRecord]> {
        self.trace.as_deref()
    }

    /// One synchronous communication round. Always counted when `n > 1`.
    pub fn round<F>(&mut self, handler: F) -> Result<(), EngineError>
    where
        F: Fn(&mut NodeCtx<'_>, &mut S) + Sync,
    {
        self.execute(handler, |_, _| true).map(|_| ())
    }

    /// Free local computation over the current inboxes; no round elapses.
    pub fn local<F>(&mut self, f: F)
    where
        F: Fn(NodeId, &mut S, &[Message]) + Sync,
    {
        let inboxes = &self.inboxes;
        map_mut(self.config.exec, &mut self.states, |slot, s| {
            f(NodeId::from_slot(slot), s, &inboxes[slot])
        });
    }

    /// Mutable access to every node state at once. Used for driver-level
    /// bookkeeping that is equivalent to free local computation.
    pub fn local_all(&mut self) -> &mut [S] {
        &mut self.states
    }

    /// Charges one invocation of a constant-round primitive.
    pub fn charge_primitive(&mut self, kind: PrimitiveKind) -> Result<(), EngineError> {
        if self.config.n == 1 {
            return Ok(());
        }
        *self.metrics.primitive_invocations.entry(kind).or_insert(0) += 1;
        self.advance(self.config.primitive_round_cost)
    }

    pub(crate) fn note_route_load(&mut self, load: usize) {
        self.metrics.max_route_load = self.metrics.max_route_load.max(load);
    }

    fn advance(&mut self, rounds: u64) -> Result<(), EngineError> {
        self.metrics.rounds_total += rounds;
        if self.metrics.rounds_total > self.ceiling {
            return Err(EngineError::NonTermination {
                ceiling: self.ceiling,
            });
        }
        Ok(())
    }

    /// Runs handlers, validates and delivers. `count` decides from
    /// `(messages sent, states)` whether the round is charged.
    pub(crate) fn execute<F, C>(&mut self, handler: F, count: C) -> Result<usize, EngineError>
    where
        F: Fn(&mut NodeCtx<'_>, &mut S) + Sync,
        C: FnOnce(usize, &[S]) -> bool,
    {
        let round = self.metrics.rounds_total + 1;
        let config = &self.config;
        let inboxes = &self.inboxes;
        let outputs: Vec<RoundOutput> = map_mut(config.exec, &mut self.states, |slot, s| {
            let mut ctx = NodeCtx::new(NodeId::from_slot(slot), config, round, &inboxes[slot]);
            handler(&mut ctx, s);
            RoundOutput {
                outgoing: ctx.outgoing,
                violation: ctx.violation,
            }
        });

        if let Some(v) = outputs.iter().find_map(|o| o.violation.clone()) {
            let err = EngineError::from(&v);
            self.metrics.violations.push(v);
            return Err(err);
        }

        let mut next: Vec<Vec<Message>> = vec![Vec::new(); self.config.n];
        let mut degrees = vec![0u32; self.config.n];
        let mut sent = 0usize;
        for (slot, out) in outputs.into_iter().enumerate() {
            degrees[slot] = out.outgoing.len() as u32;
            for m in out.outgoing {
                sent += 1;
                self.metrics.max_message_bits = self.metrics.max_message_bits.max(m.bit_size);
                if let Some(trace) = self.trace.as_mut() {
                    trace.push(TraceRecord {
                        round,
                        src: m.src,
                        dst: m.dst,
                        bits: m.bit_size,
                        tag: m.payload.first_tag(),
                    });
                }
                next[m.dst.slot()].push(m);
            }
        }
        self.inboxes = next;
        self.metrics.messages_total += sent as u64;

        if self.config.n > 1 && count(sent, &self.states) {
            self.metrics.per_round_out_degree.push(degrees);
            self.advance(1)?;
        }
        Ok(sent)
    }
}
