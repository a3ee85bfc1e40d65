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

//! Collective operations built on the engine.
//!
//! Broadcast and all-gather are real one-round exchanges. Sorting and routing
//! stand in for the constant-round protocols of the congested clique
//! literature: they are not simulated message by message. Each invocation is
//! charged `primitive_round_cost` rounds and its load preconditions are
//! checked, so an algorithm that builds an infeasible instance fails loudly.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use crate::engine::{Clique, EngineError, NodeId, Payload, PrimitiveKind};
use crate::geometry::Point;

/// Node `root` sends one payload to every other node; afterwards every node
/// (root included) has it.
pub fn broadcast_from<S, F, G>(
    clique: &mut Clique<S>,
    root: NodeId,
    value: F,
    store: G,
) -> Result<(), EngineError>
where
    S: Send,
    F: Fn(&S) -> Payload + Sync,
    G: Fn(&mut S, &Payload) + Sync,
{
    clique.round(|ctx, s| {
        if ctx.id() == root {
            ctx.send_all(value(s));
        }
    })?;
    clique.local(|id, s, inbox| {
        let payload = if id == root {
            value(s)
        } else {
            inbox
                .iter()
                .find(|m| m.src == root)
                .expect("broadcast message missing")
                .payload
                .clone()
        };
        store(s, &payload);
    });
    Ok(())
}

/// Every node contributes one payload; afterwards every node holds all `n`
/// payloads indexed by node.
pub fn all_gather_one<S, F, G>(
    clique: &mut Clique<S>,
    value: F,
    store: G,
) -> Result<(), EngineError>
where
    S: Send,
    F: Fn(NodeId, &S) -> Payload + Sync,
    G: Fn(NodeId, &mut S, Vec<Payload>) + Sync,
{
    let n = clique.n();
    all_gather_within(clique, |_| 1..=n, value, store)
}

/// All-gather inside disjoint groups of consecutive nodes. `group(v)` is the
/// inclusive range of node indices in `v`'s group; the stored vector is
/// indexed by position within the group.
pub fn all_gather_within<S, R, F, G>(
    clique: &mut Clique<S>,
    group: R,
    value: F,
    store: G,
) -> Result<(), EngineError>
where
    S: Send,
    R: Fn(NodeId) -> RangeInclusive<usize> + Sync,
    F: Fn(NodeId, &S) -> Payload + Sync,
    G: Fn(NodeId, &mut S, Vec<Payload>) + Sync,
{
    clique.round(|ctx, s| {
        let me = ctx.id();
        let payload = value(me, s);
        ctx.send_each(group(me).map(NodeId::new), &payload);
    })?;
    clique.local(|id, s, inbox| {
        let members = group(id);
        let mut gathered = Vec::with_capacity(members.clone().count());
        let mut it = inbox.iter().peekable();
        for idx in members {
            let member = NodeId::new(idx);
            if member == id {
                gathered.push(value(id, s));
                continue;
            }
            while it.peek().is_some_and(|m| m.src < member) {
                it.next();
            }
            let m = it.next().expect("all-gather message missing");
            debug_assert_eq!(m.src, member);
            gathered.push(m.payload.clone());
        }
        store(id, s, gathered);
    });
    Ok(())
}

/// Globally sorts the points held by the nodes lexicographically by `(x, y)`.
/// Every node must hold exactly `n` points; afterwards node `i` holds ranks
/// `(i-1)n+1 ..= in`.
pub fn sort_points<S, T, P>(clique: &mut Clique<S>, take: T, put: P) -> Result<(), EngineError>
where
    S: Send,
    T: Fn(&mut S) -> Vec<Point>,
    P: Fn(&mut S, Vec<Point>),
{
    let n = clique.n();
    let mut all = Vec::with_capacity(n * n);
    for (slot, s) in clique.local_all().iter_mut().enumerate() {
        let batch = take(s);
        if batch.len() != n {
            return Err(EngineError::BatchSize {
                node: NodeId::from_slot(slot),
                got: batch.len(),
                expected: n,
            });
        }
        all.extend(batch);
    }
    all.sort_unstable();
    if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
        return Err(EngineError::DuplicatePoint(w[0]));
    }
    clique.note_route_load(if n > 1 { n } else { 0 });
    clique.charge_primitive(PrimitiveKind::Sort)?;
    let mut chunks = all.chunks(n);
    for s in clique.local_all() {
        put(s, chunks.next().unwrap_or(&[]).to_vec());
    }
    Ok(())
}

/// A batch of point-to-point deliveries handed to the routing primitive.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoutingInstance {
    n: usize,
    messages: Vec<(NodeId, NodeId, Payload)>,
}

/// Per-node message counts of a routing instance. Self-addressed messages
/// stay local and are not counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteLoads {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl RouteLoads {
    pub fn max(&self) -> usize {
        self.sources
            .iter()
            .chain(self.sinks.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

impl RoutingInstance {
    pub fn new(n: usize) -> Self {
        RoutingInstance {
            n,
            messages: Vec::new(),
        }
    }

    pub fn push(&mut self, src: NodeId, dst: NodeId, payload: Payload) {
        self.messages.push((src, dst, payload));
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn loads(&self) -> RouteLoads {
        let mut sources = vec![0; self.n];
        let mut sinks = vec![0; self.n];
        for (src, dst, _) in &self.messages {
            if src != dst {
                sources[src.slot()] += 1;
                sinks[dst.slot()] += 1;
            }
        }
        RouteLoads { sources, sinks }
    }

    /// Checks that no node sources or sinks more than `n` messages.
    pub fn check_feasible(&self) -> Result<(), EngineError> {
        let loads = self.loads();
        for (role, counts) in [("sources", &loads.sources), ("sinks", &loads.sinks)] {
            if let Some((slot, &load)) = counts.iter().enumerate().find(|(_, &c)| c > self.n) {
                return Err(EngineError::InfeasibleRouting {
                    node: NodeId::from_slot(slot),
                    role,
                    load,
                    limit: self.n,
                });
            }
        }
        Ok(())
    }

    /// Delivered payloads per destination, each tagged with its source, in
    /// `(source, submission)` order.
    pub fn deliver(self) -> Result<Vec<Vec<(NodeId, Payload)>>, EngineError> {
        self.check_feasible()?;
        let mut messages = self.messages;
        messages.sort_by_key(|(src, _, _)| *src);
        let mut out = vec![Vec::new(); self.n];
        for (src, dst, payload) in messages {
            out[dst.slot()].push((src, payload));
        }
        Ok(out)
    }
}

/// Routes the messages produced by `make` and hands each node its deliveries.
/// One primitive invocation regardless of volume, provided it is feasible.
pub fn route<S, M, A>(clique: &mut Clique<S>, make: M, accept: A) -> Result<(), EngineError>
where
    S: Send,
    M: Fn(NodeId, &mut S) -> Vec<(NodeId, Payload)>,
    A: Fn(NodeId, &mut S, Vec<(NodeId, Payload)>),
{
    let n = clique.n();
    let (coord_bits, budget) = (clique.config().coord_bits, clique.config().msg_bit_budget);
    let round = clique.metrics().rounds_total + 1;
    let mut instance = RoutingInstance::new(n);
    for (slot, s) in clique.local_all().iter_mut().enumerate() {
        let src = NodeId::from_slot(slot);
        for (dst, payload) in make(src, s) {
            let bits = payload.bit_size(coord_bits, n);
            if bits > budget {
                return Err(EngineError::BudgetViolation {
                    round,
                    src,
                    dst,
                    bits,
                    budget,
                });
            }
            instance.push(src, dst, payload);
        }
    }
    let load = instance.loads().max();
    let delivered = instance.deliver()?;
    clique.note_route_load(load);
    if load > 0 {
        clique.charge_primitive(PrimitiveKind::Route)?;
    }
    for (slot, (s, msgs)) in clique.local_all().iter_mut().zip(delivered).enumerate() {
        accept(NodeId::from_slot(slot), s, msgs);
    }
    Ok(())
}

/// Like [`route`], but an instance that would overload some node is split
/// first-fit into as many feasible invocations as needed, each charged
/// separately. Returns the number of invocations.
pub fn route_batched<S, M, A>(
    clique: &mut Clique<S>,
    make: M,
    accept: A,
) -> Result<u64, EngineError>
where
    S: Send,
    M: Fn(NodeId, &mut S) -> Vec<(NodeId, Payload)>,
    A: Fn(NodeId, &mut S, Vec<(NodeId, Payload)>),
{
    let n = clique.n();
    let (coord_bits, budget) = (clique.config().coord_bits, clique.config().msg_bit_budget);
    let round = clique.metrics().rounds_total + 1;
    let mut parts: Vec<RoutingInstance> = Vec::new();
    let mut loads: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut local = RoutingInstance::new(n);
    for (slot, s) in clique.local_all().iter_mut().enumerate() {
        let src = NodeId::from_slot(slot);
        for (dst, payload) in make(src, s) {
            let bits = payload.bit_size(coord_bits, n);
            if bits > budget {
                return Err(EngineError::BudgetViolation {
                    round,
                    src,
                    dst,
                    bits,
                    budget,
                });
            }
            if dst == src {
                local.push(src, dst, payload);
                continue;
            }
            let fit = loads
                .iter()
                .position(|(out, inc)| out[src.slot()] < n && inc[dst.slot()] < n);
            let t = fit.unwrap_or_else(|| {
                parts.push(RoutingInstance::new(n));
                loads.push((vec![0; n], vec![0; n]));
                parts.len() - 1
            });
            loads[t].0[src.slot()] += 1;
            loads[t].1[dst.slot()] += 1;
            parts[t].push(src, dst, payload);
        }
    }
    let invocations = parts.len() as u64;
    let mut delivered = local.deliver()?;
    for part in parts {
        clique.note_route_load(part.loads().max());
        for (slot, msgs) in part.deliver()?.into_iter().enumerate() {
            delivered[slot].extend(msgs);
        }
        clique.charge_primitive(PrimitiveKind::Route)?;
    }
    for (slot, (s, mut msgs)) in clique.local_all().iter_mut().zip(delivered).enumerate() {
        msgs.sort_by_key(|(src, _)| *src);
        accept(NodeId::from_slot(slot), s, msgs);
    }
    Ok(invocations)
}

/// Distinctness check shared by the algorithms' entry points.
pub fn ensure_distinct(batches: &[Vec<Point>]) -> Result<(), EngineError> {
    let mut seen = HashSet::new();
    for p in batches.iter().flatten() {
        if !seen.insert(*p) {
            return Err(EngineError::DuplicatePoint(*p));
        }
    }
    Ok(())
}
