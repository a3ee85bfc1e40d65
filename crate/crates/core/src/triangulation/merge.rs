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

//! The distributed driver.
//!
//! Phase `i` works on groups of `2^(i+1)` consecutive nodes, each the union
//! of a left and a right half already triangulated on their own:
//!
//! 1. Group hull: pairwise bridge searches over the nodes' shares of the two
//!    half hulls, upper and lower, then pruning.
//! 2. One all-gather of each node's extreme surviving vertices gives the
//!    four bridge endpoints.
//! 3. Every node cuts its share of the corridor out of the old half hulls;
//!    one all-gather of counts fixes every vertex's boundary position, one
//!    routing packs the corridor evenly onto the group's nodes and one round
//!    tells every node the neighbours of its first and last vertex.
//! 4. Recursion levels, all corridors of the phase in lockstep: the holder
//!    of the median broadcasts it, the other nodes send their best valid
//!    mate, the holder announces the split, and one routing moves both
//!    halves onto disjoint node ranges sized in proportion. A corridor that
//!    fits on one node is finished locally.

use serde::{Deserialize, Serialize};

use crate::comm::{all_gather_one, all_gather_within, route_batched, sort_points};
use crate::engine::{Clique, EngineConfig, NodeId, Payload, RunMetrics, TraceRecord};
use crate::error::{Error, Result};
use crate::geometry::{local_lower_hull, local_upper_hull, Point};
use crate::hull::{check_inputs, HullSide};
use crate::log_hull::{pairwise_bridges, step_bound, BridgeWork, HasBridgeWork};

use super::polygon::{mate_key, mate_valid, place, Chain, MergePolygon, Shape};
use super::{local_triangulation, PhasePlan, Triangle};

const TAG_ENDS: u8 = 30;
const TAG_FACING: u8 = 31;
const TAG_COUNTS: u8 = 32;
const TAG_PACK: u8 = 33;
const TAG_NEIGHBOURS: u8 = 34;
const TAG_ACTIVE: u8 = 35;
const TAG_MEDIAN: u8 = 36;
const TAG_CANDIDATE: u8 = 37;
const TAG_SPLIT: u8 = 38;
const TAG_MOVE: u8 = 39;
const TAG_TRIANGLE: u8 = 40;

/// What one merge phase did, for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub phase: u32,
    pub group_size: usize,
    /// Largest corridor of the phase, in boundary vertices.
    pub max_corridor: usize,
    /// Recursion levels needed before every corridor fit on one node.
    pub levels: u32,
}

/// Result of one distributed triangulation run.
#[derive(Clone, Debug)]
pub struct TriangulationRun {
    /// Triangles, at most `⌈T/n⌉` per node.
    pub batches: Vec<Vec<Triangle>>,
    pub metrics: RunMetrics,
    pub trace: Option<Vec<TraceRecord>>,
    pub phases: Vec<PhaseStats>,
}

impl TriangulationRun {
    pub fn triangles(&self) -> Vec<Triangle> {
        self.batches.iter().flatten().copied().collect()
    }
}

/// One corridor vertex with its boundary neighbours.
#[derive(Copy, Clone, Debug)]
struct Slot {
    pos: usize,
    v: Point,
    prev: Point,
    next: Point,
}

/// The part of a corridor held by one node. Positions are spread evenly:
/// node `first + j` holds positions `j·cap ..`.
#[derive(Clone, Debug)]
struct Piece {
    shape: Shape,
    first: usize,
    nodes: usize,
    cap: usize,
    slots: Vec<Slot>,
}

impl Piece {
    fn laid_out(shape: Shape, first: usize, nodes: usize) -> Piece {
        let e = shape.len().max(1);
        let cap = e.div_ceil(nodes);
        Piece {
            shape,
            first,
            nodes: e.div_ceil(cap),
            cap,
            slots: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.shape.len()
    }

    fn holder(&self, pos: usize) -> NodeId {
        NodeId::new(self.first + pos / self.cap)
    }

    fn members(&self) -> impl Iterator<Item = NodeId> {
        (self.first..self.first + self.nodes).map(NodeId::new)
    }

    fn contains(&self, id: NodeId) -> bool {
        (self.first..self.first + self.nodes).contains(&id.index())
    }

    fn slot(&self, pos: usize) -> Option<&Slot> {
        self.slots
            .binary_search_by_key(&pos, |s| s.pos)
            .ok()
            .map(|k| &self.slots[k])
    }

    fn median_pos(&self) -> (Chain, usize, usize) {
        let (chain, idx) = self.shape.median();
        (chain, idx, self.shape.position(chain, idx))
    }

    /// Layouts of the two halves after cutting at `(i, k)`.
    fn halves(&self, i: usize, k: usize) -> (Piece, Piece) {
        let (s1, s2) = self.shape.split(i, k);
        let (e1, e2) = (s1.len(), s2.len());
        let total = e1 + e2;
        let k1 = ((2 * self.nodes * e1 + total) / (2 * total)).clamp(1, self.nodes - 1);
        (
            Piece::laid_out(s1, self.first, k1),
            Piece::laid_out(s2, self.first + k1, self.nodes - k1),
        )
    }
}

#[derive(Copy, Clone, Debug)]
struct Facing {
    upper_left: Point,
    upper_right: Point,
    lower_left: Point,
    lower_right: Point,
}

#[derive(Copy, Clone, Debug)]
struct Split {
    i: usize,
    k: usize,
    a: Point,
    b: Point,
}

#[derive(Debug, Default)]
struct TriNode {
    batch: Vec<Point>,
    ends: Vec<(Point, Point)>,
    /// This node's vertices on its current group's upper and lower hull.
    hull_up: Vec<Point>,
    hull_low: Vec<Point>,
    new_up: Vec<Point>,
    new_low: Vec<Point>,
    work: BridgeWork,
    facing: Option<Facing>,
    /// This node's two runs of corridor vertices, in boundary order.
    runs: [Vec<Point>; 2],
    placed: Vec<(usize, Point)>,
    piece: Option<Piece>,
    any_active: bool,
    median: Option<[Point; 3]>,
    split: Option<Split>,
    tris: Vec<Triangle>,
    tri_counts: Vec<u64>,
    out: Vec<(u64, Triangle)>,
    err: Option<Error>,
}

impl HasBridgeWork for TriNode {
    fn work(&mut self) -> &mut BridgeWork {
        &mut self.work
    }

    fn work_ref(&self) -> &BridgeWork {
        &self.work
    }
}

fn check(clique: &mut Clique<TriNode>) -> Result<()> {
    match clique.local_all().iter_mut().find_map(|s| s.err.take()) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn triangle(a: Point, b: Point, c: Point) -> Result<Triangle> {
    Triangle::ccw(a, b, c).ok_or(Error::CollinearTriple(a, b, c))
}

/// Triangulates `n²` points held `n` per node. `n` must be a power of two
/// and the points in general position.
pub fn triangulate_set(config: EngineConfig, inputs: Vec<Vec<Point>>) -> Result<TriangulationRun> {
    config.validate()?;
    let n = config.n;
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    check_inputs(&config, &inputs)?;
    let phases = n.ilog2();
    let ceiling = config.ceiling_or(64 * n as u64 * u64::from(phases.max(1)));
    let states = inputs
        .into_iter()
        .map(|batch| TriNode {
            batch,
            ..TriNode::default()
        })
        .collect();
    let mut clique = Clique::with_ceiling(config, states, ceiling)?;

    sort_points(
        &mut clique,
        |s| std::mem::take(&mut s.batch),
        |s, b| s.batch = b,
    )?;
    all_gather_one(
        &mut clique,
        |_, s| {
            Payload::new()
                .tag(TAG_ENDS)
                .point(s.batch[0])
                .point(s.batch[s.batch.len() - 1])
        },
        |_, s, all| {
            s.ends = all
                .iter()
                .map(|p| {
                    let mut r = p.reader();
                    r.tag();
                    (r.point(), r.point())
                })
                .collect();
        },
    )?;
    clique.local(|_, s, _| {
        match local_triangulation(&s.batch) {
            Ok(t) => s.tris = t,
            Err(e) => s.err = Some(e),
        }
        s.hull_up = local_upper_hull(&s.batch).into_vertices();
        s.hull_low = local_lower_hull(&s.batch).into_vertices();
    });
    check(&mut clique)?;

    let mut stats = Vec::new();
    for phase in 0..phases {
        stats.push(merge_phase(&mut clique, &PhasePlan::new(phase, n))?);
    }
    let batches = compact_triangles(&mut clique)?;
    let (_, metrics, trace) = clique.into_parts();
    Ok(TriangulationRun {
        batches,
        metrics,
        trace,
        phases: stats,
    })
}

fn merge_phase(clique: &mut Clique<TriNode>, plan: &PhasePlan) -> Result<PhaseStats> {
    let n = clique.n();
    let group = |id: NodeId| plan.group_of(id.index());
    let half = plan.group_size() / 2;
    let steps = step_bound(n, n);

    clique.local(|_, s, _| s.work.chain = s.hull_up.clone());
    pairwise_bridges(clique, HullSide::Upper, group, steps)?;
    clique.local(|_, s, _| {
        s.new_up = s.work.survivors();
        s.work.chain = s.hull_low.iter().rev().map(|p| p.rotated()).collect();
    });
    pairwise_bridges(clique, HullSide::Lower, group, steps)?;
    clique.local(|_, s, _| {
        let mut low: Vec<Point> = s.work.survivors().into_iter().map(Point::rotated).collect();
        low.sort_unstable();
        s.new_low = low;
    });

    // bridge endpoints: innermost survivors of each half
    all_gather_within(
        clique,
        group,
        |id, s| {
            let pick = |v: &[Point]| {
                if plan.in_left_half(id.index()) {
                    v.last().copied()
                } else {
                    v.first().copied()
                }
            };
            let (up, low) = (pick(&s.new_up), pick(&s.new_low));
            let flags = u8::from(up.is_some()) | u8::from(low.is_some()) << 1;
            Payload::new()
                .tag(TAG_FACING)
                .tag(flags)
                .points(up)
                .points(low)
        },
        |_, s, all| {
            let ext: Vec<(Option<Point>, Option<Point>)> = all
                .iter()
                .map(|p| {
                    let mut r = p.reader();
                    r.tag();
                    let flags = r.tag();
                    let up = (flags & 1 != 0).then(|| r.point());
                    let low = (flags & 2 != 0).then(|| r.point());
                    (up, low)
                })
                .collect();
            let (l, r) = ext.split_at(ext.len() / 2);
            let facing = (|| {
                Some(Facing {
                    upper_left: l.iter().filter_map(|e| e.0).max()?,
                    lower_left: l.iter().filter_map(|e| e.1).max()?,
                    upper_right: r.iter().filter_map(|e| e.0).min()?,
                    lower_right: r.iter().filter_map(|e| e.1).min()?,
                })
            })();
            if facing.is_none() {
                s.err = Some(Error::Internal("group hull misses a half".into()));
            }
            s.facing = facing;
        },
    )?;
    check(clique)?;

    // each node's share of the corridor, cut from the old half hulls
    clique.local(|id, s, _| {
        let f = s.facing.expect("checked above");
        let start = *plan.group_of(id.index()).start();
        let max_left = s.ends[start + half - 2].1;
        let min_right = s.ends[start + half - 1].0;
        s.runs = if plan.in_left_half(id.index()) {
            [
                s.hull_up
                    .iter()
                    .copied()
                    .filter(|&p| p >= f.upper_left)
                    .collect(),
                s.hull_low
                    .iter()
                    .rev()
                    .copied()
                    .filter(|&p| p >= f.lower_left && p < max_left)
                    .collect(),
            ]
        } else {
            [
                s.hull_low
                    .iter()
                    .rev()
                    .copied()
                    .filter(|&p| p > min_right && p <= f.lower_right)
                    .collect(),
                s.hull_up
                    .iter()
                    .copied()
                    .filter(|&p| p <= f.upper_right)
                    .collect(),
            ]
        };
    });
    all_gather_within(
        clique,
        group,
        |_, s| {
            Payload::new()
                .tag(TAG_COUNTS)
                .count(s.runs[0].len() as u64)
                .count(s.runs[1].len() as u64)
        },
        |id, s, all| {
            let c: Vec<(usize, usize)> = all
                .iter()
                .map(|p| {
                    let mut r = p.reader();
                    r.tag();
                    (r.count() as usize, r.count() as usize)
                })
                .collect();
            let (l, r) = c.split_at(half);
            let a_up: usize = l.iter().map(|x| x.0).sum();
            let a_low: usize = l.iter().map(|x| x.1).sum();
            let b_low: usize = r.iter().map(|x| x.0).sum();
            let b_up: usize = r.iter().map(|x| x.1).sum();
            let shape = Shape {
                left: a_up + a_low,
                right: b_low + b_up,
            };
            let start = *plan.group_of(id.index()).start();
            let k = id.index() - start;
            let (base0, base1) = if k < half {
                (
                    l[..k].iter().map(|x| x.0).sum::<usize>(),
                    a_up + l[k + 1..].iter().map(|x| x.1).sum::<usize>(),
                )
            } else {
                let k = k - half;
                (
                    shape.left + r[k + 1..].iter().map(|x| x.0).sum::<usize>(),
                    shape.left + b_low + r[..k].iter().map(|x| x.1).sum::<usize>(),
                )
            };
            let [run0, run1] = std::mem::take(&mut s.runs);
            s.placed = (base0..).zip(run0).chain((base1..).zip(run1)).collect();
            s.piece = Some(Piece::laid_out(shape, start, plan.group_size()));
        },
    )?;
    let max_corridor = clique
        .states()
        .iter()
        .filter_map(|s| s.piece.as_ref().map(Piece::len))
        .max()
        .unwrap_or(0);

    route_batched(
        clique,
        |_, s| {
            let piece = s.piece.as_ref().expect("corridor laid out");
            s.placed
                .drain(..)
                .map(|(pos, p)| {
                    (
                        piece.holder(pos),
                        Payload::new().tag(TAG_PACK).point(p).count(pos as u64),
                    )
                })
                .collect()
        },
        |id, s, msgs| {
            let Some(piece) = s.piece.as_mut().filter(|p| p.contains(id)) else {
                s.piece = None;
                return;
            };
            piece.slots = msgs
                .into_iter()
                .map(|(_, payload)| {
                    let mut r = payload.reader();
                    r.tag();
                    let v = r.point();
                    let pos = r.count() as usize;
                    Slot {
                        pos,
                        v,
                        prev: v,
                        next: v,
                    }
                })
                .collect();
            piece.slots.sort_unstable_by_key(|s| s.pos);
        },
    )?;
    exchange_neighbours(clique)?;

    let mut levels = 0;
    loop {
        clique.local(|_, s, _| resolve(s));
        check(clique)?;
        all_gather_one(
            clique,
            |_, s| {
                Payload::new()
                    .tag(TAG_ACTIVE)
                    .tag(u8::from(s.piece.is_some()))
            },
            |_, s, all| {
                s.any_active = all.iter().any(|p| {
                    let mut r = p.reader();
                    r.tag();
                    r.tag() != 0
                });
            },
        )?;
        if !clique.states()[0].any_active {
            break;
        }
        split_level(clique)?;
        levels += 1;
    }

    clique.local(|_, s, _| {
        s.hull_up = std::mem::take(&mut s.new_up);
        s.hull_low = std::mem::take(&mut s.new_low);
    });
    Ok(PhaseStats {
        phase: plan.phase,
        group_size: plan.group_size(),
        max_corridor,
        levels,
    })
}

/// One round: every node learns the boundary neighbours of its first and
/// last corridor vertex from the nodes holding them.
fn exchange_neighbours(clique: &mut Clique<TriNode>) -> Result<()> {
    fn around(piece: &Piece) -> (NodeId, NodeId) {
        let e = piece.len();
        let first = piece.slots[0].pos;
        let last = piece.slots[piece.slots.len() - 1].pos;
        (
            piece.holder((first + e - 1) % e),
            piece.holder((last + 1) % e),
        )
    }
    clique.round(|ctx, s| {
        let Some(piece) = s.piece.as_ref() else {
            return;
        };
        let (before, after) = around(piece);
        let payload = Payload::new()
            .tag(TAG_NEIGHBOURS)
            .point(piece.slots[0].v)
            .point(piece.slots[piece.slots.len() - 1].v);
        let me = ctx.id();
        if before != me {
            ctx.send(before, payload.clone());
        }
        if after != me && after != before {
            ctx.send(after, payload);
        }
    })?;
    clique.local(|id, s, inbox| {
        let Some(piece) = s.piece.as_mut() else {
            return;
        };
        let (before, after) = around(piece);
        let ends_of = |node: NodeId| {
            let m = inbox
                .iter()
                .find(|m| m.src == node)
                .expect("neighbour message missing");
            let mut r = m.payload.reader();
            r.tag();
            (r.point(), r.point())
        };
        let slots = &mut piece.slots;
        let count = slots.len();
        let head = if before == id {
            slots[count - 1].v
        } else {
            ends_of(before).1
        };
        let tail = if after == id {
            slots[0].v
        } else {
            ends_of(after).0
        };
        let vs: Vec<Point> = slots.iter().map(|s| s.v).collect();
        for (j, slot) in slots.iter_mut().enumerate() {
            slot.prev = if j == 0 { head } else { vs[j - 1] };
            slot.next = if j + 1 == count { tail } else { vs[j + 1] };
        }
    });
    Ok(())
}

/// Free local work: finishes corridors that are trivial or sit on one node.
fn resolve(s: &mut TriNode) {
    let Some(piece) = s.piece.as_ref() else {
        return;
    };
    let done = match piece.len() {
        0..=2 => Ok(None),
        3 => match piece.slot(0) {
            Some(x) => triangle(x.v, x.next, x.prev).map(|t| Some(vec![t])),
            None => Ok(None),
        },
        _ if piece.nodes == 1 => {
            let boundary: Vec<Point> = piece.slots.iter().map(|x| x.v).collect();
            MergePolygon::from_boundary(piece.shape, &boundary)
                .triangulate()
                .map(Some)
        }
        _ => return,
    };
    match done {
        Ok(tris) => s.tris.extend(tris.into_iter().flatten()),
        Err(e) => s.err = Some(e),
    }
    s.piece = None;
}

/// One recursion level for every active corridor: median broadcast, mate
/// candidates, split announcement and the synchronized move.
fn split_level(clique: &mut Clique<TriNode>) -> Result<()> {
    // the median's holder tells the corridor's other nodes
    clique.round(|ctx, s| {
        let Some(piece) = s.piece.as_ref() else {
            return;
        };
        let (_, _, pos) = piece.median_pos();
        if let Some(x) = piece.slot(pos) {
            let payload = Payload::new()
                .tag(TAG_MEDIAN)
                .point(x.v)
                .point(x.prev)
                .point(x.next);
            ctx.send_each(piece.members(), &payload);
        }
    })?;
    clique.local(|_, s, inbox| {
        let Some(piece) = s.piece.as_ref() else {
            return;
        };
        let (_, _, pos) = piece.median_pos();
        s.median = Some(match piece.slot(pos) {
            Some(x) => [x.v, x.prev, x.next],
            None => {
                let holder = piece.holder(pos);
                let m = inbox
                    .iter()
                    .find(|m| m.src == holder)
                    .expect("median message missing");
                let mut r = m.payload.reader();
                r.tag();
                [r.point(), r.point(), r.point()]
            }
        });
    });

    // every node offers its best valid mate to the median's holder
    fn local_best(piece: &Piece, [v, prev, next]: [Point; 3]) -> Option<(usize, Point)> {
        let (chain, _, _) = piece.median_pos();
        piece
            .slots
            .iter()
            .filter(|u| piece.shape.locate(u.pos).0 != chain)
            .filter(|u| mate_valid(v, (prev, next), u.v, (u.prev, u.next)))
            .min_by_key(|u| (mate_key(v, next, u.v), u.pos))
            .map(|u| (u.pos, u.v))
    }
    clique.round(|ctx, s| {
        let (Some(piece), Some(median)) = (s.piece.as_ref(), s.median) else {
            return;
        };
        let (_, _, pos) = piece.median_pos();
        let master = piece.holder(pos);
        if master == ctx.id() {
            return;
        }
        if let Some((upos, u)) = local_best(piece, median) {
            ctx.send(
                master,
                Payload::new()
                    .tag(TAG_CANDIDATE)
                    .point(u)
                    .count(upos as u64),
            );
        }
    })?;
    clique.local(|id, s, inbox| {
        let (Some(piece), Some([v, prev, next])) = (s.piece.as_ref(), s.median) else {
            return;
        };
        let (chain, idx, pos) = piece.median_pos();
        if piece.holder(pos) != id {
            return;
        }
        let received = inbox
            .iter()
            .filter(|m| m.payload.first_tag() == TAG_CANDIDATE)
            .map(|m| {
                let mut r = m.payload.reader();
                r.tag();
                let u = r.point();
                (r.count() as usize, u)
            });
        let best = local_best(piece, [v, prev, next])
            .into_iter()
            .chain(received)
            .min_by_key(|&(upos, u)| (mate_key(v, next, u), upos));
        let shape = piece.shape;
        s.split = match best {
            Some((upos, u)) => {
                let (_, j) = shape.locate(upos);
                Some(match chain {
                    Chain::Left => Split {
                        i: idx,
                        k: j,
                        a: v,
                        b: u,
                    },
                    Chain::Right => Split {
                        i: j,
                        k: idx,
                        a: u,
                        b: v,
                    },
                })
            }
            // the one quadrilateral whose median may see nothing: the
            // other diagonal works
            None if shape == (Shape { left: 2, right: 2 }) => Some(Split {
                i: 1,
                k: 0,
                a: next,
                b: prev,
            }),
            None => {
                s.err = Some(Error::NoMateFound(v));
                None
            }
        };
    });
    check(clique)?;

    clique.round(|ctx, s| {
        let (Some(piece), Some(split)) = (s.piece.as_ref(), s.split) else {
            return;
        };
        let payload = Payload::new()
            .tag(TAG_SPLIT)
            .count(split.i as u64)
            .count(split.k as u64)
            .point(split.a)
            .point(split.b);
        ctx.send_each(piece.members(), &payload);
    })?;
    clique.local(|id, s, inbox| {
        let Some(piece) = s.piece.as_ref() else {
            return;
        };
        let (_, _, pos) = piece.median_pos();
        let master = piece.holder(pos);
        if master == id {
            return;
        }
        let m = inbox
            .iter()
            .find(|m| m.src == master)
            .expect("split message missing");
        let mut r = m.payload.reader();
        r.tag();
        s.split = Some(Split {
            i: r.count() as usize,
            k: r.count() as usize,
            a: r.point(),
            b: r.point(),
        });
    });

    route_batched(
        clique,
        |_, s| {
            let (Some(piece), Some(split)) = (s.piece.as_ref(), s.split) else {
                return Vec::new();
            };
            let (first, second) = piece.halves(split.i, split.k);
            let mut out = Vec::with_capacity(piece.slots.len() + 1);
            for x in &piece.slots {
                let pl = place(
                    piece.shape,
                    (split.i, split.k),
                    (split.a, split.b),
                    x.pos,
                    x.prev,
                    x.next,
                );
                for (half, to) in [(&first, pl.first), (&second, pl.second)] {
                    if let Some((pos, prev, next)) = to {
                        out.push((
                            half.holder(pos),
                            Payload::new()
                                .tag(TAG_MOVE)
                                .point(prev)
                                .point(x.v)
                                .point(next)
                                .count(pos as u64),
                        ));
                    }
                }
            }
            out
        },
        |id, s, msgs| {
            let (Some(piece), Some(split)) = (s.piece.take(), s.split.take()) else {
                return;
            };
            s.median = None;
            let (first, second) = piece.halves(split.i, split.k);
            let Some(mut next_piece) = [first, second].into_iter().find(|p| p.contains(id)) else {
                return;
            };
            next_piece.slots = msgs
                .into_iter()
                .map(|(_, payload)| {
                    let mut r = payload.reader();
                    r.tag();
                    let (prev, v, next) = (r.point(), r.point(), r.point());
                    Slot {
                        pos: r.count() as usize,
                        v,
                        prev,
                        next,
                    }
                })
                .collect();
            next_piece.slots.sort_unstable_by_key(|x| x.pos);
            s.piece = Some(next_piece);
        },
    )?;
    Ok(())
}

/// Spreads the triangles evenly: one all-gather of counts, then routing.
fn compact_triangles(clique: &mut Clique<TriNode>) -> Result<Vec<Vec<Triangle>>> {
    let n = clique.n();
    all_gather_one(
        clique,
        |_, s| Payload::new().tag(TAG_TRIANGLE).count(s.tris.len() as u64),
        |_, s, all| {
            s.tri_counts = all
                .iter()
                .map(|p| {
                    let mut r = p.reader();
                    r.tag();
                    r.count()
                })
                .collect();
        },
    )?;
    route_batched(
        clique,
        |id, s| {
            let total: u64 = s.tri_counts.iter().sum();
            let quota = total.div_ceil(n as u64).max(1);
            let base: u64 = s.tri_counts[..id.slot()].iter().sum();
            s.tris
                .iter()
                .zip(base..)
                .map(|(t, rank)| {
                    (
                        NodeId::from_slot((rank / quota) as usize),
                        Payload::new()
                            .tag(TAG_TRIANGLE)
                            .points(t.vertices())
                            .count(rank),
                    )
                })
                .collect()
        },
        |_, s, msgs| {
            s.out = msgs
                .into_iter()
                .map(|(_, payload)| {
                    let mut r = payload.reader();
                    r.tag();
                    let (a, b, c) = (r.point(), r.point(), r.point());
                    (r.count(), Triangle { a, b, c })
                })
                .collect();
            s.out.sort_unstable_by_key(|x| x.0);
        },
    )?;
    Ok(clique
        .states()
        .iter()
        .map(|s| s.out.iter().map(|x| x.1).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{general_position_check, hull_oracle, triangulation_validator};
    use rand::{Rng, SeedableRng};

    fn general_points(seed: u64, count: usize, span: i64) -> Vec<Point> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<Point> = Vec::with_capacity(count);
        while pts.len() < count {
            let p = Point::new(rng.gen_range(0..span), rng.gen_range(0..span));
            pts.push(p);
            if !general_position_check(&pts).ok {
                pts.pop();
            }
        }
        pts
    }

    fn batches(points: &[Point], n: usize) -> Vec<Vec<Point>> {
        points.chunks(n).map(<[Point]>::to_vec).collect()
    }

    fn run_and_validate(points: &[Point], n: usize) -> TriangulationRun {
        let config = EngineConfig::new(n).with_coord_bits(16);
        let run = triangulate_set(config, batches(points, n)).unwrap();
        let tris = run.triangles();
        let hull = hull_oracle(points).unwrap();
        let report = triangulation_validator(points, &tris, &hull);
        assert!(report.passed, "{:?}", report.failures);
        assert!(run.metrics.is_compliant(n));
        run
    }

    #[test]
    fn convex_quadrilateral_on_two_nodes() {
        let pts = [(0, 0), (1, 5), (6, 6), (7, 1)].map(Point::from);
        let run = run_and_validate(&pts, 2);
        assert_eq!(run.triangles().len(), 2);
        assert_eq!(run.phases.len(), 1);
    }

    #[test]
    fn single_node_is_local() {
        let pts = [Point::new(3, 3)];
        let run = triangulate_set(EngineConfig::new(1), vec![pts.to_vec()]).unwrap();
        assert!(run.triangles().is_empty());
        assert_eq!(run.metrics.rounds_total, 0);
    }

    #[test]
    fn rejects_other_sizes() {
        let pts = general_points(1, 9, 100);
        let err = triangulate_set(EngineConfig::new(3), batches(&pts, 3)).unwrap_err();
        assert!(matches!(err, Error::NotPowerOfTwo(3)));
    }

    #[test]
    fn random_sets_are_triangulated() {
        for n in [2usize, 4, 8] {
            for seed in 0..8 {
                let mut pts = general_points(seed, n * n, 1 << 12);
                pts.reverse();
                let run = run_and_validate(&pts, n);
                let h = hull_oracle(&pts).unwrap().len();
                assert_eq!(run.triangles().len(), 2 * n * n - h - 2);
            }
        }
    }

    #[test]
    fn convex_position_makes_long_corridors() {
        // points on a parabola: every point is a hull vertex
        let n = 8;
        let pts: Vec<Point> = (0..64).map(|x| Point::new(x, x * x)).collect();
        let run = run_and_validate(&pts, n);
        assert_eq!(run.triangles().len(), 64 - 2);
        assert!(run.phases.iter().all(|p| p.max_corridor >= 2));
    }

    #[test]
    fn collinear_input_is_reported() {
        let pts: Vec<Point> = (0..4).map(|x| Point::new(x, 2 * x)).collect();
        let err = triangulate_set(EngineConfig::new(2), batches(&pts, 2)).unwrap_err();
        assert!(matches!(
            err,
            Error::CollinearTriple(..) | Error::NoMateFound(_)
        ));
    }
}
