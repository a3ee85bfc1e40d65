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

//! Output-sensitive distributed quickhull.
//!
//! One chord `(p, r)` is active at a time. Each iteration, nodes send their
//! best point above the chord to the master (the holder of `p`), which either
//! pushes the far point and recurses left, or declares `p r` a hull edge and
//! pops the next chord from a stack spread over the nodes. Every iteration
//! costs a constant number of rounds, so the whole run is linear in `h`.

use std::collections::BTreeMap;

use crate::comm::broadcast_from;
use crate::engine::{EngineConfig, NodeId, Payload};
use crate::error::Result;
use crate::geometry::{cross, Point};
use crate::hull::{build, compact, prelude, HullNode, HullRun, HullSide};

const TAG_CANDIDATE: u8 = 10;
const TAG_PUSH: u8 = 11;
const TAG_POP: u8 = 12;
const TAG_TOP: u8 = 13;

/// A pending chord on the distributed stack, `p < r` in the current view.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct StackEntry {
    pub p: Point,
    pub p_holder: NodeId,
    pub r: Point,
    pub r_holder: NodeId,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Decision {
    Push(Point, NodeId),
    Pop,
}

#[derive(Clone, Debug)]
struct QuickNode {
    me: NodeId,
    n: usize,
    seq: Vec<Point>,
    chord: StackEntry,
    /// Entries whose slot lives on this node, keyed by stack position.
    slots: BTreeMap<usize, StackEntry>,
    depth: usize,
    marks: Vec<Point>,
    decision: Option<Decision>,
    selections: u64,
}

impl Default for QuickNode {
    fn default() -> Self {
        let origin = Point::new(0, 0);
        let one = NodeId::new(1);
        QuickNode {
            me: one,
            n: 1,
            seq: Vec::new(),
            chord: StackEntry {
                p: origin,
                p_holder: one,
                r: origin,
                r_holder: one,
            },
            slots: BTreeMap::new(),
            depth: 0,
            marks: Vec::new(),
            decision: None,
            selections: 0,
        }
    }
}

/// Ordering key for far-point candidates: distance above the chord, then
/// larger y, then smaller x. Points are distinct, so this is total.
fn far_key(c: &StackEntry, q: Point) -> (i128, i64, i64) {
    (cross(c.p, c.r, q), q.y, -q.x)
}

impl QuickNode {
    fn best_candidate(&self) -> Option<Point> {
        let c = &self.chord;
        let lo = self.seq.partition_point(|&v| v <= c.p);
        let hi = self.seq.partition_point(|&v| v < c.r);
        self.seq
            .get(lo..hi.max(lo))
            .unwrap_or(&[])
            .iter()
            .copied()
            .filter(|&v| cross(c.p, c.r, v) > 0)
            .max_by_key(|&v| far_key(c, v))
    }

    fn slot_of(&self, k: usize) -> NodeId {
        NodeId::new(k.div_ceil(self.n))
    }

    fn decision_payload(&self) -> Payload {
        match self.decision.expect("master has not decided") {
            Decision::Push(q, holder) => Payload::new().tag(TAG_PUSH).point(q).node(holder),
            Decision::Pop => Payload::new().tag(TAG_POP),
        }
    }

    fn apply_decision(&mut self, payload: &Payload) {
        let mut r = payload.reader();
        match r.tag() {
            TAG_PUSH => {
                let (q, holder) = (r.point(), r.node());
                self.decision = Some(Decision::Push(q, holder));
                self.selections += 1;
                self.depth += 1;
                if self.slot_of(self.depth) == self.me {
                    let entry = StackEntry {
                        p: q,
                        p_holder: holder,
                        ..self.chord
                    };
                    self.slots.insert(self.depth, entry);
                }
                self.chord.r = q;
                self.chord.r_holder = holder;
            }
            _ => {
                self.decision = Some(Decision::Pop);
                let c = self.chord;
                for (v, holder) in [(c.p, c.p_holder), (c.r, c.r_holder)] {
                    if holder == self.me {
                        self.marks.push(v);
                    }
                }
            }
        }
    }

    fn top_payload(&self) -> Payload {
        let e = self.slots[&self.depth];
        Payload::new()
            .tag(TAG_TOP)
            .point(e.p)
            .node(e.p_holder)
            .point(e.r)
            .node(e.r_holder)
    }

    fn apply_top(&mut self, payload: &Payload) {
        let mut r = payload.reader();
        r.tag();
        self.chord = StackEntry {
            p: r.point(),
            p_holder: r.node(),
            r: r.point(),
            r_holder: r.node(),
        };
        self.slots.remove(&self.depth);
        self.depth -= 1;
    }
}

type Clq = crate::engine::Clique<HullNode<QuickNode>>;

/// Marks the hull vertices of one side, working in that side's view.
/// Returns the number of far-point selections.
fn quick_side(clique: &mut Clq, side: HullSide) -> Result<u64> {
    let n = clique.n();
    clique.local(|id, s, _| {
        let ((p, ph), (r, rh)) = side.chord(s, n);
        s.ext = QuickNode {
            me: id,
            n,
            seq: side.sequence(s),
            chord: StackEntry {
                p,
                p_holder: ph,
                r,
                r_holder: rh,
            },
            ..QuickNode::default()
        };
    });
    let first = &clique.states()[0].ext.chord;
    if first.p == first.r {
        // a single input point
        clique.local(|_, s, _| {
            if s.ext.chord.p_holder == s.ext.me {
                let p = s.ext.chord.p;
                side.store(s, [p]);
            }
        });
        return Ok(0);
    }

    loop {
        let master = clique.states()[0].ext.chord.p_holder;
        clique.round(|ctx, s| {
            if ctx.id() != master {
                if let Some(q) = s.ext.best_candidate() {
                    ctx.send(master, Payload::new().tag(TAG_CANDIDATE).point(q));
                }
            }
        })?;
        clique.local(|id, s, inbox| {
            if id != master {
                return;
            }
            let own = s.ext.best_candidate().map(|q| (q, id));
            let received = inbox.iter().map(|m| {
                let mut r = m.payload.reader();
                r.tag();
                (r.point(), m.src)
            });
            let chord = s.ext.chord;
            let best = own.into_iter().chain(received).max_by(|a, b| {
                far_key(&chord, a.0)
                    .cmp(&far_key(&chord, b.0))
                    .then(b.1.cmp(&a.1))
            });
            s.ext.decision = Some(match best {
                Some((q, holder)) => Decision::Push(q, holder),
                None => Decision::Pop,
            });
        });
        broadcast_from(
            clique,
            master,
            |s| s.ext.decision_payload(),
            |s, payload| s.ext.apply_decision(payload),
        )?;

        let ext = &clique.states()[0].ext;
        if ext.decision == Some(Decision::Pop) {
            if ext.depth == 0 {
                break;
            }
            let holder = ext.slot_of(ext.depth);
            broadcast_from(
                clique,
                holder,
                |s| s.ext.top_payload(),
                |s, payload| s.ext.apply_top(payload),
            )?;
        }
    }

    clique.local(|_, s, _| {
        let marks = std::mem::take(&mut s.ext.marks);
        side.store(s, marks);
    });
    Ok(clique.states()[0].ext.selections)
}

/// Far-point selections made on each side of the hull.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct QuickStats {
    pub upper_selections: u64,
    pub lower_selections: u64,
}

/// Distributed quickhull. Node `i` of `inputs` holds `n` points; the result
/// holds the strict hull clockwise from the lexicographically smallest point.
///
/// Unless `config.round_ceiling` is set, the run is aborted after `64 n^2`
/// rounds, comfortably above the `O(h)` cost for `h <= n^2`.
pub fn quick_convex_hull(config: EngineConfig, inputs: Vec<Vec<Point>>) -> Result<HullRun> {
    quick_convex_hull_with_stats(config, inputs).map(|(run, _)| run)
}

pub fn quick_convex_hull_with_stats(
    config: EngineConfig,
    inputs: Vec<Vec<Point>>,
) -> Result<(HullRun, QuickStats)> {
    let n = config.n as u64;
    let mut clique = build::<QuickNode>(config, inputs, 64 * n * n)?;
    prelude(&mut clique)?;
    let upper_selections = quick_side(&mut clique, HullSide::Upper)?;
    let lower_selections = quick_side(&mut clique, HullSide::Lower)?;
    let output = compact(&mut clique)?;
    Ok((
        HullRun::finish(clique, output),
        QuickStats {
            upper_selections,
            lower_selections,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::hull_oracle;

    fn batches(points: Vec<Point>, n: usize) -> Vec<Vec<Point>> {
        points.chunks(n).map(<[Point]>::to_vec).collect()
    }

    #[test]
    fn far_point_prefers_distance_then_y_then_x() {
        let chord = StackEntry {
            p: Point::new(0, 0),
            p_holder: NodeId::new(1),
            r: Point::new(4, 0),
            r_holder: NodeId::new(1),
        };
        let best = [Point::new(1, 3), Point::new(2, 3), Point::new(3, 1)]
            .into_iter()
            .max_by_key(|&q| far_key(&chord, q))
            .unwrap();
        assert_eq!(best, Point::new(1, 3));
    }

    #[test]
    fn square_with_interior() {
        let mut pts = vec![
            Point::new(0, 0),
            Point::new(9, 0),
            Point::new(9, 9),
            Point::new(0, 9),
        ];
        for i in 1..=12 {
            pts.push(Point::new(i % 8 + 1, (i * 3) % 7 + 1));
        }
        pts.sort();
        let run = quick_convex_hull(EngineConfig::new(4), batches(pts.clone(), 4)).unwrap();
        assert_eq!(run.output.vertices(), hull_oracle(&pts).unwrap());
        assert_eq!(run.output.batches[0].len(), 4);
        assert!(run.metrics.is_compliant(4));
    }

    #[test]
    fn parabola_selects_every_interior_vertex() {
        let n = 4;
        let pts: Vec<Point> = (0..16).map(|x| Point::new(x, x * x)).collect();
        let (run, stats) =
            quick_convex_hull_with_stats(EngineConfig::new(n), batches(pts.clone(), n)).unwrap();
        assert_eq!(run.output.len(), 16);
        // the upper hull is just the two ends; everything else is lower
        assert_eq!(stats.upper_selections, 0);
        assert_eq!(stats.lower_selections, 14);
        assert_eq!(run.output.vertices(), hull_oracle(&pts).unwrap());
    }

    #[test]
    fn single_node_and_single_point() {
        let run = quick_convex_hull(EngineConfig::new(1), vec![vec![Point::new(5, 5)]]).unwrap();
        assert_eq!(run.output.vertices(), vec![Point::new(5, 5)]);
        assert_eq!(run.metrics.rounds_total, 0);
    }

    #[test]
    fn collinear_input_gives_two_ends() {
        let pts: Vec<Point> = (0..9).map(|i| Point::new(i, 2 * i)).collect();
        let run = quick_convex_hull(EngineConfig::new(3), batches(pts, 3)).unwrap();
        assert_eq!(
            run.output.vertices(),
            vec![Point::new(0, 0), Point::new(8, 16)]
        );
    }

    #[test]
    fn duplicates_are_rejected() {
        let inputs = vec![
            vec![Point::new(0, 0), Point::new(1, 1)],
            vec![Point::new(1, 1), Point::new(2, 0)],
        ];
        assert!(quick_convex_hull(EngineConfig::new(2), inputs).is_err());
    }
}
